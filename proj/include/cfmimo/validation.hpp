#pragma once

#include "cfmimo/config.hpp"

#include <string>
#include <vector>

namespace cfmimo {

struct PropertyCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct ValidationOptions {
  int instances = 10;        // random snapshots per optimizer property
  int moment_samples = 100;  // realizations per moment table
};

/// Runs the solver, precoder, SINR and optimizer property checks on small
/// instances derived from cfg (L and K are reduced; other parameters kept).
std::vector<PropertyCheck> run_property_suite(const SimConfig& cfg, const ValidationOptions& options = {});

}  // namespace cfmimo
