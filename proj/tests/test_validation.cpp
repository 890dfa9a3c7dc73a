#include "cfmimo/validation.hpp"
#include "cfmimo/types.hpp"
#include "doctest.h"

using namespace cfmimo;

TEST_CASE("property suite passes on the default configuration") {
  ValidationOptions opt;
  opt.instances = 6;
  const auto checks = run_property_suite(SimConfig{}, opt);
  CHECK(checks.size() >= 6);
  for (const auto& c : checks) {
    INFO(c.name << ": " << c.detail);
    CHECK(c.passed);
  }
}

TEST_CASE("property suite rejects an invalid configuration") {
  SimConfig cfg;
  cfg.num_users = 0;
  CHECK_THROWS_AS(run_property_suite(cfg), ConfigError);
}
