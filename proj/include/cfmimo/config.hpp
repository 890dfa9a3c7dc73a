#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

namespace cfmimo {

/// Simulation parameters. Defaults reproduce the reference deployment:
/// 32 two-antenna APs serving 4 users in a 1 km microcell.
struct SimConfig {
  int num_aps = 32;               // L
  int antennas_per_ap = 2;        // N_a
  int num_users = 4;              // K
  int coherence_block = 200;      // tau_c
  int pilot_length = 2;           // tau_p
  double user_power_w = 0.2;      // p_u
  double ap_power_w = 0.1;        // p_a
  double bandwidth_hz = 5e6;
  double noise_figure_db = 9.0;
  double coverage_radius_m = 1000.0;
  double angular_spread_deg = 30.0;
  int realizations_for_moments = 100;
  std::uint64_t seed = 1;

  int total_antennas() const { return num_aps * antennas_per_ap; }

  /// Throws ConfigError naming the first violated invariant.
  void validate() const;
};

SimConfig load_config(const std::filesystem::path& path);
SimConfig config_from_json(const std::string& text);
std::string config_to_json(const SimConfig& cfg);

/// Stable 64-bit FNV-1a hash of the canonical JSON form.
std::uint64_t config_hash(const SimConfig& cfg);

}  // namespace cfmimo
