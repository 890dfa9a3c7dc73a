#pragma once

#include "cfmimo/config.hpp"
#include "cfmimo/types.hpp"

#include <cstdint>
#include <vector>

namespace cfmimo {

/// One large-scale realization of the deployment. All per-link quantities are
/// indexed (user k, AP l).
struct NetworkSnapshot {
  int num_aps = 0;
  int num_users = 0;
  int antennas_per_ap = 0;
  int pilot_length = 1;
  double user_power_w = 0.0;
  double ap_power_w = 0.0;

  std::vector<Point> ap_positions;
  std::vector<Point> user_positions;
  Grid<CMat> R;                 // spatial correlation, path loss folded into the scale
  std::vector<int> pilot_of;    // user -> pilot index
  std::vector<cd> alpha;        // PA linear gain per AP
  std::vector<double> beta;     // PA distortion-to-signal ratio per AP
  double sigma_z2 = 0.0;        // thermal noise power [W]

  /// Copy of this snapshot with an ideal (linear, unit-gain) PA at every AP.
  NetworkSnapshot with_ideal_pa() const;

  /// FNV-1a hash over every numeric field; used as a cache key.
  std::uint64_t hash() const;

  void validate() const;
};

/// P_k for every user: the users sharing user k's pilot, k included.
struct PilotGroups {
  std::vector<std::vector<int>> members;
};

double noise_power_w(double bandwidth_hz, double noise_figure_db);

/// Large-scale gain (linear) for distance d in meters and shadowing in dB.
double large_scale_gain(double distance_m, double shadowing_db);

/// Unit-diagonal Gaussian local-scattering correlation for a half-wavelength ULA.
CMat local_scattering_correlation(int antennas, double nominal_angle_rad, double angular_std_rad);

NetworkSnapshot generate_snapshot(const SimConfig& cfg);

PilotGroups pilot_groups(const NetworkSnapshot& snapshot);

}  // namespace cfmimo
