#pragma once

#include "cfmimo/types.hpp"

namespace cfmimo::pa {

/// Bussgang parameters of one AP's amplifier.
struct PAParams {
  cd alpha{1.0, 0.0};
  double beta = 0.0;
};

/// sigma_d^2 = beta * p_a * load, where load = sum_k u_kl eta_kl.
double distortion_variance(double beta, double ap_power_w, double load);

/// Largest admissible load sum_k u_kl eta_kl: 1 / (|alpha|^2 + beta N_a).
/// Throws ConfigError when the amplifier is degenerate (alpha = beta = 0).
double effective_budget(cd alpha, double beta, int antennas);

/// E||x_l||^2 = (|alpha|^2 p_a + beta p_a N_a) * load.
double transmitted_power(cd alpha, double beta, int antennas, double ap_power_w, double load);

}  // namespace cfmimo::pa
