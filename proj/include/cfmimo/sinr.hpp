#pragma once

#include "cfmimo/moments.hpp"
#include "cfmimo/network.hpp"
#include "cfmimo/precoding.hpp"
#include "cfmimo/types.hpp"

#include <cstdint>
#include <vector>

namespace cfmimo {

/// Terms of the downlink SINR of one user, all normalized by p_a.
struct SinrBreakdown {
  double signal = 0.0;        // |sum_l alpha_l u_kl sqrt(eta_kl) E[h_kl^T w_kl]|^2
  double uncertainty = 0.0;   // channel-uncertainty variance (J1)
  double interference = 0.0;  // inter-user interference (J2)
  double distortion = 0.0;    // PA distortion seen through the channel (J3)
  double noise = 0.0;         // sigma_z^2 / p_a
  double gamma = 0.0;
  double se = 0.0;            // log2(1 + gamma) [bit/s/Hz]
};

/// Evaluates the closed-form SINR of every user for association U (0/1) and
/// power coefficients eta.
std::vector<SinrBreakdown> sinr_of(const NetworkSnapshot& snapshot, const MomentTable& moments,
                                   const Grid<char>& U, const Grid<double>& eta);

inline double spectral_efficiency(double gamma) { return std::log2(1.0 + gamma); }

/// Link-level measurement of one user's received signal components.
struct MeasuredLink {
  double sinr = 0.0;              // signal_power / impairment_power
  double signal_power = 0.0;      // p_a |E[G_kk]|^2, G_kk the effective channel
  double received_power = 0.0;    // E|y|^2
  double impairment_power = 0.0;  // E|y - sqrt(p_a) E[G_kk] x_k|^2
  double uncertainty_power = 0.0;
  double interference_power = 0.0;
  double distortion_power = 0.0;
  double noise_power = 0.0;
  /// |E[J_a J_b^*]| / sqrt(E|J_a|^2 E|J_b|^2) for the pairs (1,2), (1,3), (2,3).
  double corr_12 = 0.0;
  double corr_13 = 0.0;
  double corr_23 = 0.0;
};

/// Simulates y_k = sum_l h_kl^T x_l + n_k symbol by symbol, with the
/// Bussgang-amplified transmit signal and Gaussian distortion d_l, and detects
/// against the statistical mean of the effective channel. Test-only oracle.
std::vector<MeasuredLink> empirical_sinr_validation(const NetworkSnapshot& snapshot, Precoder scheme,
                                                    const Grid<char>& U, const Grid<double>& eta,
                                                    int n_mc, std::uint64_t seed);

}  // namespace cfmimo
