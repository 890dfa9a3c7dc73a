#pragma once

#include "cfmimo/network.hpp"
#include "cfmimo/rng.hpp"
#include "cfmimo/types.hpp"

#include <cstdint>
#include <memory>
#include <vector>

namespace cfmimo {

/// Per-link second-order statistics of the linear MMSE estimator. They depend
/// only on the snapshot, so one instance is shared by every realization.
struct EstimatorStatistics {
  Grid<CMat> Gamma;   // p_u tau_p sum_{k' in P_k} R_k'l + sigma_z^2 I
  Grid<CMat> Theta;   // error covariance R - p_u tau_p R Gamma^-1 R
  Grid<CMat> filter;  // p_u tau_p R Gamma^-1, applied to the despread pilot signal
};

struct ChannelSet {
  Grid<CVec> h;      // true channels
  Grid<CVec> h_hat;  // MMSE estimates (empty until estimated)
  std::shared_ptr<const EstimatorStatistics> stats;

  const CMat& Gamma(int k, int l) const { return stats->Gamma(k, l); }
  const CMat& Theta(int k, int l) const { return stats->Theta(k, l); }
};

/// Hermitian PSD square root; eigenvalues at or below rounding level are clipped to 0.
/// Throws NumericalError if the matrix is materially indefinite.
CMat psd_sqrt(const CMat& R);

/// Draws h_kl = R_kl^{1/2} g for every link of the snapshot.
class ChannelSampler {
 public:
  explicit ChannelSampler(const NetworkSnapshot& snapshot);
  Grid<CVec> draw(Rng& rng) const;

 private:
  Grid<CMat> sqrt_R_;
  int antennas_;
};

/// Independent realizations; realization r uses a seed derived from (seed, r).
std::vector<ChannelSet> draw_channels(const NetworkSnapshot& snapshot, int n_realizations,
                                      std::uint64_t seed);

std::shared_ptr<const EstimatorStatistics> estimator_statistics(const NetworkSnapshot& snapshot,
                                                                const PilotGroups& groups);

/// Simulates the pilot phase (one noise draw per pilot and AP, shared by every
/// user on that pilot) and returns the MMSE estimates alongside the inputs.
ChannelSet mmse_estimate(const NetworkSnapshot& snapshot, const PilotGroups& groups,
                         const Grid<CVec>& true_channels, std::uint64_t pilot_noise_seed);

ChannelSet mmse_estimate(const NetworkSnapshot& snapshot, const PilotGroups& groups,
                         std::shared_ptr<const EstimatorStatistics> stats,
                         const Grid<CVec>& true_channels, Rng& noise_rng);

}  // namespace cfmimo
