#include "cfmimo/channel.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>

namespace cfmimo {

CMat psd_sqrt(const CMat& R) {
  const int n = static_cast<int>(R.rows());
  if (R.norm() == 0.0) return CMat::Zero(n, n);
  Eigen::SelfAdjointEigenSolver<CMat> eig(R);
  if (eig.info() != Eigen::Success) throw NumericalError("eigendecomposition of correlation matrix failed");
  const RVec& ev = eig.eigenvalues();
  const double trace = std::abs(R.trace().real());
  if (ev.minCoeff() < -1e-10 * std::max(trace, 1e-300))
    throw NumericalError("correlation matrix is not positive semidefinite");
  // Eigenvalues at rounding level are treated as exact zeros.
  const double floor = 64.0 * std::numeric_limits<double>::epsilon() * std::max(ev.maxCoeff(), 0.0);
  const RVec root = ev.unaryExpr([floor](double v) { return v > floor ? std::sqrt(v) : 0.0; });
  return eig.eigenvectors() * root.asDiagonal() * eig.eigenvectors().adjoint();
}

ChannelSampler::ChannelSampler(const NetworkSnapshot& snapshot)
    : sqrt_R_(snapshot.num_users, snapshot.num_aps), antennas_(snapshot.antennas_per_ap) {
  for (int k = 0; k < snapshot.num_users; ++k)
    for (int l = 0; l < snapshot.num_aps; ++l) sqrt_R_(k, l) = psd_sqrt(snapshot.R(k, l));
}

Grid<CVec> ChannelSampler::draw(Rng& rng) const {
  Grid<CVec> h(sqrt_R_.rows(), sqrt_R_.cols());
  for (int k = 0; k < h.rows(); ++k)
    for (int l = 0; l < h.cols(); ++l) h(k, l) = sqrt_R_(k, l) * complex_normal_vector(rng, antennas_);
  return h;
}

std::vector<ChannelSet> draw_channels(const NetworkSnapshot& snapshot, int n_realizations,
                                      std::uint64_t seed) {
  ChannelSampler sampler(snapshot);
  std::vector<ChannelSet> out;
  out.reserve(n_realizations);
  for (int r = 0; r < n_realizations; ++r) {
    Rng rng(derive_seed(seed, streams::kChannel, r));
    ChannelSet set;
    set.h = sampler.draw(rng);
    out.push_back(std::move(set));
  }
  return out;
}

std::shared_ptr<const EstimatorStatistics> estimator_statistics(const NetworkSnapshot& snapshot,
                                                                const PilotGroups& groups) {
  const int K = snapshot.num_users;
  const int L = snapshot.num_aps;
  const int N = snapshot.antennas_per_ap;
  const double gain = snapshot.user_power_w * snapshot.pilot_length;

  auto stats = std::make_shared<EstimatorStatistics>();
  stats->Gamma = Grid<CMat>(K, L);
  stats->Theta = Grid<CMat>(K, L);
  stats->filter = Grid<CMat>(K, L);
  for (int k = 0; k < K; ++k) {
    for (int l = 0; l < L; ++l) {
      CMat gamma = snapshot.sigma_z2 * CMat::Identity(N, N);
      for (int j : groups.members[k]) gamma += gain * snapshot.R(j, l);
      const CMat& R = snapshot.R(k, l);
      // Gamma is Hermitian PD, so R Gamma^-1 = (Gamma^-1 R)^H.
      const CMat gamma_inv_R = gamma.llt().solve(R);
      const CMat filter = gain * gamma_inv_R.adjoint();
      stats->Gamma(k, l) = gamma;
      stats->filter(k, l) = filter;
      CMat theta = R - filter * R;
      stats->Theta(k, l) = 0.5 * (theta + theta.adjoint());
    }
  }
  return stats;
}

ChannelSet mmse_estimate(const NetworkSnapshot& snapshot, const PilotGroups& groups,
                         std::shared_ptr<const EstimatorStatistics> stats,
                         const Grid<CVec>& true_channels, Rng& noise_rng) {
  const int K = snapshot.num_users;
  const int L = snapshot.num_aps;
  const int N = snapshot.antennas_per_ap;
  const double noise_scale =
      std::sqrt(snapshot.sigma_z2 / (snapshot.user_power_w * snapshot.pilot_length));

  // One noise vector per (pilot, AP): users on the same pilot see the same despread signal.
  Grid<CVec> noise(snapshot.pilot_length, L);
  for (int t = 0; t < snapshot.pilot_length; ++t)
    for (int l = 0; l < L; ++l) noise(t, l) = noise_scale * complex_normal_vector(noise_rng, N);

  ChannelSet set;
  set.h = true_channels;
  set.h_hat = Grid<CVec>(K, L);
  for (int k = 0; k < K; ++k) {
    for (int l = 0; l < L; ++l) {
      CVec observation = noise(snapshot.pilot_of[k], l);
      for (int j : groups.members[k]) observation += true_channels(j, l);
      set.h_hat(k, l) = stats->filter(k, l) * observation;
    }
  }
  set.stats = std::move(stats);
  return set;
}

ChannelSet mmse_estimate(const NetworkSnapshot& snapshot, const PilotGroups& groups,
                         const Grid<CVec>& true_channels, std::uint64_t pilot_noise_seed) {
  Rng rng(pilot_noise_seed);
  return mmse_estimate(snapshot, groups, estimator_statistics(snapshot, groups), true_channels, rng);
}

}  // namespace cfmimo
