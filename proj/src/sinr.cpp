#include "cfmimo/sinr.hpp"

#include "cfmimo/channel.hpp"
#include "cfmimo/rng.hpp"

#include <cmath>

namespace cfmimo {

std::vector<SinrBreakdown> sinr_of(const NetworkSnapshot& snapshot, const MomentTable& m,
                                   const Grid<char>& U, const Grid<double>& eta) {
  const int K = snapshot.num_users;
  const int L = snapshot.num_aps;

  // Per-AP load sum_k u_kl eta_kl drives the distortion term.
  std::vector<double> load(L, 0.0);
  for (int l = 0; l < L; ++l)
    for (int k = 0; k < K; ++k)
      if (U(k, l)) load[l] += eta(k, l);

  std::vector<SinrBreakdown> out(K);
  for (int k = 0; k < K; ++k) {
    SinrBreakdown& b = out[k];
    cd coherent(0.0, 0.0);
    for (int l = 0; l < L; ++l) {
      const double a2 = std::norm(snapshot.alpha[l]);
      b.distortion += snapshot.beta[l] * load[l] * m.trR(k, l);
      for (int kp = 0; kp < K; ++kp) {
        if (!U(kp, l)) continue;
        const double s = eta(kp, l) * a2 * m.second_moment(k, kp, l);
        if (kp == k) {
          b.uncertainty += s - eta(k, l) * a2 * std::norm(m.mean_gain(k, l));
          coherent += snapshot.alpha[l] * std::sqrt(eta(k, l)) * m.mean_gain(k, l);
        } else {
          b.interference += s;
        }
      }
    }
    b.signal = std::norm(coherent);
    b.noise = snapshot.sigma_z2 / snapshot.ap_power_w;
    b.gamma = b.signal / (b.noise + b.uncertainty + b.interference + b.distortion);
    b.se = spectral_efficiency(b.gamma);
  }
  return out;
}

std::vector<MeasuredLink> empirical_sinr_validation(const NetworkSnapshot& snapshot, Precoder scheme,
                                                    const Grid<char>& U, const Grid<double>& eta,
                                                    int n_mc, std::uint64_t seed) {
  const int K = snapshot.num_users;
  const int L = snapshot.num_aps;
  const int N = snapshot.antennas_per_ap;
  const double sqrt_pa = std::sqrt(snapshot.ap_power_w);
  const PilotGroups groups = pilot_groups(snapshot);
  const auto stats = estimator_statistics(snapshot, groups);
  const ChannelSampler sampler(snapshot);
  const Grid<double> mmse_eta = equal_power_split(snapshot);

  std::vector<double> sigma_d(L, 0.0);
  for (int l = 0; l < L; ++l) {
    double load = 0.0;
    for (int k = 0; k < K; ++k)
      if (U(k, l)) load += eta(k, l);
    sigma_d[l] = std::sqrt(snapshot.beta[l] * snapshot.ap_power_w * load);
  }

  // Pass 1: per-realization effective gains G(k, k') = sum_l alpha_l u sqrt(eta) h_kl^T w_k'l,
  // plus distortion, noise and symbols, all drawn here so pass 2 is pure arithmetic.
  struct Sample {
    CMat G;
    CVec j3;
    CVec noise;
    CVec x;
  };
  std::vector<Sample> samples(n_mc);
  CMat mean_G = CMat::Zero(K, K);
  for (int r = 0; r < n_mc; ++r) {
    Rng rng(derive_seed(seed, streams::kLinkSim, r));
    const Grid<CVec> h = sampler.draw(rng);
    const ChannelSet channels = mmse_estimate(snapshot, groups, stats, h, rng);
    const PrecoderSet pre = compute_precoders(scheme, channels, snapshot, mmse_eta);
    Sample s{CMat::Zero(K, K), CVec::Zero(K), CVec::Zero(K), complex_normal_vector(rng, K)};
    std::vector<CVec> d(L);
    for (int l = 0; l < L; ++l) d[l] = sigma_d[l] * complex_normal_vector(rng, N);
    for (int k = 0; k < K; ++k) {
      for (int l = 0; l < L; ++l) {
        for (int kp = 0; kp < K; ++kp) {
          if (!U(kp, l)) continue;
          const cd hw = h(k, l).transpose() * pre.w(kp, l);
          s.G(k, kp) += snapshot.alpha[l] * std::sqrt(eta(kp, l)) * hw;
        }
        s.j3(k) += (h(k, l).transpose() * d[l]).value();
      }
      s.noise(k) = std::sqrt(snapshot.sigma_z2) * complex_normal(rng);
    }
    mean_G += s.G;
    samples[r] = std::move(s);
  }
  mean_G /= static_cast<double>(n_mc);

  std::vector<MeasuredLink> out(K);
  for (int k = 0; k < K; ++k) {
    // The receiver only knows the statistical mean of its effective channel.
    const cd known = sqrt_pa * mean_G(k, k);
    double yy = 0.0, impairment = 0.0, p1 = 0.0, p2 = 0.0, p3 = 0.0, pn = 0.0;
    cd c12(0.0, 0.0), c13(0.0, 0.0), c23(0.0, 0.0);
    for (const Sample& s : samples) {
      const cd j1 = sqrt_pa * (s.G(k, k) - mean_G(k, k)) * s.x(k);
      cd j2(0.0, 0.0);
      for (int kp = 0; kp < K; ++kp)
        if (kp != k) j2 += sqrt_pa * s.G(k, kp) * s.x(kp);
      const cd j3 = s.j3(k);
      const cd y = sqrt_pa * s.G(k, k) * s.x(k) + j2 + j3 + s.noise(k);
      yy += std::norm(y);
      impairment += std::norm(y - known * s.x(k));
      p1 += std::norm(j1);
      p2 += std::norm(j2);
      p3 += std::norm(j3);
      pn += std::norm(s.noise(k));
      c12 += j1 * std::conj(j2);
      c13 += j1 * std::conj(j3);
      c23 += j2 * std::conj(j3);
    }
    const double n = n_mc;
    MeasuredLink& m = out[k];
    m.signal_power = std::norm(known);
    m.received_power = yy / n;
    m.impairment_power = impairment / n;
    m.uncertainty_power = p1 / n;
    m.interference_power = p2 / n;
    m.distortion_power = p3 / n;
    m.noise_power = pn / n;
    m.sinr = m.impairment_power > 0.0 ? m.signal_power / m.impairment_power : 0.0;
    auto corr = [n](cd c, double a, double b) {
      return (a > 0.0 && b > 0.0) ? std::abs(c / n) / std::sqrt((a / n) * (b / n)) : 0.0;
    };
    m.corr_12 = corr(c12, p1, p2);
    m.corr_13 = corr(c13, p1, p3);
    m.corr_23 = corr(c23, p2, p3);
  }
  return out;
}

}  // namespace cfmimo
