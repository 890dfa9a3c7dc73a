#include "cfmimo/channel.hpp"
#include "cfmimo/precoding.hpp"
#include "cfmimo/rng.hpp"
#include "doctest.h"
#include "test_support.hpp"

using namespace cfmimo;

namespace {

ChannelSet estimated_channels(const NetworkSnapshot& s, std::uint64_t seed) {
  const auto sets = draw_channels(s, 1, seed);
  return mmse_estimate(s, pilot_groups(s), sets[0].h, derive_seed(seed, streams::kPilotNoise));
}

NetworkSnapshot generated(int L, int K, int N, std::uint64_t seed) {
  SimConfig cfg;
  cfg.num_aps = L;
  cfg.num_users = K;
  cfg.antennas_per_ap = N;
  cfg.pilot_length = std::min(K, 2);
  cfg.seed = seed;
  return generate_snapshot(cfg);
}

CMat local_estimates(const ChannelSet& cs, int K, int l) {
  CMat H(cs.h_hat(0, l).size(), K);
  for (int k = 0; k < K; ++k) H.col(k) = cs.h_hat(k, l);
  return H;
}

}  // namespace

TEST_CASE("ZF inverts the local estimate matrix") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const NetworkSnapshot s = generated(4, 3, 4, seed);
    const ChannelSet cs = estimated_channels(s, seed);
    const Grid<double> eta = equal_power_split(s);
    for (int l = 0; l < s.num_aps; ++l) {
      const CMat H = local_estimates(cs, 3, l);
      const CMat V = precoding_matrix(Precoder::ZF, H, s, cs, l, eta);
      // Scale-free check: H^T V = I.
      CHECK((H.transpose() * V - CMat::Identity(3, 3)).norm() < 1e-8);
    }
    const PrecoderSet ps = compute_precoders(Precoder::ZF, cs, s);
    for (int l = 0; l < s.num_aps; ++l)
      for (int k = 0; k < 3; ++k)
        for (int j = 0; j < 3; ++j) {
          const cd v = cs.h_hat(j, l).transpose() * ps.w(k, l);
          if (j != k) CHECK(std::abs(v) < 1e-8 * cs.h_hat(j, l).norm());
        }
  }
}

TEST_CASE("ZF refuses N_a < K and singular Gram matrices") {
  const NetworkSnapshot s = generated(2, 3, 2, 1);
  const ChannelSet cs = estimated_channels(s, 1);
  CHECK_THROWS_AS(compute_precoders(Precoder::ZF, cs, s), UnsupportedConfiguration);

  NetworkSnapshot t = generated(3, 2, 2, 2);
  ChannelSet ct = estimated_channels(t, 2);
  ct.h_hat(1, 2) = 2.0 * ct.h_hat(0, 2);
  try {
    compute_precoders(Precoder::ZF, ct, t);
    FAIL("expected a singular Gram error");
  } catch (const NumericalError& e) {
    CHECK(std::string(e.what()).find("AP 2") != std::string::npos);
  }
}

TEST_CASE("MR single user is the normalized conjugate estimate") {
  const NetworkSnapshot s = generated(3, 1, 4, 3);
  const ChannelSet cs = estimated_channels(s, 3);
  const PrecoderSet ps = compute_precoders(Precoder::MR, cs, s);
  for (int l = 0; l < 3; ++l) {
    const CVec& h = cs.h_hat(0, l);
    CHECK((ps.w(0, l) - h.conjugate() / h.norm()).norm() < 1e-14);
    const cd g = h.transpose() * ps.w(0, l);
    CHECK(g.real() == doctest::Approx(h.norm()).epsilon(1e-12));
    CHECK(std::abs(g.imag()) < 1e-12 * h.norm());
  }
}

TEST_CASE("every scheme is phase aligned with the own estimate") {
  const NetworkSnapshot s = generated(4, 2, 4, 4);
  const ChannelSet cs = estimated_channels(s, 4);
  for (Precoder p : {Precoder::MR, Precoder::ZF, Precoder::RZF, Precoder::MMSE}) {
    const PrecoderSet ps = compute_precoders(p, cs, s);
    for (int l = 0; l < 4; ++l)
      for (int k = 0; k < 2; ++k) {
        const cd g = cs.h_hat(k, l).transpose() * ps.w(k, l);
        if (p == Precoder::MR || p == Precoder::MMSE) {
          // h^T conj(A h) = conj(h^H A h) with A Hermitian positive definite
          CHECK(g.real() >= 0.0);
          CHECK(std::abs(g.imag()) <= 1e-10 * std::abs(g));
        }
        CHECK(ps.w(k, l).norm() == doctest::Approx(1.0).epsilon(1e-10));
      }
  }
}

TEST_CASE("RZF tends to MR at very large regularization") {
  NetworkSnapshot s = generated(3, 3, 4, 5);
  const ChannelSet cs = estimated_channels(s, 5);
  double h_norm2 = 0.0;
  for (int k = 0; k < 3; ++k)
    for (int l = 0; l < 3; ++l) h_norm2 = std::max(h_norm2, local_estimates(cs, 3, l).squaredNorm());
  s.sigma_z2 = 1e6 * h_norm2;
  const PrecoderSet rzf = compute_precoders(Precoder::RZF, cs, s);
  const PrecoderSet mr = compute_precoders(Precoder::MR, cs, s);
  for (int k = 0; k < 3; ++k)
    for (int l = 0; l < 3; ++l) {
      const cd inner = mr.w(k, l).dot(rzf.w(k, l));
      CHECK(std::abs(inner) > 0.999);
      CHECK(inner.real() > 0.999);  // positive scaling, no phase rotation
    }
}

TEST_CASE("precoders depend on estimates only") {
  const NetworkSnapshot s = generated(3, 2, 2, 6);
  const ChannelSet cs = estimated_channels(s, 6);
  ChannelSet perturbed = cs;
  Rng rng(7);
  for (int k = 0; k < 2; ++k)
    for (int l = 0; l < 3; ++l) perturbed.h(k, l) += complex_normal_vector(rng, 2);
  for (Precoder p : {Precoder::MR, Precoder::ZF, Precoder::RZF, Precoder::MMSE}) {
    const PrecoderSet a = compute_precoders(p, cs, s);
    const PrecoderSet b = compute_precoders(p, perturbed, s);
    for (int k = 0; k < 2; ++k)
      for (int l = 0; l < 3; ++l) CHECK(a.w(k, l) == b.w(k, l));
  }
}

TEST_CASE("zero estimate leaves a flagged zero column") {
  const NetworkSnapshot s = generated(2, 2, 2, 8);
  ChannelSet cs = estimated_channels(s, 8);
  cs.h_hat(1, 0).setZero();
  const PrecoderSet ps = compute_precoders(Precoder::MR, cs, s);
  CHECK(ps.any_zero_column);
  CHECK(ps.zero_column(1, 0) == 1);
  CHECK(ps.w(1, 0).norm() == 0.0);
  CHECK(ps.zero_column(0, 0) == 0);
}

TEST_CASE("MMSE equal-power split uses the effective budget") {
  const NetworkSnapshot s = generated(3, 4, 2, 9);
  const Grid<double> eta = equal_power_split(s);
  for (int l = 0; l < 3; ++l) {
    const double b = 1.0 / (std::norm(s.alpha[l]) + 2.0 * s.beta[l]);
    for (int k = 0; k < 4; ++k) CHECK(eta(k, l) == doctest::Approx(b / 4.0).epsilon(1e-14));
  }
}

TEST_CASE("precoder names parse case-insensitively") {
  CHECK(parse_precoder("MR") == Precoder::MR);
  CHECK(parse_precoder("rzf") == Precoder::RZF);
  CHECK(parse_precoder("Mmse") == Precoder::MMSE);
  CHECK(to_string(Precoder::ZF) == "zf");
  CHECK_THROWS_AS(parse_precoder("dft"), ConfigError);
}
