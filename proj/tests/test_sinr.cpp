#include "cfmimo/sinr.hpp"
#include "doctest.h"
#include "test_support.hpp"

#include <random>

using namespace cfmimo;

namespace {

// Second evaluator: the denominator is assembled as total received power of
// every served link minus the coherent part of the own signal.
double gamma_reference(const NetworkSnapshot& s, const MomentTable& m, const Grid<char>& U,
                       const Grid<double>& eta, int k) {
  const int K = s.num_users, L = s.num_aps;
  cd a(0.0, 0.0);
  double total = 0.0, coherent = 0.0, distortion = 0.0;
  for (int l = 0; l < L; ++l) {
    double load = 0.0;
    for (int kp = 0; kp < K; ++kp) load += U(kp, l) ? eta(kp, l) : 0.0;
    distortion += s.beta[l] * load * m.trR(k, l);
    if (U(k, l)) {
      a += s.alpha[l] * std::sqrt(eta(k, l)) * m.mean_gain(k, l);
      coherent += std::norm(s.alpha[l]) * eta(k, l) * std::norm(m.mean_gain(k, l));
    }
  }
  for (int kp = 0; kp < K; ++kp)
    for (int l = 0; l < L; ++l)
      if (U(kp, l)) total += std::norm(s.alpha[l]) * eta(kp, l) * m.second_moment(k, kp, l);
  return std::norm(a) / (s.sigma_z2 / s.ap_power_w + total - coherent + distortion);
}

Grid<char> random_association(Rng& rng, int K, int L) {
  Grid<char> U(K, L);
  for (char& u : U.raw()) u = static_cast<char>(rng() % 2);
  return U;
}

Grid<double> random_powers(Rng& rng, const NetworkSnapshot& s) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Grid<double> eta(s.num_users, s.num_aps);
  for (double& e : eta.raw()) e = u(rng) / s.num_users;
  return eta;
}

}  // namespace

TEST_CASE("single hardened link reduces to p_a eta |h|^2 / sigma^2") {
  const NetworkSnapshot s = testing::manual_snapshot(1, 1, 2);
  Grid<double> g(1, 1, 3e-6);
  const MomentTable m = testing::deterministic_moments(g);
  Grid<double> eta(1, 1, 0.7);
  const auto out = sinr_of(s, m, Grid<char>(1, 1, 1), eta);
  CHECK(out[0].uncertainty == 0.0);
  CHECK(out[0].interference == 0.0);
  CHECK(out[0].distortion == 0.0);
  const double expected = s.ap_power_w * 0.7 * 9e-12 / s.sigma_z2;
  CHECK(out[0].gamma == doctest::Approx(expected).epsilon(1e-12));
  CHECK(out[0].se == doctest::Approx(std::log2(1.0 + expected)).epsilon(1e-12));
}

TEST_CASE("zero power gives zero SINR") {
  const testing::Instance inst = testing::random_instance(1, 3, 2);
  const auto out = sinr_of(inst.snapshot, inst.moments, Grid<char>(2, 3, 1), Grid<double>(2, 3, 0.0));
  for (const auto& b : out) {
    CHECK(b.gamma == 0.0);
    CHECK(b.se == 0.0);
  }
}

TEST_CASE("closed form agrees with an independently written evaluator") {
  Rng rng(2);
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const int L = 2 + static_cast<int>(seed % 3), K = 2 + static_cast<int>(seed % 2);
    const testing::Instance inst = testing::random_instance(seed, L, K);
    const Grid<char> U = random_association(rng, K, L);
    const Grid<double> eta = random_powers(rng, inst.snapshot);
    const auto out = sinr_of(inst.snapshot, inst.moments, U, eta);
    for (int k = 0; k < K; ++k) {
      const double ref = gamma_reference(inst.snapshot, inst.moments, U, eta, k);
      CHECK(std::abs(out[k].gamma - ref) <= 1e-12 * std::max(ref, 1e-300));
      CHECK(out[k].signal >= 0.0);
      CHECK(out[k].uncertainty >= -1e-12 * out[k].interference - 1e-30);
      CHECK(out[k].interference >= 0.0);
      CHECK(out[k].distortion >= 0.0);
      const double denom = out[k].noise + out[k].uncertainty + out[k].interference + out[k].distortion;
      CHECK(out[k].gamma == doctest::Approx(out[k].signal / denom).epsilon(1e-14));
    }
  }
}

TEST_CASE("ideal amplifier has no distortion term") {
  const testing::Instance inst = testing::random_instance(3, 4, 2);
  const NetworkSnapshot ideal = inst.snapshot.with_ideal_pa();
  Rng rng(3);
  const Grid<double> eta = random_powers(rng, ideal);
  const auto out = sinr_of(ideal, inst.moments, Grid<char>(2, 4, 1), eta);
  for (const auto& b : out) CHECK(b.distortion == 0.0);
}

TEST_CASE("distortion and interference scale linearly with the load") {
  const testing::Instance inst = testing::random_instance(4, 3, 3);
  Rng rng(4);
  const Grid<char> U(3, 3, 1);
  const Grid<double> eta = random_powers(rng, inst.snapshot);
  const auto full = sinr_of(inst.snapshot, inst.moments, U, eta);
  for (double t : {0.1, 0.5, 0.9}) {
    Grid<double> scaled = eta;
    for (double& e : scaled.raw()) e *= t;
    const auto out = sinr_of(inst.snapshot, inst.moments, U, scaled);
    for (int k = 0; k < 3; ++k) {
      CHECK(out[k].distortion <= t * full[k].distortion * (1.0 + 1e-12));
      CHECK(out[k].interference <= t * full[k].interference * (1.0 + 1e-12));
    }
  }
}

TEST_CASE("single user without distortion: SINR grows with uniform power scaling") {
  const testing::Instance inst = testing::random_instance(5, 3, 1);
  const NetworkSnapshot ideal = inst.snapshot.with_ideal_pa();
  const Grid<char> U(1, 3, 1);
  double previous = 0.0;
  for (double t : {0.01, 0.1, 0.3, 0.6, 1.0}) {
    const auto out = sinr_of(ideal, inst.moments, U, Grid<double>(1, 3, t));
    CHECK(out[0].gamma >= previous);
    previous = out[0].gamma;
  }
}

TEST_CASE("link simulation: zero amplifier gain gives zero SINR") {
  NetworkSnapshot s = testing::random_instance(6, 3, 2).snapshot;
  std::fill(s.alpha.begin(), s.alpha.end(), cd(0.0, 0.0));
  const Grid<char> U(2, 3, 1);
  const Grid<double> eta(2, 3, 0.5);
  const auto measured = empirical_sinr_validation(s, Precoder::MR, U, eta, 200, 7);
  const MomentTable m = estimate_moments(s, Precoder::MR, 50, 8);
  const auto analytic = sinr_of(s, m, U, eta);
  for (int k = 0; k < 2; ++k) {
    CHECK(measured[k].sinr == 0.0);
    CHECK(analytic[k].gamma == 0.0);
  }
}

TEST_CASE("link simulation: distortion power and term correlations") {
  NetworkSnapshot s = testing::manual_snapshot(2, 2, 4, 1e-10, 2);
  s.beta = {0.1, 0.07};
  s.alpha = {cd(0.8, 0.05), cd(0.8, -0.1)};
  s.sigma_z2 = 1e-12;
  const Grid<char> U(2, 2, 1);
  Grid<double> eta(2, 2, 0.0);
  eta(0, 0) = 0.6;
  eta(0, 1) = 0.4;  // only user 0 carries power
  const auto measured = empirical_sinr_validation(s, Precoder::MR, U, eta, 20000, 9);
  for (int k = 0; k < 2; ++k) {
    double expected = 0.0;
    for (int l = 0; l < 2; ++l) {
      const double load = eta(0, l) + eta(1, l);
      expected += s.beta[l] * s.ap_power_w * load * s.R(k, l).trace().real();
    }
    CHECK(measured[k].distortion_power == doctest::Approx(expected).epsilon(0.05));
  }
  // with every user powered the three impairments are mutually uncorrelated
  const Grid<double> all(2, 2, 0.5);
  const auto m2 = empirical_sinr_validation(s, Precoder::MR, U, all, 20000, 10);
  for (const auto& m : m2) {
    CHECK(m.corr_12 < 0.03);
    CHECK(m.corr_13 < 0.03);
    CHECK(m.corr_23 < 0.03);
  }
}
