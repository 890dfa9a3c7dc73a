#include "cfmimo/config.hpp"
#include "cfmimo/network.hpp"
#include "cfmimo/rng.hpp"
#include "doctest.h"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <map>
#include <set>

using namespace cfmimo;

TEST_CASE("noise power for 5 MHz and 9 dB noise figure") {
  // -174 dBm/Hz + 66.99 dB + 9 dB = -98.01 dBm.
  const double dbm = -174.0 + 10.0 * std::log10(5e6) + 9.0;
  const double expected = 1e-3 * std::pow(10.0, dbm / 10.0);
  CHECK(noise_power_w(5e6, 9.0) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(noise_power_w(5e6, 9.0) == doctest::Approx(1.58e-13).epsilon(0.01));

  SimConfig cfg;
  CHECK(generate_snapshot(cfg).sigma_z2 == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("round-robin pilots for K=4, tau_p=2") {
  SimConfig cfg;
  cfg.num_users = 4;
  cfg.pilot_length = 2;
  const NetworkSnapshot s = generate_snapshot(cfg);
  CHECK(s.pilot_of == std::vector<int>{0, 1, 0, 1});
  const PilotGroups g = pilot_groups(s);
  CHECK(g.members[0] == std::vector<int>{0, 2});
  CHECK(g.members[1] == std::vector<int>{1, 3});
  CHECK(g.members[2] == std::vector<int>{0, 2});
  CHECK(g.members[3] == std::vector<int>{1, 3});
}

TEST_CASE("pilot sharing is balanced for every K and tau_p") {
  for (int K = 1; K <= 9; ++K)
    for (int tp = 1; tp <= K; ++tp) {
      SimConfig cfg;
      cfg.num_aps = 2;
      cfg.num_users = K;
      cfg.pilot_length = tp;
      const NetworkSnapshot s = generate_snapshot(cfg);
      std::vector<int> count(tp, 0);
      for (int p : s.pilot_of) ++count[p];
      for (int c : count) {
        CHECK(c >= K / tp);
        CHECK(c <= (K + tp - 1) / tp);
      }
    }
}

TEST_CASE("single user forms a singleton group") {
  SimConfig cfg;
  cfg.num_users = 1;
  cfg.pilot_length = 1;
  const PilotGroups g = pilot_groups(generate_snapshot(cfg));
  REQUIRE(g.members.size() == 1);
  CHECK(g.members[0] == std::vector<int>{0});
}

TEST_CASE("random pilot maps match brute-force grouping") {
  SimConfig cfg;
  cfg.num_aps = 2;
  cfg.num_users = 6;
  cfg.pilot_length = 3;
  NetworkSnapshot s = generate_snapshot(cfg);
  Rng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    for (int& p : s.pilot_of) p = static_cast<int>(rng() % 3);
    std::map<int, std::set<int>> by_pilot;
    for (int k = 0; k < 6; ++k) by_pilot[s.pilot_of[k]].insert(k);
    const PilotGroups g = pilot_groups(s);
    for (int k = 0; k < 6; ++k) {
      const std::set<int> got(g.members[k].begin(), g.members[k].end());
      CHECK(got == by_pilot[s.pilot_of[k]]);
      CHECK(got.count(k) == 1);
      for (int j : got) CHECK(std::count(g.members[j].begin(), g.members[j].end(), k) == 1);
    }
  }
}

TEST_CASE("amplifier parameters follow the stated distributions") {
  SimConfig cfg;
  double re_sum = 0.0, im_sum = 0.0, im_sq = 0.0;
  int n = 0;
  double beta_min = 1.0, beta_max = 0.0;
  for (std::uint64_t seed = 1; n < 10000; ++seed) {
    cfg.seed = seed;
    const NetworkSnapshot s = generate_snapshot(cfg);
    REQUIRE(s.alpha.size() == 32);
    for (int l = 0; l < s.num_aps; ++l) {
      re_sum += s.alpha[l].real();
      im_sum += s.alpha[l].imag();
      im_sq += s.alpha[l].imag() * s.alpha[l].imag();
      beta_min = std::min(beta_min, s.beta[l]);
      beta_max = std::max(beta_max, s.beta[l]);
      ++n;
    }
  }
  CHECK(re_sum / n == doctest::Approx(0.8).epsilon(0.0125));
  CHECK(std::abs(im_sum / n) < 0.005);
  CHECK(std::sqrt(im_sq / n) == doctest::Approx(0.1).epsilon(0.05));
  CHECK(beta_min >= 0.05);
  CHECK(beta_max <= 0.15);
  CHECK(beta_max - beta_min > 0.09);
}

TEST_CASE("correlation matrices are Hermitian PSD with path-loss scale") {
  SimConfig cfg;
  cfg.seed = 3;
  const NetworkSnapshot s = generate_snapshot(cfg);
  for (int k = 0; k < s.num_users; ++k)
    for (int l = 0; l < s.num_aps; ++l) {
      const CMat& R = s.R(k, l);
      const double tr = R.trace().real();
      CHECK(tr > 0.0);
      CHECK((R - R.adjoint()).norm() <= 1e-14 * tr);
      Eigen::SelfAdjointEigenSolver<CMat> es(R);
      CHECK(es.eigenvalues().minCoeff() >= -1e-10 * tr);
      // unit-diagonal shape: every diagonal entry equals tr / N_a
      for (int i = 0; i < s.antennas_per_ap; ++i)
        CHECK(R(i, i).real() == doctest::Approx(tr / s.antennas_per_ap).epsilon(1e-12));
      const double d = std::max(distance(s.user_positions[k], s.ap_positions[l]), 1.0);
      const double db = 10.0 * std::log10(R(0, 0).real()) + 30.5 + 36.7 * std::log10(d);
      CHECK(std::abs(db) < 30.0);  // shadowing within 7.5 standard deviations
    }
}

TEST_CASE("local scattering correlation has unit diagonal and the closed form") {
  const double phi = 0.3, sd = 30.0 * M_PI / 180.0;
  const CMat R = local_scattering_correlation(4, phi, sd);
  for (int m = 0; m < 4; ++m)
    for (int n = 0; n < 4; ++n) {
      const double dist = n - m;
      const cd expected = std::exp(cd(0.0, M_PI * dist * std::sin(phi))) *
                          std::exp(-0.5 * std::pow(sd * M_PI * dist * std::cos(phi), 2));
      CHECK(std::abs(R(m, n) - expected) < 1e-14);
    }
}

TEST_CASE("positions lie in the coverage disk and path loss is floored at 1 m") {
  SimConfig cfg;
  cfg.coverage_radius_m = 250.0;
  const NetworkSnapshot s = generate_snapshot(cfg);
  for (const Point& p : s.ap_positions) CHECK(std::hypot(p.x, p.y) <= 250.0);
  for (const Point& p : s.user_positions) CHECK(std::hypot(p.x, p.y) <= 250.0);
  CHECK(large_scale_gain(0.01, 0.0) == large_scale_gain(1.0, 0.0));
  CHECK(large_scale_gain(10.0, 0.0) == doctest::Approx(std::pow(10.0, (-30.5 - 36.7) / 10.0)));
}

TEST_CASE("same seed gives a bit-identical snapshot") {
  SimConfig cfg;
  cfg.seed = 42;
  const NetworkSnapshot a = generate_snapshot(cfg);
  const NetworkSnapshot b = generate_snapshot(cfg);
  CHECK(a.hash() == b.hash());
  for (int k = 0; k < a.num_users; ++k)
    for (int l = 0; l < a.num_aps; ++l) CHECK(a.R(k, l) == b.R(k, l));
  cfg.seed = 43;
  CHECK(generate_snapshot(cfg).hash() != a.hash());
}

TEST_CASE("ideal copy replaces only the amplifier") {
  SimConfig cfg;
  const NetworkSnapshot s = generate_snapshot(cfg);
  const NetworkSnapshot ideal = s.with_ideal_pa();
  for (int l = 0; l < s.num_aps; ++l) {
    CHECK(ideal.alpha[l] == cd(1.0, 0.0));
    CHECK(ideal.beta[l] == 0.0);
  }
  CHECK(ideal.R(0, 0) == s.R(0, 0));
  CHECK(ideal.hash() != s.hash());
}

TEST_CASE("configuration validation and JSON round trip") {
  SimConfig cfg;
  cfg.num_aps = 8;
  cfg.seed = 99;
  const SimConfig back = config_from_json(config_to_json(cfg));
  CHECK(back.num_aps == 8);
  CHECK(back.seed == 99);
  CHECK(config_hash(back) == config_hash(cfg));
  cfg.num_aps = 9;
  CHECK(config_hash(back) != config_hash(cfg));

  CHECK_THROWS_AS(config_from_json(R"({"L": 0})"), ConfigError);
  CHECK_THROWS_AS(config_from_json(R"({"tau_p": 300, "tau_c": 200})"), ConfigError);
  CHECK_THROWS_AS(config_from_json(R"({"unknown": 1})"), ConfigError);
  CHECK_THROWS_AS(config_from_json(R"({"L": "eight"})"), ConfigError);
  CHECK_THROWS_AS(config_from_json("not json"), ConfigError);
  CHECK(config_from_json("{}").num_aps == 32);
}
