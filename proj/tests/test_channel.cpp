#include "cfmimo/channel.hpp"
#include "cfmimo/rng.hpp"
#include "doctest.h"
#include "test_support.hpp"

using namespace cfmimo;

namespace {

struct CovarianceAccumulator {
  CMat sum;
  int n = 0;
  explicit CovarianceAccumulator(int d) : sum(CMat::Zero(d, d)) {}
  void add(const CVec& a, const CVec& b) {
    sum += a * b.adjoint();
    ++n;
  }
  CMat mean() const { return sum / static_cast<double>(n); }
};

double relative_error(const CMat& emp, const CMat& ref) { return (emp - ref).norm() / ref.norm(); }

}  // namespace

TEST_CASE("identity correlation gives unit sample covariance") {
  const NetworkSnapshot s = testing::manual_snapshot(1, 1, 2);
  const ChannelSampler sampler(s);
  Rng rng(1);
  CovarianceAccumulator acc(2);
  for (int r = 0; r < 100000; ++r) {
    const CVec h = sampler.draw(rng)(0, 0);
    acc.add(h, h);
  }
  CHECK((acc.mean() - CMat::Identity(2, 2)).norm() < 0.02);
}

TEST_CASE("zero correlation gives zero channels") {
  NetworkSnapshot s = testing::manual_snapshot(1, 1, 3);
  s.R(0, 0).setZero();
  const ChannelSampler sampler(s);
  Rng rng(2);
  for (int r = 0; r < 10; ++r) CHECK(sampler.draw(rng)(0, 0).norm() == 0.0);
}

TEST_CASE("rank-one correlation draws multiples of the eigenvector") {
  NetworkSnapshot s = testing::manual_snapshot(1, 1, 3);
  CVec v(3);
  v << cd(1.0, 0.5), cd(-0.3, 0.2), cd(0.0, 1.0);
  s.R(0, 0) = v * v.adjoint();
  const ChannelSampler sampler(s);
  Rng rng(3);
  for (int r = 0; r < 20; ++r) {
    const CVec h = sampler.draw(rng)(0, 0);
    const cd c = v.dot(h) / v.squaredNorm();  // v^H h / ||v||^2
    CHECK((h - c * v).norm() <= 1e-10 * (1.0 + h.norm()));
  }
}

TEST_CASE("psd_sqrt squares back and rejects indefinite input") {
  CMat A(2, 2);
  A << 2.0, cd(0.0, 1.0), cd(0.0, -1.0), 2.0;
  const CMat S = psd_sqrt(A);
  CHECK((S * S - A).norm() < 1e-12);
  CMat bad(2, 2);
  bad << 1.0, 0.0, 0.0, -1.0;
  CHECK_THROWS_AS(psd_sqrt(bad), NumericalError);
}

TEST_CASE("scalar shrinkage: p_u tau_p = sigma^2 halves the covariance") {
  NetworkSnapshot s = testing::manual_snapshot(1, 1, 2, 1.0, 1);
  s.sigma_z2 = s.user_power_w * s.pilot_length;
  const PilotGroups g = pilot_groups(s);
  const auto stats = estimator_statistics(s, g);
  const CMat expected = 0.5 * CMat::Identity(2, 2);
  CHECK((stats->filter(0, 0) - expected).norm() < 1e-14);
  CHECK((stats->Theta(0, 0) - expected).norm() < 1e-14);

  const ChannelSampler sampler(s);
  Rng ch(4), noise(5);
  CovarianceAccumulator acc(2);
  for (int r = 0; r < 100000; ++r) {
    const ChannelSet cs = mmse_estimate(s, g, stats, sampler.draw(ch), noise);
    acc.add(cs.h_hat(0, 0), cs.h_hat(0, 0));
  }
  CHECK(relative_error(acc.mean(), expected) < 0.02);
}

TEST_CASE("no-information limit: error covariance tends to R") {
  NetworkSnapshot s = testing::manual_snapshot(1, 1, 2, 1e-9);
  s.R(0, 0)(0, 1) = cd(0.3e-9, 0.1e-9);
  s.R(0, 0)(1, 0) = std::conj(s.R(0, 0)(0, 1));
  s.sigma_z2 = 1e6;
  const auto stats = estimator_statistics(s, pilot_groups(s));
  CHECK(relative_error(stats->Theta(0, 0), s.R(0, 0)) < 1e-12);
}

TEST_CASE("pilot-sharing users: estimate covariance matches R Gamma^-1 R") {
  // Two users on one pilot with equal R.
  NetworkSnapshot s = testing::manual_snapshot(1, 2, 2, 1e-12, 1);
  CMat R(2, 2);
  R << 1.0, cd(0.4, 0.2), cd(0.4, -0.2), 0.8;
  R *= 1e-12;
  s.R(0, 0) = R;
  s.R(1, 0) = R;
  const PilotGroups g = pilot_groups(s);
  REQUIRE(g.members[0].size() == 2);
  const double c = s.user_power_w * s.pilot_length;
  const CMat Gamma = 2.0 * c * R + s.sigma_z2 * CMat::Identity(2, 2);
  const CMat expected = c * R * Gamma.inverse() * R;

  const auto stats = estimator_statistics(s, g);
  CHECK(relative_error(stats->Gamma(0, 0), Gamma) < 1e-12);
  CHECK(relative_error(stats->Theta(0, 0), R - expected) < 1e-10);

  const ChannelSampler sampler(s);
  Rng ch(6), noise(7);
  CovarianceAccumulator acc0(2), acc1(2), cross(2), orth(2);
  for (int r = 0; r < 100000; ++r) {
    const ChannelSet cs = mmse_estimate(s, g, stats, sampler.draw(ch), noise);
    acc0.add(cs.h_hat(0, 0), cs.h_hat(0, 0));
    acc1.add(cs.h_hat(1, 0), cs.h_hat(1, 0));
    cross.add(cs.h_hat(0, 0), cs.h_hat(1, 0));
    orth.add(cs.h_hat(0, 0), cs.h(0, 0) - cs.h_hat(0, 0));
  }
  CHECK(relative_error(acc0.mean(), expected) < 0.02);
  CHECK(relative_error(acc1.mean(), expected) < 0.02);
  // Same despread observation: the two estimates are fully correlated.
  CHECK(relative_error(cross.mean(), expected) < 0.02);
  CHECK(orth.mean().norm() < 0.03 * R.norm());
}

TEST_CASE("estimation error invariants on generated snapshots") {
  SimConfig cfg;
  cfg.num_aps = 6;
  cfg.num_users = 4;
  cfg.pilot_length = 2;
  cfg.seed = 8;
  const NetworkSnapshot s = generate_snapshot(cfg);
  const PilotGroups g = pilot_groups(s);
  const auto sets = draw_channels(s, 3, 9);
  for (int r = 0; r < 3; ++r) {
    const ChannelSet cs = mmse_estimate(s, g, sets[r].h, derive_seed(9, streams::kPilotNoise, r));
    for (int k = 0; k < s.num_users; ++k)
      for (int l = 0; l < s.num_aps; ++l) {
        const CMat& Th = cs.Theta(k, l);
        const double trR = s.R(k, l).trace().real();
        CHECK(Th.trace().real() <= trR * (1.0 + 1e-12));
        CHECK((Th - Th.adjoint()).norm() <= 1e-12 * trR);
        Eigen::SelfAdjointEigenSolver<CMat> es(Th);
        CHECK(es.eigenvalues().minCoeff() >= -1e-10 * trR);
        const CMat formula = s.R(k, l) - s.user_power_w * s.pilot_length * s.R(k, l) *
                                             cs.Gamma(k, l).inverse() * s.R(k, l);
        CHECK((Th - formula).norm() <= 1e-8 * trR);
      }
  }
}

TEST_CASE("realizations are reproducible from the seed") {
  const NetworkSnapshot s = testing::manual_snapshot(2, 2, 2);
  const auto a = draw_channels(s, 4, 11);
  const auto b = draw_channels(s, 4, 11);
  const auto c = draw_channels(s, 4, 12);
  for (int r = 0; r < 4; ++r) {
    CHECK(a[r].h(1, 1) == b[r].h(1, 1));
    CHECK(a[r].h(1, 1) != c[r].h(1, 1));
  }
  CHECK(a[0].h(0, 0) != a[1].h(0, 0));
}
