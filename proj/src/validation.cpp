#include "cfmimo/validation.hpp"

#include "cfmimo/channel.hpp"
#include "cfmimo/harness.hpp"
#include "cfmimo/moments.hpp"
#include "cfmimo/optimizer.hpp"
#include "cfmimo/rng.hpp"
#include "cfmimo/sinr.hpp"
#include "cfmimo/socp.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <sstream>

namespace cfmimo {

namespace {

class Suite {
 public:
  void check(const std::string& name, const std::function<std::string()>& body) {
    PropertyCheck c{name, false, ""};
    try {
      c.detail = body();
      c.passed = c.detail.empty();
    } catch (const std::exception& e) {
      c.detail = std::string("exception: ") + e.what();
    }
    results_.push_back(std::move(c));
  }
  std::vector<PropertyCheck> take() { return std::move(results_); }

 private:
  std::vector<PropertyCheck> results_;
};

std::string fail_if(bool bad, const std::string& what) { return bad ? what : std::string(); }

SimConfig small_config(const SimConfig& cfg, int L, int K, std::uint64_t seed) {
  SimConfig c = cfg;
  c.num_aps = L;
  c.num_users = K;
  c.pilot_length = std::min(cfg.pilot_length, K);
  c.seed = seed;
  return c;
}

double min_gamma(const std::vector<SinrBreakdown>& s, const std::vector<char>& mask) {
  double g = std::numeric_limits<double>::infinity();
  for (size_t k = 0; k < s.size(); ++k)
    if (mask.empty() || mask[k]) g = std::min(g, s[k].gamma);
  return g;
}

std::vector<char> served_users(const Allocation& a) {
  std::vector<char> mask(a.U.rows(), 0);
  for (int k = 0; k < a.U.rows(); ++k)
    for (int l = 0; l < a.U.cols(); ++l) mask[k] = mask[k] || a.U(k, l);
  return mask;
}

}  // namespace

std::vector<PropertyCheck> run_property_suite(const SimConfig& cfg, const ValidationOptions& options) {
  cfg.validate();
  Suite suite;

  suite.check("socp: norm of (3,4) is 5", [] {
    socp::ConeProgram p;
    const int t = p.add_variable(-socp::kInf, socp::kInf, 1.0);
    p.soc_blocks.push_back({{socp::AffineExpr{{{t, 1.0}}, 0.0}, socp::AffineExpr{{}, 3.0},
                             socp::AffineExpr{{}, 4.0}}});
    const auto r = socp::solve(p);
    std::ostringstream msg;
    if (r.status != socp::SolveStatus::Optimal || std::abs(r.x(0) - 5.0) > 1e-6)
      msg << "status " << to_string(r.status) << ", x0 = " << (r.x.size() ? r.x(0) : NAN);
    return msg.str();
  });

  suite.check("socp: empty cone slice is infeasible", [] {
    socp::ConeProgram p;
    const int x0 = p.add_variable(-socp::kInf, -1.0);
    const int x1 = p.add_variable();
    p.soc_blocks.push_back({{socp::AffineExpr{{{x0, 1.0}}, 0.0}, socp::AffineExpr{{{x1, 1.0}}, 0.0}}});
    const auto r = socp::solve(p);
    return fail_if(r.status != socp::SolveStatus::Infeasible, "status " + to_string(r.status));
  });

  suite.check("precoding: ZF inverts the estimate, MR is phase aligned", [&] {
    SimConfig c = small_config(cfg, 2, 2, cfg.seed);
    c.antennas_per_ap = std::max(cfg.antennas_per_ap, 2);
    const NetworkSnapshot snap = generate_snapshot(c);
    const auto ch = mmse_estimate(snap, pilot_groups(snap), draw_channels(snap, 1, c.seed)[0].h, c.seed);
    const Grid<double> eta = equal_power_split(snap);
    CMat H(snap.antennas_per_ap, snap.num_users);
    for (int k = 0; k < snap.num_users; ++k) H.col(k) = ch.h_hat(k, 0);
    const CMat V = precoding_matrix(Precoder::ZF, H, snap, ch, 0, eta);
    const double zf_err = (H.transpose() * V - CMat::Identity(snap.num_users, snap.num_users)).norm();
    const PrecoderSet mr = compute_precoders(Precoder::MR, ch, snap);
    const cd g = ch.h_hat(0, 0).transpose() * mr.w(0, 0);
    std::ostringstream msg;
    if (zf_err > 1e-8) msg << "ZF residual " << zf_err << "; ";
    if (std::abs(g.imag()) > 1e-12 * std::abs(g) || g.real() < 0.0) msg << "MR gain " << g;
    return msg.str();
  });

  suite.check("sinr: zero power gives zero SINR, ideal amplifier has no distortion", [&] {
    const NetworkSnapshot snap = generate_snapshot(small_config(cfg, 3, 2, cfg.seed));
    const MomentTable m = estimate_moments(snap, Precoder::MR, options.moment_samples, cfg.seed);
    const Grid<char> U(2, 3, 1);
    for (const auto& b : sinr_of(snap, m, U, Grid<double>(2, 3, 0.0)))
      if (b.gamma != 0.0 || b.se != 0.0) return std::string("nonzero SINR without power");
    const NetworkSnapshot ideal = snap.with_ideal_pa();
    for (const auto& b : sinr_of(ideal, m, U, equal_power_split(ideal)))
      if (b.distortion != 0.0) return std::string("distortion with ideal amplifier");
    return std::string();
  });

  suite.check("optimizer: certified allocations on random instances", [&] {
    std::ostringstream msg;
    OptimizerOptions opt;
    int evaluated = 0;
    for (int i = 0; evaluated < options.instances && i < 4 * options.instances; ++i) {
      const std::uint64_t seed = derive_seed(cfg.seed, streams::kSnapshot, 1000 + i);
      const NetworkSnapshot snap = generate_snapshot(small_config(cfg, 3, 2, seed));
      const MomentTable m = estimate_moments(snap, Precoder::MR, options.moment_samples, seed);
      Allocation mm, joint;
      try {
        mm = maxmin_cf(snap, m, opt);
        joint = jup(snap, m, opt);
      } catch (const UnreachableUser&) {
        continue;  // no AP with a positive mean gain for some user
      }
      ++evaluated;
      const Allocation epa = epa_cf(snap, m);
      std::optional<Allocation> lo;
      try {
        lo = jup_lo(snap, m, opt);
      } catch (const UnreachableUser&) {
      }
      const auto budget = ap_budgets(snap);
      std::vector<const Allocation*> all{&epa, &mm, &joint};
      if (lo) all.push_back(&*lo);
      for (const Allocation* a : all) {
        for (int l = 0; l < snap.num_aps; ++l) {
          double load = 0.0;
          for (int k = 0; k < snap.num_users; ++k) load += a->U(k, l) ? a->eta(k, l) : 0.0;
          if (load > budget[l] + 1e-9) msg << "instance " << i << " " << to_string(a->method) << ": budget; ";
        }
        if (a->method == Method::EPA_CF || a->gamma_t <= 0.0) continue;
        const double g = min_gamma(sinr_of(snap, m, a->U, a->eta), served_users(*a));
        if (g < a->gamma_t - 1e-6 * (1.0 + a->gamma_t))
          msg << "instance " << i << " " << to_string(a->method) << ": realized SINR below target; ";
        if (a->trace.bound_violations) msg << "instance " << i << ": conservative bound violated; ";
        if (a->trace.max_tightness_gap > 1e-6) msg << "instance " << i << ": loose relaxation; ";
      }
      // EPA is a feasible point of the conservative problem at its own conservative value.
      double epa_conservative = std::numeric_limits<double>::infinity();
      for (int k = 0; k < snap.num_users; ++k) {
        const ConstraintTerms t = constraint_terms(snap, m, epa.U, epa.nu, k);
        const double re = std::max(0.0, t.A.real());
        epa_conservative = std::min(epa_conservative, t.B > 0.0 ? re * re / t.B : 0.0);
      }
      const double tol = opt.epsilon;
      if (mm.gamma_t < epa_conservative - tol) msg << "instance " << i << ": max-min below EPA; ";
      if (joint.gamma_t < mm.gamma_t - tol) msg << "instance " << i << ": joint below max-min; ";
      if (lo && joint.gamma_t < lo->gamma_t - tol) msg << "instance " << i << ": joint below two-stage; ";
    }
    if (evaluated < options.instances) msg << "only " << evaluated << " instances with reachable users";
    return msg.str();
  });

  suite.check("harness: 5th percentile convention", [] {
    std::vector<double> v(100);
    for (int i = 0; i < 100; ++i) v[i] = i + 1;
    return fail_if(likely95(v) != 5.0, "percentile of 1..100 is not 5");
  });

  return suite.take();
}

}  // namespace cfmimo
