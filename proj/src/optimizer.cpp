#include "cfmimo/optimizer.hpp"

#include "cfmimo/pa_model.hpp"
#include "cfmimo/sinr.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace cfmimo {

std::string to_string(Method m) {
  switch (m) {
    case Method::JUP: return "jup";
    case Method::JUP_LO: return "jup-lo";
    case Method::MAXMIN_CF: return "maxmin";
    case Method::EPA_CF: return "epa";
    case Method::UC_NEAREST: return "uc";
    case Method::IDEAL_REFERENCE: return "ideal";
  }
  return "?";
}

std::vector<double> ap_budgets(const NetworkSnapshot& snapshot) {
  std::vector<double> b(snapshot.num_aps);
  for (int l = 0; l < snapshot.num_aps; ++l)
    b[l] = pa::effective_budget(snapshot.alpha[l], snapshot.beta[l], snapshot.antennas_per_ap);
  return b;
}

namespace {

constexpr double kCertifyTol = 1e-8;
constexpr double kIntegralityTol = 1e-6;

/// Coefficients of the constraint rows, normalized by the noise floor sigma^2/p_a.
struct Coefficients {
  int K = 0;
  int L = 0;
  double scale2 = 0.0;      // p_a / sigma^2
  Grid<double> a;           // Re(alpha_l E[h_kl^T w_kl]) * sqrt(scale2)
  std::vector<double> c;    // sqrt(scale2 (|alpha_l|^2 S(k,k',l) + beta_l trR_kl))
  std::vector<double> budget;

  double coef(int k, int kp, int l) const { return c[(static_cast<size_t>(k) * K + kp) * L + l]; }
};

Coefficients coefficients(const NetworkSnapshot& snapshot, const MomentTable& m) {
  Coefficients co;
  co.K = snapshot.num_users;
  co.L = snapshot.num_aps;
  co.scale2 = snapshot.ap_power_w / snapshot.sigma_z2;
  const double s = std::sqrt(co.scale2);
  co.a = Grid<double>(co.K, co.L);
  co.c.resize(static_cast<size_t>(co.K) * co.K * co.L);
  co.budget = ap_budgets(snapshot);
  for (int k = 0; k < co.K; ++k)
    for (int l = 0; l < co.L; ++l) {
      co.a(k, l) = std::real(snapshot.alpha[l] * m.mean_gain(k, l)) * s;
      const double a2 = std::norm(snapshot.alpha[l]);
      for (int kp = 0; kp < co.K; ++kp)
        co.c[(static_cast<size_t>(k) * co.K + kp) * co.L + l] =
            std::sqrt(co.scale2 * (a2 * m.second_moment(k, kp, l) + snapshot.beta[l] * m.trR(k, l)));
    }
  return co;
}

std::vector<char> active_users(const Grid<char>& U) {
  std::vector<char> active(U.rows(), 0);
  for (int k = 0; k < U.rows(); ++k)
    for (int l = 0; l < U.cols(); ++l)
      if (U(k, l)) active[k] = 1;
  return active;
}

Grid<char> all_ones(int K, int L) { return Grid<char>(K, L, 1); }

/// Clean-up before certification: clip nu at 0, restore eta >= nu^2 and pull
/// any AP back inside its budget by a common scale.
void repair(const std::vector<double>& budget, const Grid<char>& U, Grid<double>& nu, Grid<double>& eta) {
  const int K = U.rows();
  const int L = U.cols();
  for (int k = 0; k < K; ++k)
    for (int l = 0; l < L; ++l) {
      if (!U(k, l)) {
        nu(k, l) = 0.0;
        eta(k, l) = 0.0;
        continue;
      }
      nu(k, l) = std::max(nu(k, l), 0.0);
      eta(k, l) = std::max(eta(k, l), nu(k, l) * nu(k, l));
    }
  for (int l = 0; l < L; ++l) {
    double load = 0.0;
    for (int k = 0; k < K; ++k) load += eta(k, l);
    if (load <= budget[l]) continue;
    const double t = budget[l] / load;
    for (int k = 0; k < K; ++k) {
      eta(k, l) *= t;
      nu(k, l) *= std::sqrt(t);
    }
  }
}

double tightness_gap(const Grid<double>& nu, const Grid<double>& eta, const Grid<char>& U) {
  double g = 0.0;
  for (size_t i = 0; i < nu.size(); ++i)
    if (U.raw()[i]) g = std::max(g, std::abs(nu.raw()[i] * nu.raw()[i] - eta.raw()[i]));
  return g;
}

/// Pulls (nu, eta) out of a solver vector; links without variable stay at 0.
void extract(const FeasibilityProgram& fp, const RVec& x, Grid<double>& nu, Grid<double>& eta) {
  const int K = fp.nu_var.rows();
  const int L = fp.nu_var.cols();
  nu = Grid<double>(K, L, 0.0);
  eta = Grid<double>(K, L, 0.0);
  for (int k = 0; k < K; ++k)
    for (int l = 0; l < L; ++l) {
      if (fp.nu_var(k, l) >= 0) nu(k, l) = x(fp.nu_var(k, l));
      if (fp.eta_var(k, l) >= 0) eta(k, l) = x(fp.eta_var(k, l));
    }
}

bool solver_accepts(socp::SolveStatus s) {
  return s == socp::SolveStatus::Optimal || s == socp::SolveStatus::Feasible;
}

struct NodeSolve {
  socp::SolveResult result;
  bool fallback = false;  // objective dropped after a stall
  int failures = 0;
};

/// Solves a node; on a stall retries as a pure feasibility problem.
NodeSolve solve_node(const socp::ConeProgram& program, const OptimizerOptions& options) {
  NodeSolve ns;
  ns.result = socp::solve(program, options.solver);
  if (ns.result.status != socp::SolveStatus::NumericalFailure) return ns;
  ++ns.failures;
  socp::ConeProgram feasibility = program;
  feasibility.objective.clear();
  ns.result = socp::solve(feasibility, options.solver);
  ns.fallback = true;
  if (ns.result.status == socp::SolveStatus::NumericalFailure) ++ns.failures;
  return ns;
}

/// Pulls (nu, eta) from a node solution. After a feasibility-only fallback the
/// power is set to nu^2, the least power supporting nu.
void extract_node(const FeasibilityProgram& fp, const NodeSolve& ns, Grid<double>& nu, Grid<double>& eta) {
  extract(fp, ns.result.x, nu, eta);
  if (!ns.fallback) return;
  for (size_t i = 0; i < nu.size(); ++i) {
    const double v = std::max(nu.raw()[i], 0.0);
    eta.raw()[i] = v * v;
  }
}

void check_reachable(const Coefficients& co, const std::optional<Grid<char>>& U_fixed) {
  for (int k = 0; k < co.K; ++k) {
    bool served = false;
    bool reachable = false;
    for (int l = 0; l < co.L; ++l) {
      if (U_fixed && !(*U_fixed)(k, l)) continue;
      served = true;
      if (co.a(k, l) > 0.0) reachable = true;
    }
    if (served && !reachable)
      throw UnreachableUser(k, "user " + std::to_string(k) +
                                   " is unreachable: no serving AP has a positive effective gain");
  }
}

}  // namespace

FeasibilityProgram build_feasibility(const NetworkSnapshot& snapshot, const MomentTable& moments,
                                     double gamma_t, const std::optional<Grid<char>>& U_fixed,
                                     const OptimizerOptions& options) {
  if (!(gamma_t >= 0.0)) throw Error("build_feasibility: gamma_t must be nonnegative");
  const Coefficients co = coefficients(snapshot, moments);
  const int K = co.K;
  const int L = co.L;
  const bool joint = !U_fixed.has_value();

  FeasibilityProgram fp;
  fp.nu_var = Grid<int>(K, L, -1);
  fp.eta_var = Grid<int>(K, L, -1);
  fp.u_var = Grid<int>(K, L, -1);
  fp.active_user = joint ? std::vector<char>(K, 1) : active_users(*U_fixed);
  socp::ConeProgram& p = fp.program;

  for (int k = 0; k < K; ++k)
    for (int l = 0; l < L; ++l) {
      if (!joint && !(*U_fixed)(k, l)) continue;
      const double b = co.budget[l];
      fp.nu_var(k, l) = p.add_variable(0.0, std::sqrt(b));
      fp.eta_var(k, l) = p.add_variable(0.0, b, 1.0);
      if (joint) fp.u_var(k, l) = p.add_variable(0.0, 1.0, -options.serve_bias);
    }

  for (int k = 0; k < K; ++k)
    for (int l = 0; l < L; ++l) {
      const int nv = fp.nu_var(k, l);
      if (nv < 0) continue;
      const int ev = fp.eta_var(k, l);
      // nu^2 <= eta as || [2 nu; 1 - eta] || <= 1 + eta
      p.soc_blocks.push_back({{socp::AffineExpr{{{ev, 1.0}}, 1.0}, socp::AffineExpr{{{nv, 2.0}}, 0.0},
                               socp::AffineExpr{{{ev, -1.0}}, 1.0}}});
      if (joint) {
        const int uv = fp.u_var(k, l);
        const double b = co.budget[l];
        p.inequalities.push_back({{{uv, std::sqrt(b)}, {nv, -1.0}}, 0.0});
        p.inequalities.push_back({{{uv, b}, {ev, -1.0}}, 0.0});
      }
    }

  for (int l = 0; l < L; ++l) {
    socp::AffineExpr row{{}, co.budget[l]};
    for (int k = 0; k < K; ++k)
      if (fp.eta_var(k, l) >= 0) row.terms.push_back({fp.eta_var(k, l), -1.0});
    if (!row.terms.empty()) p.inequalities.push_back(std::move(row));
  }

  const double sg = std::sqrt(gamma_t);
  for (int k = 0; k < K; ++k) {
    if (!fp.active_user[k]) continue;
    socp::SocBlock blk;
    socp::AffineExpr lhs;
    for (int l = 0; l < L; ++l)
      if (fp.nu_var(k, l) >= 0 && co.a(k, l) != 0.0) lhs.terms.push_back({fp.nu_var(k, l), co.a(k, l)});
    blk.rows.push_back(std::move(lhs));
    blk.rows.push_back({{}, sg});
    if (gamma_t > 0.0) {
      for (int kp = 0; kp < K; ++kp)
        for (int l = 0; l < L; ++l) {
          const int nv = fp.nu_var(kp, l);
          const double c = co.coef(k, kp, l);
          if (nv >= 0 && c > 0.0) blk.rows.push_back({{{nv, sg * c}}, 0.0});
        }
    }
    p.soc_blocks.push_back(std::move(blk));
  }
  return fp;
}

ConstraintTerms constraint_terms(const NetworkSnapshot& snapshot, const MomentTable& m,
                                 const Grid<char>& U, const Grid<double>& nu, int k) {
  const int K = snapshot.num_users;
  const int L = snapshot.num_aps;
  ConstraintTerms t{cd(0.0, 0.0), snapshot.sigma_z2 / snapshot.ap_power_w, 0.0};
  for (int l = 0; l < L; ++l) {
    const double a2 = std::norm(snapshot.alpha[l]);
    double load = 0.0;
    for (int kp = 0; kp < K; ++kp) {
      if (!U(kp, l)) continue;
      const double v2 = nu(kp, l) * nu(kp, l);
      load += v2;
      t.B += v2 * a2 * m.second_moment(k, kp, l);
    }
    t.B += snapshot.beta[l] * load * m.trR(k, l);
    if (U(k, l)) {
      t.A += snapshot.alpha[l] * nu(k, l) * m.mean_gain(k, l);
      t.C += nu(k, l) * nu(k, l) * a2 * std::norm(m.mean_gain(k, l));
    }
  }
  return t;
}

bool certify(const NetworkSnapshot& snapshot, const MomentTable& moments, const Grid<char>& U,
             const Grid<double>& nu, const Grid<double>& eta, double gamma_t,
             const std::vector<char>& active_user) {
  const int K = snapshot.num_users;
  const int L = snapshot.num_aps;
  const auto budget = ap_budgets(snapshot);
  for (int l = 0; l < L; ++l) {
    double load = 0.0;
    for (int k = 0; k < K; ++k) {
      const double n = nu(k, l);
      const double e = eta(k, l);
      if (!std::isfinite(n) || !std::isfinite(e) || n < 0.0 || e < 0.0) return false;
      if (!U(k, l) && (n != 0.0 || e != 0.0)) return false;
      if (n * n > e * (1.0 + 1e-12)) return false;
      load += U(k, l) ? e : 0.0;
    }
    if (load > budget[l] + 1e-12) return false;
  }
  for (int k = 0; k < K; ++k) {
    if (!active_user[k]) continue;
    const ConstraintTerms t = constraint_terms(snapshot, moments, U, nu, k);
    const double re = t.A.real();
    if (gamma_t > 0.0 && re <= 0.0) return false;
    if (re * re < gamma_t * t.B * (1.0 - kCertifyTol)) return false;
  }
  return true;
}

bool exact_bound_holds(const NetworkSnapshot& snapshot, const MomentTable& moments, const Grid<char>& U,
                   const Grid<double>& nu, double gamma_t, int user) {
  const ConstraintTerms t = constraint_terms(snapshot, moments, U, nu, user);
  return std::norm(t.A) >= gamma_t * (t.B - t.C) * (1.0 - kCertifyTol);
}

double coherent_ratio(const NetworkSnapshot& snapshot, const MomentTable& moments, const Grid<char>& U,
                      const Grid<double>& nu, int user) {
  const ConstraintTerms t = constraint_terms(snapshot, moments, U, nu, user);
  return t.B > 0.0 ? t.C / t.B : 0.0;
}

double gamma_upper_bound(const NetworkSnapshot& snapshot, const MomentTable& moments) {
  const auto budget = ap_budgets(snapshot);
  double best = 0.0;
  for (int k = 0; k < snapshot.num_users; ++k) {
    double sum = 0.0;
    for (int l = 0; l < snapshot.num_aps; ++l)
      sum += std::abs(snapshot.alpha[l]) * std::abs(moments.mean_gain(k, l)) * std::sqrt(budget[l]);
    best = std::max(best, snapshot.ap_power_w * sum * sum / snapshot.sigma_z2);
  }
  return best;
}

namespace {

/// Repairs and certifies a solver point; fills the result on success.
bool accept_point(const NetworkSnapshot& snapshot, const MomentTable& moments, double gamma_t,
                  const Grid<char>& U, Grid<double> nu, Grid<double> eta,
                  const std::vector<char>& active, BranchAndBoundResult& out) {
  repair(ap_budgets(snapshot), U, nu, eta);
  if (!certify(snapshot, moments, U, nu, eta, gamma_t, active)) return false;
  out.feasible = true;
  out.U = U;
  out.nu = std::move(nu);
  out.eta = std::move(eta);
  return true;
}

}  // namespace

BranchAndBoundResult solve_fixed(const NetworkSnapshot& snapshot, const MomentTable& moments,
                                 double gamma_t, const Grid<char>& U, const OptimizerOptions& options) {
  BranchAndBoundResult out;
  out.nodes = 1;
  const FeasibilityProgram fp = build_feasibility(snapshot, moments, gamma_t, U, options);
  const NodeSolve ns = solve_node(fp.program, options);
  out.solver_failures = ns.failures;
  if (!solver_accepts(ns.result.status)) return out;
  Grid<double> nu, eta;
  extract_node(fp, ns, nu, eta);
  out.tightness_gap = tightness_gap(nu, eta, U);
  accept_point(snapshot, moments, gamma_t, U, std::move(nu), std::move(eta), fp.active_user, out);
  return out;
}

BranchAndBoundResult branch_and_bound(const NetworkSnapshot& snapshot, const MomentTable& moments,
                                      double gamma_t, const OptimizerOptions& options) {
  const int K = snapshot.num_users;
  const int L = snapshot.num_aps;
  FeasibilityProgram fp = build_feasibility(snapshot, moments, gamma_t, std::nullopt, options);
  const std::vector<double> lower0 = fp.program.lower;
  const std::vector<double> upper0 = fp.program.upper;

  BranchAndBoundResult out;
  // Node = fixed value per link: -1 free, 0 or 1.
  std::vector<std::vector<signed char>> stack{std::vector<signed char>(static_cast<size_t>(K) * L, -1)};
  while (!stack.empty()) {
    if (out.nodes >= options.node_budget)
      throw NodeBudgetExceeded("branch and bound exceeded the node budget of " +
                               std::to_string(options.node_budget));
    const std::vector<signed char> fixed = std::move(stack.back());
    stack.pop_back();
    ++out.nodes;

    fp.program.lower = lower0;
    fp.program.upper = upper0;
    for (int k = 0; k < K; ++k)
      for (int l = 0; l < L; ++l) {
        const signed char f = fixed[static_cast<size_t>(k) * L + l];
        if (f < 0) continue;
        fp.program.lower[fp.u_var(k, l)] = f;
        fp.program.upper[fp.u_var(k, l)] = f;
      }
    const NodeSolve ns = solve_node(fp.program, options);
    out.solver_failures += ns.failures;
    if (!solver_accepts(ns.result.status)) continue;
    const RVec& x = ns.result.x;

    int branch_k = -1;
    int branch_l = -1;
    double best_frac = kIntegralityTol;
    Grid<char> U(K, L, 0);
    for (int k = 0; k < K; ++k)
      for (int l = 0; l < L; ++l) {
        const double u = x(fp.u_var(k, l));
        const double frac = std::min(u, 1.0 - u);
        if (frac > best_frac) {
          best_frac = frac;
          branch_k = k;
          branch_l = l;
        }
        U(k, l) = u > 0.5 ? 1 : 0;
      }

    if (branch_k < 0) {
      Grid<double> nu, eta;
      extract_node(fp, ns, nu, eta);
      const double gap = tightness_gap(nu, eta, U);
      if (accept_point(snapshot, moments, gamma_t, U, std::move(nu), std::move(eta), fp.active_user, out)) {
        out.tightness_gap = gap;
        return out;
      }
      BranchAndBoundResult fixed_result = solve_fixed(snapshot, moments, gamma_t, U, options);
      out.solver_failures += fixed_result.solver_failures;
      if (fixed_result.feasible) {
        fixed_result.nodes = out.nodes;
        fixed_result.solver_failures = out.solver_failures;
        return fixed_result;
      }
      continue;
    }

    const size_t idx = static_cast<size_t>(branch_k) * L + branch_l;
    std::vector<signed char> zero = fixed;
    zero[idx] = 0;
    std::vector<signed char> one = fixed;
    one[idx] = 1;
    stack.push_back(std::move(zero));
    stack.push_back(std::move(one));
  }
  out.feasible = false;
  return out;
}

Allocation bisection_maxmin(const NetworkSnapshot& snapshot, const MomentTable& moments, BisectionMode mode,
                            const std::optional<Grid<char>>& U_fixed, const OptimizerOptions& options) {
  const int K = snapshot.num_users;
  const int L = snapshot.num_aps;
  if (mode == BisectionMode::FixedU && !U_fixed) throw Error("fixed-U bisection needs an association");
  if (!(options.epsilon > 0.0)) throw Error("bisection epsilon must be positive");
  const std::optional<Grid<char>> U_mode = mode == BisectionMode::FixedU ? U_fixed : std::nullopt;
  check_reachable(coefficients(snapshot, moments), U_mode);

  Allocation alloc;
  alloc.method = mode == BisectionMode::Joint ? Method::JUP : Method::MAXMIN_CF;
  alloc.U = U_mode ? *U_mode : all_ones(K, L);
  alloc.nu = Grid<double>(K, L, 0.0);
  alloc.eta = Grid<double>(K, L, 0.0);
  const std::vector<char> active = U_mode ? active_users(*U_mode) : std::vector<char>(K, 1);

  SinrTargetBracket br{0.0, gamma_upper_bound(snapshot, moments), options.epsilon};
  SolveTrace& tr = alloc.trace;
  while (br.gamma_high - br.gamma_low > br.epsilon) {
    const double mid = 0.5 * (br.gamma_low + br.gamma_high);
    ++tr.bisection_steps;
    const BranchAndBoundResult res = mode == BisectionMode::Joint
                                         ? branch_and_bound(snapshot, moments, mid, options)
                                         : solve_fixed(snapshot, moments, mid, *U_mode, options);
    tr.bb_nodes += res.nodes;
    tr.solver_failures += res.solver_failures;
    if (!res.feasible) {
      br.gamma_high = mid;
      continue;
    }
    ++tr.accepted_steps;
    br.gamma_low = mid;
    alloc.U = res.U;
    alloc.nu = res.nu;
    alloc.eta = res.eta;
    tr.max_tightness_gap = std::max(tr.max_tightness_gap, res.tightness_gap);
    const auto budget = ap_budgets(snapshot);
    for (int l = 0; l < L; ++l) {
      double load = 0.0;
      for (int k = 0; k < K; ++k) load += res.U(k, l) ? res.eta(k, l) : 0.0;
      tr.max_budget_excess = std::max(tr.max_budget_excess, load - budget[l]);
    }
    for (int k = 0; k < K; ++k)
      if (active[k] && !exact_bound_holds(snapshot, moments, res.U, res.nu, mid, k)) ++tr.bound_violations;
  }
  alloc.gamma_t = br.gamma_low;
  return alloc;
}

Grid<char> nearest_ap_association(const NetworkSnapshot& snapshot, int n_closest) {
  const int K = snapshot.num_users;
  const int L = snapshot.num_aps;
  if (n_closest < 1) throw ConfigError("n_closest must be at least 1");
  const int n = std::min(n_closest, L);
  Grid<char> U(K, L, 0);
  std::vector<int> order(L);
  for (int k = 0; k < K; ++k) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return distance(snapshot.user_positions[k], snapshot.ap_positions[a]) <
             distance(snapshot.user_positions[k], snapshot.ap_positions[b]);
    });
    for (int i = 0; i < n; ++i) U(k, order[i]) = 1;
  }
  return U;
}

Grid<char> nearest_user_association(const NetworkSnapshot& snapshot) {
  const int K = snapshot.num_users;
  const int L = snapshot.num_aps;
  Grid<char> U(K, L, 0);
  for (int l = 0; l < L; ++l) {
    int best = 0;
    double best_d = distance(snapshot.user_positions[0], snapshot.ap_positions[l]);
    for (int k = 1; k < K; ++k) {
      const double d = distance(snapshot.user_positions[k], snapshot.ap_positions[l]);
      if (d < best_d) {
        best_d = d;
        best = k;
      }
    }
    U(best, l) = 1;
  }
  return U;
}

Allocation jup_lo(const NetworkSnapshot& snapshot, const MomentTable& moments, const OptimizerOptions& options) {
  Allocation a = bisection_maxmin(snapshot, moments, BisectionMode::FixedU,
                                  nearest_ap_association(snapshot, options.n_closest), options);
  a.method = Method::JUP_LO;
  return a;
}

Allocation jup(const NetworkSnapshot& snapshot, const MomentTable& moments, const OptimizerOptions& options) {
  const int links = snapshot.num_aps * snapshot.num_users;
  if (links > options.jup_max_links && !options.allow_large_jup)
    throw JupGated("JUP needs L*K <= " + std::to_string(options.jup_max_links) + " (got " +
                   std::to_string(links) + "); use JUP-Lo or the large-JUP override");
  return bisection_maxmin(snapshot, moments, BisectionMode::Joint, std::nullopt, options);
}

Allocation epa_cf(const NetworkSnapshot& snapshot, const MomentTable& moments) {
  Allocation a;
  a.method = Method::EPA_CF;
  a.U = all_ones(snapshot.num_users, snapshot.num_aps);
  a.eta = equal_power_split(snapshot);
  a.nu = a.eta;
  for (auto& v : a.nu.raw()) v = std::sqrt(v);
  const auto sinr = sinr_of(snapshot, moments, a.U, a.eta);
  a.gamma_t = std::min_element(sinr.begin(), sinr.end(), [](const auto& x, const auto& y) {
                return x.gamma < y.gamma;
              })->gamma;
  return a;
}

Allocation maxmin_cf(const NetworkSnapshot& snapshot, const MomentTable& moments, const OptimizerOptions& options) {
  Allocation a = bisection_maxmin(snapshot, moments, BisectionMode::FixedU,
                                  all_ones(snapshot.num_users, snapshot.num_aps), options);
  a.method = Method::MAXMIN_CF;
  return a;
}

Allocation uc_nearest(const NetworkSnapshot& snapshot, const MomentTable& moments, const OptimizerOptions& options) {
  Allocation a = bisection_maxmin(snapshot, moments, BisectionMode::FixedU, nearest_user_association(snapshot),
                                  options);
  a.method = Method::UC_NEAREST;
  return a;
}

Allocation ideal_reference(const NetworkSnapshot& snapshot, const MomentTable& ideal_moments,
                           const OptimizerOptions& options) {
  Allocation a = maxmin_cf(snapshot.with_ideal_pa(), ideal_moments, options);
  a.method = Method::IDEAL_REFERENCE;
  return a;
}

std::vector<Allocation> baselines(const NetworkSnapshot& snapshot, const MomentTable& moments,
                                  const MomentTable& ideal_moments, const OptimizerOptions& options) {
  return {epa_cf(snapshot, moments), maxmin_cf(snapshot, moments, options), uc_nearest(snapshot, moments, options),
          ideal_reference(snapshot, ideal_moments, options)};
}

}  // namespace cfmimo
