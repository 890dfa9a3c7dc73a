#pragma once

#include "cfmimo/moments.hpp"
#include "cfmimo/network.hpp"
#include "cfmimo/socp.hpp"
#include "cfmimo/types.hpp"

#include <optional>
#include <string>
#include <vector>

namespace cfmimo {

enum class Method { JUP, JUP_LO, MAXMIN_CF, EPA_CF, UC_NEAREST, IDEAL_REFERENCE };

std::string to_string(Method m);

/// Bisection diagnostics collected while producing an allocation.
struct SolveTrace {
  int bisection_steps = 0;
  int accepted_steps = 0;
  int solver_failures = 0;       // NumericalFailure results, counted as infeasible
  int certification_failures = 0;
  long long bb_nodes = 0;
  int bound_violations = 0;    // accepted points violating |A|^2 >= gamma (B - C)
  double max_tightness_gap = 0.0;  // max |nu^2 - eta| over accepted optima
  double max_budget_excess = 0.0;  // max sum_k eta_kl - budget_l over accepted points
};

struct Allocation {
  Method method = Method::EPA_CF;
  Grid<char> U;
  Grid<double> eta;
  Grid<double> nu;
  double gamma_t = 0.0;
  SolveTrace trace;
};

struct SinrTargetBracket {
  double gamma_low = 0.0;
  double gamma_high = 0.0;
  double epsilon = 1e-3;
};

class UnreachableUser : public Error {
 public:
  UnreachableUser(int user, const std::string& what) : Error(what), user_(user) {}
  int user() const { return user_; }

 private:
  int user_;
};

class NodeBudgetExceeded : public Error {
 public:
  using Error::Error;
};

class JupGated : public Error {
 public:
  using Error::Error;
};

struct OptimizerOptions {
  double epsilon = 1e-3;
  long long node_budget = 10000;
  /// Reward per served link in the relaxation objective; 0 keeps u free to
  /// take fractional values (exercises branching).
  double serve_bias = 1e-2;
  int n_closest = 1;
  /// JUP is refused when L*K exceeds this unless allow_large_jup is set.
  int jup_max_links = 16;
  bool allow_large_jup = false;
  socp::SolverSettings solver{1e-9, 1e-9, 200};
};

/// Per-AP effective budget 1 / (|alpha_l|^2 + beta_l N_a).
std::vector<double> ap_budgets(const NetworkSnapshot& snapshot);

/// Cone program for a fixed SINR target plus the variable maps. Index -1 marks
/// a link without variable (unserved under a fixed association).
struct FeasibilityProgram {
  socp::ConeProgram program;
  Grid<int> nu_var;
  Grid<int> eta_var;
  Grid<int> u_var;  // only in joint mode
  std::vector<char> active_user;  // users carrying an SINR row
};

/// Conservative max-min feasibility problem at gamma_t. With U_fixed the
/// association is data; without it u_kl are relaxed to [0, 1].
FeasibilityProgram build_feasibility(const NetworkSnapshot& snapshot, const MomentTable& moments,
                                     double gamma_t, const std::optional<Grid<char>>& U_fixed,
                                     const OptimizerOptions& options = {});

/// Terms of the conservative constraint at (U, nu), unnormalized.
struct ConstraintTerms {
  cd A;      // sum_l alpha_l u_kl nu_kl E[h_kl^T w_kl]
  double B;  // interference-plus-noise including the coherent part
  double C;  // coherent part subtracted in the exact SINR
};
ConstraintTerms constraint_terms(const NetworkSnapshot& snapshot, const MomentTable& moments,
                                 const Grid<char>& U, const Grid<double>& nu, int user);

/// Independent check of a candidate point: bounds, budgets, nu^2 <= eta and
/// (Re A_k)^2 >= gamma B_k for every active user, all on the raw data.
bool certify(const NetworkSnapshot& snapshot, const MomentTable& moments, const Grid<char>& U,
             const Grid<double>& nu, const Grid<double>& eta, double gamma_t,
             const std::vector<char>& active_user);

/// |A_k|^2 >= gamma (B_k - C_k) within relative rounding tolerance.
bool exact_bound_holds(const NetworkSnapshot& snapshot, const MomentTable& moments, const Grid<char>& U,
                   const Grid<double>& nu, double gamma_t, int user);

/// Algorithm-style upper end of the bracket: every AP at full budget and
/// coherent combining over the noise floor.
double gamma_upper_bound(const NetworkSnapshot& snapshot, const MomentTable& moments);

struct BranchAndBoundResult {
  bool feasible = false;
  Grid<char> U;
  Grid<double> nu;
  Grid<double> eta;
  long long nodes = 0;
  int solver_failures = 0;
  double tightness_gap = 0.0;
};

/// Depth-first search over the relaxed associations at a fixed target.
BranchAndBoundResult branch_and_bound(const NetworkSnapshot& snapshot, const MomentTable& moments,
                                      double gamma_t, const OptimizerOptions& options = {});

/// Feasibility of one fixed association at gamma_t.
BranchAndBoundResult solve_fixed(const NetworkSnapshot& snapshot, const MomentTable& moments,
                                 double gamma_t, const Grid<char>& U,
                                 const OptimizerOptions& options = {});

enum class BisectionMode { Joint, FixedU };

/// Max-min bisection. FixedU requires U_fixed; users with no serving AP are
/// left out of the constraints and end with gamma 0.
Allocation bisection_maxmin(const NetworkSnapshot& snapshot, const MomentTable& moments,
                            BisectionMode mode, const std::optional<Grid<char>>& U_fixed,
                            const OptimizerOptions& options = {});

/// Each user associated with its n_closest nearest APs, then fixed-U max-min.
Grid<char> nearest_ap_association(const NetworkSnapshot& snapshot, int n_closest);
Allocation jup_lo(const NetworkSnapshot& snapshot, const MomentTable& moments,
                  const OptimizerOptions& options = {});

/// Exact joint association and power control; gated by options.jup_max_links.
Allocation jup(const NetworkSnapshot& snapshot, const MomentTable& moments,
               const OptimizerOptions& options = {});

/// u_kl = 1 iff k is the nearest user of AP l (ties to the lower index).
Grid<char> nearest_user_association(const NetworkSnapshot& snapshot);

Allocation epa_cf(const NetworkSnapshot& snapshot, const MomentTable& moments);
Allocation maxmin_cf(const NetworkSnapshot& snapshot, const MomentTable& moments,
                     const OptimizerOptions& options = {});
Allocation uc_nearest(const NetworkSnapshot& snapshot, const MomentTable& moments,
                      const OptimizerOptions& options = {});
/// Max-min with an ideal amplifier; ideal_moments must come from
/// snapshot.with_ideal_pa().
Allocation ideal_reference(const NetworkSnapshot& snapshot, const MomentTable& ideal_moments,
                           const OptimizerOptions& options = {});

/// EPA_CF, MAXMIN_CF, UC_NEAREST and IDEAL_REFERENCE in that order.
std::vector<Allocation> baselines(const NetworkSnapshot& snapshot, const MomentTable& moments,
                                  const MomentTable& ideal_moments,
                                  const OptimizerOptions& options = {});

/// C_k / B_k at (U, nu); 0 when B_k vanishes.
double coherent_ratio(const NetworkSnapshot& snapshot, const MomentTable& moments,
                      const Grid<char>& U, const Grid<double>& nu, int user);

}  // namespace cfmimo
