#pragma once

#include "cfmimo/types.hpp"

#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

namespace cfmimo::socp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct LinearTerm {
  int var = 0;
  double coef = 0.0;
};

/// constant + sum coef * x[var]
struct AffineExpr {
  std::vector<LinearTerm> terms;
  double constant = 0.0;

  double evaluate(const RVec& x) const;
};

struct EqualityConstraint {
  std::vector<LinearTerm> terms;
  double rhs = 0.0;
};

/// rows[0] >= || (rows[1], ..., rows[d-1]) ||
struct SocBlock {
  std::vector<AffineExpr> rows;
};

/// minimize objective^T x subject to equalities, expr >= 0 inequalities,
/// variable bounds and second-order cone blocks.
struct ConeProgram {
  int n_vars = 0;
  std::vector<double> objective;  // empty or n_vars entries
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<EqualityConstraint> equalities;
  std::vector<AffineExpr> inequalities;
  std::vector<SocBlock> soc_blocks;

  int add_variable(double lo = -kInf, double hi = kInf, double cost = 0.0);

  /// Throws Error on out-of-range indices or SOC blocks of dimension < 2.
  void validate() const;

  /// Largest constraint violation of x, evaluated directly on the program data.
  double max_violation(const RVec& x) const;

  bool has_objective() const;
};

enum class SolveStatus { Feasible, Infeasible, Optimal, Unbounded, NumericalFailure };

std::string to_string(SolveStatus s);

struct Residuals {
  double primal = 0.0;       // scaled primal residual of the returned point
  double dual = 0.0;         // scaled dual residual
  double gap = 0.0;          // complementarity s^T z at the returned point
  double certificate = 0.0;  // normalized residual of the infeasibility certificate
};

struct SolveResult {
  SolveStatus status = SolveStatus::NumericalFailure;
  RVec x;
  Residuals residuals;
  int iterations = 0;
  double objective = 0.0;
};

struct SolverSettings {
  double tol_feas = 1e-8;
  double tol_gap = 1e-8;
  int max_iters = 200;
};

/// Homogeneous self-dual interior-point method with Nesterov-Todd scaling.
/// A program without objective is a feasibility problem and reports Feasible;
/// otherwise Optimal. Infeasible is only returned with a Farkas certificate
/// whose normalized residual is below tol_feas.
SolveResult solve(const ConeProgram& program, const SolverSettings& settings = {});

/// Nesterov-Todd scaling of one second-order cone pair (s, z), both strictly
/// interior: W z = W^-1 s = lambda.
struct NtScaling {
  RMat W;
  RMat W_inv;
  RVec lambda;
};
NtScaling nt_scaling_block(const RVec& s, const RVec& z);

/// Plain-text dump, first line "CONEPROGRAM 1".
void write_text(const ConeProgram& program, std::ostream& out);
ConeProgram read_text(std::istream& in);

}  // namespace cfmimo::socp
