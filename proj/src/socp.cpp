#include "cfmimo/socp.hpp"

#include <Eigen/Cholesky>
#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <optional>
#include <istream>
#include <ostream>
#include <sstream>

namespace cfmimo::socp {

double AffineExpr::evaluate(const RVec& x) const {
  double v = constant;
  for (const auto& t : terms) v += t.coef * x(t.var);
  return v;
}

int ConeProgram::add_variable(double lo, double hi, double cost) {
  lower.push_back(lo);
  upper.push_back(hi);
  if (!objective.empty() || cost != 0.0) {
    objective.resize(n_vars, 0.0);
    objective.push_back(cost);
  }
  return n_vars++;
}

bool ConeProgram::has_objective() const {
  return std::any_of(objective.begin(), objective.end(), [](double c) { return c != 0.0; });
}

void ConeProgram::validate() const {
  if (n_vars < 0) throw Error("cone program: negative variable count");
  if (!objective.empty() && static_cast<int>(objective.size()) != n_vars)
    throw Error("cone program: objective size mismatch");
  if (static_cast<int>(lower.size()) != n_vars || static_cast<int>(upper.size()) != n_vars)
    throw Error("cone program: bounds size mismatch");
  auto check_terms = [this](const std::vector<LinearTerm>& terms) {
    for (const auto& t : terms)
      if (t.var < 0 || t.var >= n_vars) throw Error("cone program: variable index out of range");
  };
  for (const auto& e : equalities) check_terms(e.terms);
  for (const auto& e : inequalities) check_terms(e.terms);
  for (const auto& b : soc_blocks) {
    if (b.rows.size() < 2) throw Error("cone program: SOC block of dimension < 2");
    for (const auto& r : b.rows) check_terms(r.terms);
  }
  for (int i = 0; i < n_vars; ++i)
    if (lower[i] > upper[i]) throw Error("cone program: lower bound above upper bound");
}

double ConeProgram::max_violation(const RVec& x) const {
  double v = 0.0;
  for (const auto& e : equalities) {
    double lhs = 0.0;
    for (const auto& t : e.terms) lhs += t.coef * x(t.var);
    v = std::max(v, std::abs(lhs - e.rhs));
  }
  for (const auto& e : inequalities) v = std::max(v, -e.evaluate(x));
  for (int i = 0; i < n_vars; ++i) {
    if (std::isfinite(lower[i])) v = std::max(v, lower[i] - x(i));
    if (std::isfinite(upper[i])) v = std::max(v, x(i) - upper[i]);
  }
  for (const auto& b : soc_blocks) {
    double sq = 0.0;
    for (size_t r = 1; r < b.rows.size(); ++r) sq += std::pow(b.rows[r].evaluate(x), 2);
    v = std::max(v, std::sqrt(sq) - b.rows[0].evaluate(x));
  }
  return v;
}

std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Feasible: return "feasible";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Unbounded: return "unbounded";
    case SolveStatus::NumericalFailure: return "numerical_failure";
  }
  return "?";
}

NtScaling nt_scaling_block(const RVec& s, const RVec& z) {
  const int d = static_cast<int>(s.size());
  if (d < 2 || z.size() != d) throw Error("nt_scaling_block: dimension mismatch");
  const double s_det = std::max(s(0) * s(0) - s.tail(d - 1).squaredNorm(), 1e-300);
  const double z_det = std::max(z(0) * z(0) - z.tail(d - 1).squaredNorm(), 1e-300);
  const RVec s_bar = s / std::sqrt(s_det);
  const RVec z_bar = z / std::sqrt(z_det);
  const double gamma = std::sqrt(std::max((1.0 + s_bar.dot(z_bar)) / 2.0, 1e-300));
  RVec w_bar(d);
  w_bar(0) = (s_bar(0) + z_bar(0)) / (2.0 * gamma);
  w_bar.tail(d - 1) = (s_bar.tail(d - 1) - z_bar.tail(d - 1)) / (2.0 * gamma);
  const double eta = std::pow(s_det / z_det, 0.25);

  RMat core = RMat::Identity(d, d);
  const RVec w1 = w_bar.tail(d - 1);
  core(0, 0) = w_bar(0);
  core.block(0, 1, 1, d - 1) = w1.transpose();
  core.block(1, 0, d - 1, 1) = w1;
  core.block(1, 1, d - 1, d - 1) += w1 * w1.transpose() / (1.0 + w_bar(0));
  RMat core_inv = core;
  core_inv.block(0, 1, 1, d - 1) *= -1.0;
  core_inv.block(1, 0, d - 1, 1) *= -1.0;

  NtScaling out;
  out.W = eta * core;
  out.W_inv = core_inv / eta;
  out.lambda = out.W * z;
  return out;
}

namespace {

// ---------------------------------------------------------------------------
// Standard form: min c^T x  s.t.  A x = b,  G x + s = h,  s in K.
// K is a product of 1-dimensional nonnegative blocks and second-order cones.
// ---------------------------------------------------------------------------

struct Block {
  bool soc = false;
  int offset = 0;
  int dim = 1;
  std::vector<int> cols;  // columns of G touched by this block
  RMat G;                 // dim x cols.size()
};

struct StandardForm {
  int n = 0;
  int p = 0;
  int m = 0;
  RVec c;
  RMat A;
  RVec b;
  RVec h;
  std::vector<Block> blocks;

  RVec G_times(const RVec& x) const {
    RVec out(m);
    for (const auto& blk : blocks) {
      RVec xs(blk.cols.size());
      for (size_t j = 0; j < blk.cols.size(); ++j) xs(j) = x(blk.cols[j]);
      out.segment(blk.offset, blk.dim) = blk.G * xs;
    }
    return out;
  }

  RVec Gt_times(const RVec& z) const {
    RVec out = RVec::Zero(n);
    for (const auto& blk : blocks) {
      const RVec t = blk.G.transpose() * z.segment(blk.offset, blk.dim);
      for (size_t j = 0; j < blk.cols.size(); ++j) out(blk.cols[j]) += t(j);
    }
    return out;
  }
};

/// Adds one block whose rows are h_i - G_i x for the affine expressions
/// expr_i = constant + a^T x (so G_i = -a, h_i = constant).
void add_block(StandardForm& sf, bool soc, const std::vector<const AffineExpr*>& rows,
               std::vector<double>& h_out) {
  Block blk;
  blk.soc = soc;
  blk.dim = static_cast<int>(rows.size());
  blk.offset = sf.m;
  for (const auto* r : rows)
    for (const auto& t : r->terms) blk.cols.push_back(t.var);
  std::sort(blk.cols.begin(), blk.cols.end());
  blk.cols.erase(std::unique(blk.cols.begin(), blk.cols.end()), blk.cols.end());
  blk.G = RMat::Zero(blk.dim, static_cast<int>(blk.cols.size()));
  for (int i = 0; i < blk.dim; ++i) {
    for (const auto& t : rows[i]->terms) {
      const auto pos = std::lower_bound(blk.cols.begin(), blk.cols.end(), t.var) - blk.cols.begin();
      blk.G(i, pos) -= t.coef;
    }
    h_out.push_back(rows[i]->constant);
  }
  sf.m += blk.dim;
  sf.blocks.push_back(std::move(blk));
}

StandardForm compile(const ConeProgram& prog) {
  StandardForm sf;
  sf.n = prog.n_vars;
  sf.c = RVec::Zero(sf.n);
  for (size_t i = 0; i < prog.objective.size(); ++i) sf.c(i) = prog.objective[i];

  sf.p = static_cast<int>(prog.equalities.size());
  sf.A = RMat::Zero(sf.p, sf.n);
  sf.b = RVec::Zero(sf.p);
  for (int i = 0; i < sf.p; ++i) {
    for (const auto& t : prog.equalities[i].terms) sf.A(i, t.var) += t.coef;
    sf.b(i) = prog.equalities[i].rhs;
  }

  std::vector<double> h;
  std::vector<AffineExpr> bound_rows;
  bound_rows.reserve(2 * prog.n_vars);
  for (int i = 0; i < prog.n_vars; ++i) {
    if (std::isfinite(prog.lower[i])) bound_rows.push_back({{{i, 1.0}}, -prog.lower[i]});
    if (std::isfinite(prog.upper[i])) bound_rows.push_back({{{i, -1.0}}, prog.upper[i]});
  }
  for (const auto& r : bound_rows) add_block(sf, false, {&r}, h);
  for (const auto& r : prog.inequalities) add_block(sf, false, {&r}, h);
  for (const auto& blk : prog.soc_blocks) {
    std::vector<const AffineExpr*> rows;
    for (const auto& r : blk.rows) rows.push_back(&r);
    add_block(sf, true, rows, h);
  }
  sf.h = Eigen::Map<RVec>(h.data(), static_cast<int>(h.size()));
  return sf;
}

// ---------------------------------------------------------------------------
// Cone arithmetic
// ---------------------------------------------------------------------------

/// Distance of u from the cone boundary along e: u0 - ||u1|| (or u for orthant).
double cone_margin(const Block& blk, const RVec& u) {
  if (!blk.soc) return u(blk.offset);
  return u(blk.offset) - u.segment(blk.offset + 1, blk.dim - 1).norm();
}

double min_margin(const StandardForm& sf, const RVec& u) {
  double v = std::numeric_limits<double>::infinity();
  for (const auto& blk : sf.blocks) v = std::min(v, cone_margin(blk, u));
  return v;
}

void add_identity(const StandardForm& sf, RVec& u, double t) {
  for (const auto& blk : sf.blocks) u(blk.offset) += t;
}

RVec identity_element(const StandardForm& sf) {
  RVec e = RVec::Zero(sf.m);
  add_identity(sf, e, 1.0);
  return e;
}

RVec jordan_product(const StandardForm& sf, const RVec& u, const RVec& v) {
  RVec out(sf.m);
  for (const auto& blk : sf.blocks) {
    const int o = blk.offset;
    if (!blk.soc) {
      out(o) = u(o) * v(o);
      continue;
    }
    const int d = blk.dim;
    out(o) = u.segment(o, d).dot(v.segment(o, d));
    out.segment(o + 1, d - 1) = u(o) * v.segment(o + 1, d - 1) + v(o) * u.segment(o + 1, d - 1);
  }
  return out;
}

/// Solves lambda o x = r for x.
RVec jordan_divide(const StandardForm& sf, const RVec& lambda, const RVec& r) {
  RVec out(sf.m);
  for (const auto& blk : sf.blocks) {
    const int o = blk.offset;
    if (!blk.soc) {
      out(o) = r(o) / lambda(o);
      continue;
    }
    const int d = blk.dim;
    const double l0 = lambda(o);
    const auto l1 = lambda.segment(o + 1, d - 1);
    const auto r1 = r.segment(o + 1, d - 1);
    const double det = l0 * l0 - l1.squaredNorm();
    const double x0 = (l0 * r(o) - l1.dot(r1)) / det;
    out(o) = x0;
    out.segment(o + 1, d - 1) = (r1 - x0 * l1) / l0;
  }
  return out;
}

/// Largest alpha with u + alpha du in the cone (u interior); +inf if unbounded.
double max_step_block(const Block& blk, const RVec& u, const RVec& du) {
  const int o = blk.offset;
  if (!blk.soc) return du(o) < 0.0 ? -u(o) / du(o) : std::numeric_limits<double>::infinity();
  const int d = blk.dim;
  const auto u1 = u.segment(o + 1, d - 1);
  const auto d1 = du.segment(o + 1, d - 1);
  // f(a) = (u0 + a d0)^2 - ||u1 + a d1||^2 = qa a^2 + 2 qb a + qc, qc > 0.
  const double qa = du(o) * du(o) - d1.squaredNorm();
  const double qb = u(o) * du(o) - u1.dot(d1);
  const double qc = std::max(u(o) * u(o) - u1.squaredNorm(), 0.0);
  double best = std::numeric_limits<double>::infinity();
  if (du(o) < 0.0) best = -u(o) / du(o);
  const double scale = std::max({std::abs(qa), std::abs(qb), 1e-300});
  if (std::abs(qa) <= 1e-14 * scale) {
    if (qb < 0.0) best = std::min(best, -qc / (2.0 * qb));
    return best;
  }
  const double disc = qb * qb - qa * qc;
  if (disc < 0.0) return best;
  const double sq = std::sqrt(disc);
  const double q = -(qb + std::copysign(sq, qb));
  for (double root : {q / qa, q != 0.0 ? qc / q : std::numeric_limits<double>::infinity()})
    if (root > 0.0) best = std::min(best, root);
  return best;
}

double max_step(const StandardForm& sf, const RVec& u, const RVec& du) {
  double a = std::numeric_limits<double>::infinity();
  for (const auto& blk : sf.blocks) a = std::min(a, max_step_block(blk, u, du));
  return a;
}

// ---------------------------------------------------------------------------
// Nesterov-Todd scaling: W z = W^-1 s = lambda, with W symmetric.
// ---------------------------------------------------------------------------

struct Scaling {
  std::vector<RMat> W;     // per block (1x1 for orthant)
  std::vector<RMat> Winv;
  RVec lambda;

  RVec apply(const StandardForm& sf, const RVec& v, bool inverse) const {
    RVec out(sf.m);
    for (size_t i = 0; i < sf.blocks.size(); ++i) {
      const auto& blk = sf.blocks[i];
      const RMat& M = inverse ? Winv[i] : W[i];
      out.segment(blk.offset, blk.dim) = M * v.segment(blk.offset, blk.dim);
    }
    return out;
  }
};

Scaling identity_scaling(const StandardForm& sf) {
  Scaling sc;
  for (const auto& blk : sf.blocks) {
    sc.W.push_back(RMat::Identity(blk.dim, blk.dim));
    sc.Winv.push_back(RMat::Identity(blk.dim, blk.dim));
  }
  sc.lambda = RVec::Zero(sf.m);
  return sc;
}

Scaling nt_scaling(const StandardForm& sf, const RVec& s, const RVec& z) {
  Scaling sc;
  sc.lambda.resize(sf.m);
  for (const auto& blk : sf.blocks) {
    const int o = blk.offset;
    const int d = blk.dim;
    if (!blk.soc) {
      const double w = std::sqrt(s(o) / z(o));
      sc.W.push_back(RMat::Constant(1, 1, w));
      sc.Winv.push_back(RMat::Constant(1, 1, 1.0 / w));
      sc.lambda(o) = std::sqrt(s(o) * z(o));
      continue;
    }
    NtScaling blk_sc = nt_scaling_block(s.segment(o, d), z.segment(o, d));
    sc.W.push_back(std::move(blk_sc.W));
    sc.Winv.push_back(std::move(blk_sc.W_inv));
    sc.lambda.segment(o, d) = blk_sc.lambda;
  }
  return sc;
}

// ---------------------------------------------------------------------------
// Reduced KKT system
//   [0  A^T  G^T ] [dx]   [r1]
//   [A  0    0   ] [dy] = [r2]
//   [G  0   -W^2 ] [dz]   [r3]
// solved through the normal equations H = G^T W^-2 G.
// ---------------------------------------------------------------------------

class KktSolver {
 public:
  KktSolver(const StandardForm& sf, const Scaling& sc) : sf_(sf), sc_(sc) {
    const int n = sf.n;
    H_ = RMat::Zero(n, n);
    for (size_t i = 0; i < sf.blocks.size(); ++i) {
      const auto& blk = sf.blocks[i];
      if (blk.cols.empty()) continue;
      const RMat B = sc.Winv[i] * blk.G;
      const RMat BtB = B.transpose() * B;
      for (size_t a = 0; a < blk.cols.size(); ++a)
        for (size_t b = 0; b < blk.cols.size(); ++b) H_(blk.cols[a], blk.cols[b]) += BtB(a, b);
    }
    const double diag_max = n > 0 ? std::max(H_.diagonal().cwiseAbs().maxCoeff(), 1.0) : 1.0;
    reg_ = 1e-13 * diag_max;
    if (sf.p == 0) {
      llt_.compute(H_ + reg_ * RMat::Identity(n, n));
      use_llt_ = llt_.info() == Eigen::Success;
      if (!use_llt_) lu_.compute(H_ + reg_ * RMat::Identity(n, n));
    } else {
      const int p = sf.p;
      RMat M = RMat::Zero(n + p, n + p);
      M.topLeftCorner(n, n) = H_ + reg_ * RMat::Identity(n, n);
      M.topRightCorner(n, p) = sf.A.transpose();
      M.bottomLeftCorner(p, n) = sf.A;
      M.bottomRightCorner(p, p) = -reg_ * RMat::Identity(p, p);
      lu_.compute(M);
    }
  }

  void solve(const RVec& r1, const RVec& r2, const RVec& r3, RVec& dx, RVec& dy, RVec& dz) const {
    reduced_solve(r1, r2, r3, dx, dy, dz);
    // Iterative refinement against the full system.
    const double scale = 1.0 + r1.norm() + r2.norm() + r3.norm();
    double last = std::numeric_limits<double>::infinity();
    for (int it = 0; it < 5; ++it) {
      const RVec e1 = r1 - (sf_.p ? RVec(sf_.A.transpose() * dy) : RVec::Zero(sf_.n)) - sf_.Gt_times(dz);
      const RVec e2 = sf_.p ? RVec(r2 - sf_.A * dx) : RVec();
      const RVec e3 = r3 - sf_.G_times(dx) + sc_.apply(sf_, sc_.apply(sf_, dz, false), false);
      const double err = std::sqrt(e1.squaredNorm() + e2.squaredNorm() + e3.squaredNorm());
      if (err <= 1e-15 * scale || err >= 0.5 * last) break;
      last = err;
      RVec cx, cy, cz;
      reduced_solve(e1, e2, e3, cx, cy, cz);
      dx += cx;
      if (sf_.p) dy += cy;
      dz += cz;
    }
  }

 private:
  void reduced_solve(const RVec& r1, const RVec& r2, const RVec& r3, RVec& dx, RVec& dy, RVec& dz) const {
    const int n = sf_.n;
    const int p = sf_.p;
    const RVec W2inv_r3 = sc_.apply(sf_, sc_.apply(sf_, r3, true), true);
    RVec rhs(n + p);
    rhs.head(n) = r1 + sf_.Gt_times(W2inv_r3);
    rhs.tail(p) = r2;
    RVec sol = base_solve(rhs);
    for (int it = 0; it < 2; ++it) {
      const RVec res = rhs - apply_reduced(sol);
      if (res.norm() <= 1e-15 * (1.0 + rhs.norm())) break;
      sol += base_solve(res);
    }
    dx = sol.head(n);
    dy = sol.tail(p);
    dz = sc_.apply(sf_, sc_.apply(sf_, sf_.G_times(dx) - r3, true), true);
  }

  RVec base_solve(const RVec& rhs) const {
    if (sf_.p == 0 && use_llt_) return llt_.solve(rhs);
    return lu_.solve(rhs);
  }

  RVec apply_reduced(const RVec& v) const {
    const int n = sf_.n;
    const int p = sf_.p;
    RVec out(n + p);
    out.head(n) = H_ * v.head(n);
    if (p > 0) {
      out.head(n) += sf_.A.transpose() * v.tail(p);
      out.tail(p) = sf_.A * v.head(n);
    }
    return out;
  }

  const StandardForm& sf_;
  const Scaling& sc_;
  RMat H_;
  double reg_ = 0.0;
  bool use_llt_ = false;
  Eigen::LLT<RMat> llt_;
  Eigen::PartialPivLU<RMat> lu_;
};

double cone_violation(const StandardForm& sf, const RVec& x) {
  const RVec s = sf.h - sf.G_times(x);
  double v = 0.0;
  for (const auto& blk : sf.blocks) v = std::max(v, -cone_margin(blk, s));
  if (sf.p > 0) v = std::max(v, (sf.A * x - sf.b).cwiseAbs().maxCoeff());
  return v;
}

bool all_finite(const RVec& v) { return v.allFinite(); }

SolveResult solve_unconstrained(const StandardForm& sf, const SolverSettings& st) {
  // No cone rows: only A x = b remains.
  SolveResult res;
  res.x = RVec::Zero(sf.n);
  if (sf.p > 0) {
    Eigen::CompleteOrthogonalDecomposition<RMat> cod(sf.A);
    res.x = cod.solve(sf.b);
    if ((sf.A * res.x - sf.b).norm() > st.tol_feas * std::max(1.0, sf.b.norm())) {
      res.status = SolveStatus::Infeasible;
      return res;
    }
    // c must lie in the row space of A for a finite optimum.
    Eigen::CompleteOrthogonalDecomposition<RMat> cod_t(sf.A.transpose());
    const RVec y = cod_t.solve(sf.c);
    if ((sf.A.transpose() * y - sf.c).norm() > st.tol_feas * std::max(1.0, sf.c.norm())) {
      res.status = SolveStatus::Unbounded;
      return res;
    }
  } else if (sf.c.norm() > 0.0) {
    res.status = SolveStatus::Unbounded;
    return res;
  }
  res.objective = sf.c.dot(res.x);
  res.status = sf.c.norm() > 0.0 ? SolveStatus::Optimal : SolveStatus::Feasible;
  return res;
}

}  // namespace

SolveResult solve(const ConeProgram& program, const SolverSettings& st) {
  program.validate();
  const StandardForm sf = compile(program);
  if (sf.m == 0) return solve_unconstrained(sf, st);

  const bool feasibility_only = !program.has_objective();
  const int n = sf.n;
  const double degree = static_cast<double>(sf.blocks.size());
  const double b_scale = std::max(1.0, sf.b.size() ? sf.b.norm() : 0.0);
  const double h_scale = std::max(1.0, sf.h.norm());
  const double c_scale = std::max(1.0, sf.c.norm());

  // Initial point: least-squares primal and least-norm dual, shifted into the cone.
  RVec x, y, z, s;
  {
    const Scaling id = identity_scaling(sf);
    const KktSolver kkt(sf, id);
    RVec dz;
    kkt.solve(RVec::Zero(n), sf.b, sf.h, x, y, dz);
    s = -dz;
    RVec dx;
    kkt.solve(-sf.c, RVec::Zero(sf.p), RVec::Zero(sf.m), dx, y, z);
    const double ts = -min_margin(sf, s);
    if (ts >= -1e-8 * std::max(1.0, s.norm())) add_identity(sf, s, 1.0 + ts);
    const double tz = -min_margin(sf, z);
    if (tz >= -1e-8 * std::max(1.0, z.norm())) add_identity(sf, z, 1.0 + tz);
  }
  double tau = 1.0;
  double kappa = 1.0;

  SolveResult result;
  result.x = x;
  const RVec e = identity_element(sf);

  // Best primal-feasible iterate with loose dual and gap accuracy, returned
  // when the iteration stalls before reaching full accuracy.
  std::optional<SolveResult> inaccurate;
  double inaccurate_score = std::numeric_limits<double>::infinity();
  const double loose_dual = std::sqrt(st.tol_feas);
  const double loose_gap = std::sqrt(st.tol_gap);
  auto stalled = [&](int iter) {
    if (inaccurate) return *inaccurate;
    result.status = SolveStatus::NumericalFailure;
    result.iterations = iter;
    return result;
  };

  for (int iter = 0;; ++iter) {
    const RVec Gx = sf.G_times(x);
    const RVec Gtz = sf.Gt_times(z);
    const RVec Aty = sf.p ? RVec(sf.A.transpose() * y) : RVec::Zero(n);
    const RVec Ax = sf.p ? RVec(sf.A * x) : RVec();
    const RVec rx = Aty + Gtz + sf.c * tau;
    const RVec ry = sf.p ? RVec(-Ax + sf.b * tau) : RVec();
    const RVec rz = -Gx + sf.h * tau - s;
    const double hz_by = sf.h.dot(z) + (sf.p ? sf.b.dot(y) : 0.0);
    const double cx = sf.c.dot(x);
    const double rt = -cx - hz_by - kappa;

    if (!all_finite(x) || !all_finite(z) || !all_finite(s) || !std::isfinite(tau) || !std::isfinite(kappa))
      return stalled(iter);

    const double pres =
        std::max(sf.p ? ry.norm() / b_scale : 0.0, rz.norm() / h_scale) / tau;
    const double dres = rx.norm() / c_scale / tau;
    const double gap = s.dot(z) / (tau * tau);
    const double pcost = cx / tau;
    const double dcost = -hz_by / tau;
    double relgap = std::numeric_limits<double>::infinity();
    if (pcost < 0.0) relgap = gap / -pcost;
    else if (dcost > 0.0) relgap = gap / dcost;

    const RVec x_hat = x / tau;
    result.x = x_hat;
    result.iterations = iter;
    result.objective = pcost;
    result.residuals = {pres, dres, gap, 0.0};

    if (feasibility_only) {
      if (pres < st.tol_feas && cone_violation(sf, x_hat) <= st.tol_feas) {
        result.status = SolveStatus::Feasible;
        return result;
      }
    } else if (pres < st.tol_feas && dres < st.tol_feas && (gap < st.tol_gap || relgap < st.tol_gap) &&
               cone_violation(sf, x_hat) <= st.tol_feas) {
      result.status = SolveStatus::Optimal;
      return result;
    }
    if (!feasibility_only && pres < st.tol_feas && dres < loose_dual &&
        (gap < loose_gap || relgap < loose_gap) && cone_violation(sf, x_hat) <= st.tol_feas) {
      const double score = std::max(dres, std::min(gap, relgap));
      if (score < inaccurate_score) {
        inaccurate_score = score;
        inaccurate = result;
        inaccurate->status = SolveStatus::Optimal;
      }
    }

    if (hz_by < 0.0) {
      const double cert = (Aty + Gtz).norm() / -hz_by;
      if (cert < st.tol_feas) {
        result.status = SolveStatus::Infeasible;
        result.residuals.certificate = cert;
        return result;
      }
    }
    if (cx < 0.0) {
      RVec primal_ray(sf.m + sf.p);
      primal_ray.head(sf.m) = Gx + s;
      if (sf.p) primal_ray.tail(sf.p) = Ax;
      if (primal_ray.norm() / -cx < st.tol_feas) {
        result.status = SolveStatus::Unbounded;
        return result;
      }
    }
    if (iter >= st.max_iters) return stalled(iter);

    const Scaling sc = nt_scaling(sf, s, z);
    const KktSolver kkt(sf, sc);
    const RVec& lambda = sc.lambda;

    RVec x1, y1, z1;
    kkt.solve(-sf.c, sf.b, sf.h, x1, y1, z1);
    const double denom_base = sf.c.dot(x1) + (sf.p ? sf.b.dot(y1) : 0.0) + sf.h.dot(z1);

    struct Direction {
      RVec dx, dy, dz, ds;
      double dtau = 0.0, dkappa = 0.0;
    };
    auto direction = [&](double eta, const RVec& rs, double rk) {
      Direction d;
      const RVec lam_div = jordan_divide(sf, lambda, rs);
      RVec x2, y2, z2;
      kkt.solve(-eta * rx, sf.p ? RVec(eta * ry) : RVec(), eta * rz - sc.apply(sf, lam_div, false), x2, y2,
                z2);
      const double num = -eta * rt + rk / tau + sf.c.dot(x2) + (sf.p ? sf.b.dot(y2) : 0.0) + sf.h.dot(z2);
      d.dtau = num / (kappa / tau - denom_base);
      d.dx = x2 + d.dtau * x1;
      d.dy = sf.p ? RVec(y2 + d.dtau * y1) : RVec();
      d.dz = z2 + d.dtau * z1;
      d.ds = eta * rz + d.dtau * sf.h - sf.G_times(d.dx);
      d.dkappa = (rk - kappa * d.dtau) / tau;
      return d;
    };
    auto step_to_boundary = [&](const Direction& d) {
      double a = std::min(max_step(sf, s, d.ds), max_step(sf, z, d.dz));
      if (d.dtau < 0.0) a = std::min(a, -tau / d.dtau);
      if (d.dkappa < 0.0) a = std::min(a, -kappa / d.dkappa);
      return a;
    };

    const double mu = (s.dot(z) + tau * kappa) / (degree + 1.0);

    // Predictor.
    const RVec lam_sq = jordan_product(sf, lambda, lambda);
    const Direction aff = direction(1.0, -lam_sq, -tau * kappa);
    const double alpha_aff = std::min(1.0, step_to_boundary(aff));
    const double sigma = std::clamp(std::pow(1.0 - alpha_aff, 3), 0.0, 1.0);

    // Corrector with Mehrotra second-order term.
    const RVec ds_scaled = sc.apply(sf, aff.ds, true);
    const RVec dz_scaled = sc.apply(sf, aff.dz, false);
    const RVec rs = -lam_sq - jordan_product(sf, ds_scaled, dz_scaled) + sigma * mu * e;
    const double rk = -tau * kappa - aff.dtau * aff.dkappa + sigma * mu;
    const Direction comb = direction(1.0 - sigma, rs, rk);
    const double alpha = std::min(1.0, 0.99 * step_to_boundary(comb));
    if (!(alpha > 1e-10)) return stalled(iter);

    x += alpha * comb.dx;
    if (sf.p) y += alpha * comb.dy;
    z += alpha * comb.dz;
    s += alpha * comb.ds;
    tau += alpha * comb.dtau;
    kappa += alpha * comb.dkappa;
  }
}

// ---------------------------------------------------------------------------
// Text format
// ---------------------------------------------------------------------------

namespace {

void write_terms(std::ostream& out, const std::vector<LinearTerm>& terms) {
  out << terms.size();
  for (const auto& t : terms) out << ' ' << t.var << ' ' << t.coef;
}

std::vector<LinearTerm> read_terms(std::istream& in) {
  size_t n = 0;
  in >> n;
  std::vector<LinearTerm> terms(n);
  for (auto& t : terms) in >> t.var >> t.coef;
  return terms;
}

void expect(std::istream& in, const std::string& word) {
  std::string got;
  in >> got;
  if (got != word) throw Error("cone program text: expected '" + word + "', got '" + got + "'");
}

double read_number(std::istream& in) {
  std::string tok;
  in >> tok;
  try {
    return std::stod(tok);
  } catch (const std::exception&) {
    throw Error("cone program text: bad number '" + tok + "'");
  }
}

}  // namespace

void write_text(const ConeProgram& p, std::ostream& out) {
  const auto old_precision = out.precision();
  out << std::setprecision(17);
  out << "CONEPROGRAM 1\n";
  out << "n_vars " << p.n_vars << '\n';
  out << "objective";
  for (int i = 0; i < p.n_vars; ++i) out << ' ' << (p.objective.empty() ? 0.0 : p.objective[i]);
  out << "\nbounds\n";
  for (int i = 0; i < p.n_vars; ++i) out << p.lower[i] << ' ' << p.upper[i] << '\n';
  out << "equalities " << p.equalities.size() << '\n';
  for (const auto& e : p.equalities) {
    write_terms(out, e.terms);
    out << ' ' << e.rhs << '\n';
  }
  out << "inequalities " << p.inequalities.size() << '\n';
  for (const auto& e : p.inequalities) {
    write_terms(out, e.terms);
    out << ' ' << e.constant << '\n';
  }
  out << "soc_blocks " << p.soc_blocks.size() << '\n';
  for (const auto& b : p.soc_blocks) {
    out << "block " << b.rows.size() << '\n';
    for (const auto& r : b.rows) {
      write_terms(out, r.terms);
      out << ' ' << r.constant << '\n';
    }
  }
  out << "end\n";
  out.precision(old_precision);
}

ConeProgram read_text(std::istream& in) {
  expect(in, "CONEPROGRAM");
  int version = 0;
  in >> version;
  if (version != 1) throw Error("cone program text: unsupported version " + std::to_string(version));
  ConeProgram p;
  expect(in, "n_vars");
  in >> p.n_vars;
  if (!in || p.n_vars < 0) throw Error("cone program text: bad n_vars");
  expect(in, "objective");
  p.objective.resize(p.n_vars);
  for (auto& c : p.objective) c = read_number(in);
  if (!p.has_objective()) p.objective.clear();
  expect(in, "bounds");
  p.lower.resize(p.n_vars);
  p.upper.resize(p.n_vars);
  for (int i = 0; i < p.n_vars; ++i) {
    p.lower[i] = read_number(in);
    p.upper[i] = read_number(in);
  }
  size_t count = 0;
  expect(in, "equalities");
  in >> count;
  p.equalities.resize(count);
  for (auto& e : p.equalities) {
    e.terms = read_terms(in);
    e.rhs = read_number(in);
  }
  expect(in, "inequalities");
  in >> count;
  p.inequalities.resize(count);
  for (auto& e : p.inequalities) {
    e.terms = read_terms(in);
    e.constant = read_number(in);
  }
  expect(in, "soc_blocks");
  in >> count;
  p.soc_blocks.resize(count);
  for (auto& b : p.soc_blocks) {
    expect(in, "block");
    size_t rows = 0;
    in >> rows;
    b.rows.resize(rows);
    for (auto& r : b.rows) {
      r.terms = read_terms(in);
      r.constant = read_number(in);
    }
  }
  expect(in, "end");
  if (!in) throw Error("cone program text: truncated input");
  p.validate();
  return p;
}

}  // namespace cfmimo::socp
