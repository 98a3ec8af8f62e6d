#include "ctent/tent.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

#include <Eigen/Eigenvalues>

#include "ctent/builder.hpp"
#include "ctent/objective.hpp"
#include "ctent/relaxation.hpp"

namespace ctent {

bool TentProgram::in_domain(const Eigen::VectorXd& x, double tol) const {
  if (x.size() != n) return false;
  if (domain == Domain::zero_one) return x.minCoeff() >= -tol && x.maxCoeff() <= 1.0 + tol;
  if (x.cwiseAbs().maxCoeff() > 1.0 + tol) return false;
  const double s = x.sum();
  // an equality window is met only up to the accuracy of the caller's point
  const double wtol = l == u ? std::max(tol, 1e-6) : tol * n;
  return s >= l - wtol && s <= u + wtol;
}

double TentProgram::interior_margin(const Eigen::VectorXd& x) const {
  if (domain == Domain::zero_one) return std::min(x.minCoeff(), 1.0 - x.maxCoeff());
  double m = 1.0 - x.cwiseAbs().maxCoeff();
  if (l < u) m = std::min({m, (u - x.sum()) / n, (x.sum() - l) / n});
  return m;
}

namespace {


void set_epsilon(TentEvaluation& ev, const TentProgram& tp, const Eigen::VectorXd& x, double tol) {
  const double eps = ev.certificate.dual_value(tp, x) - ev.value;
  if (eps < -10.0 * tol * (1.0 + std::abs(ev.value)))
    ev.warnings.push_back("negative duality gap " + std::to_string(eps) + " clamped to zero");
  ev.epsilon = std::max(eps, 0.0);
}

TentEvaluation solve_at(const TentProgram& tp, const Eigen::VectorXd& x, const SolverOptions& opts) {
  TentEvaluation ev;
  const ConicProgram p = tp.program.at(x);
  const ConicSolution sol = solve(p, opts);
  ev.status = sol.status;
  if (sol.status == SolveStatus::infeasible) {
    ev.value = -std::numeric_limits<double>::infinity();
    return ev;
  }
  ev.value = sol.objective_value;
  if (sol.dual.size() != p.rhs.size()) return ev;

  const ConicProgram& base = tp.program.base;
  const SparseRows& R = tp.program.rhs_param;
  const int psd_len = tp.psd_order * (tp.psd_order + 1) / 2;
  TentCertificate& c = ev.certificate;
  c.lambda = sol.dual;
  c.lambda.segment(tp.psd_row, psd_len).setZero();
  const Eigen::VectorXd z_psd = sol.dual - c.lambda;
  c.alpha = base.offset + base.rhs.dot(z_psd);
  c.w = 0.5 * (R.transpose() * z_psd);
  c.b_lambda = base.rhs.dot(c.lambda);
  c.A_lambda = -(R.transpose() * c.lambda);
  ev.supergradient = c.supergradient(tp);
  set_epsilon(ev, tp, x, opts.tol);
  return ev;
}


void finish_bookkeeping(TentProgram& tp, const ProgramBuilder& b, int psd_row, int psd_order) {
  tp.program = b.build();
  tp.psd_row = psd_row;
  tp.psd_order = psd_order;
  tp.linear = tp.program.objective_param;
  tp.x_rows.clear();
  const SparseRows& R = tp.program.rhs_param;
  for (int r = 0; r < R.rows(); ++r)
    if (SparseRows::InnerIterator(R, r)) tp.x_rows.push_back(r);
}

// A value of e'x strictly inside the window and strictly inside (-n, n).
std::optional<double> interior_sum(int n, int l, int u) {
  if (l == u) return std::abs(l) < n ? std::optional<double>(l) : std::nullopt;
  const double lo = std::max(l, -n), hi = std::min(u, n);
  if (lo >= hi) return std::nullopt;
  return 0.5 * (lo + hi);
}

double ball_value(const Eigen::MatrixXd& C, const Eigen::VectorXd& c, const SolverOptions& opts, SolveStatus& status) {
  const int q = static_cast<int>(c.size());
  ProgramBuilder b;
  const int uv = b.add_variables(q);
  const int Uv = b.add_variables(q * (q + 1) / 2);
  auto uu = [&](int j) { return LinExpr::var(uv + j); };
  auto UU = [&](int i, int j) { return LinExpr::var(Uv + svec_index(i, j, q)); };
  add_gball(b, q, uu, UU);
  LinExpr obj;
  for (int j = 0; j < q; ++j) {
    obj += 2.0 * c(j) * uu(j) + C(j, j) * UU(j, j);
    for (int i = 0; i < j; ++i) obj += 2.0 * C(j, i) * UU(j, i);
  }
  b.set_objective(obj, Sense::maximize);
  const ConicSolution sol = solve(b.build().base, opts);
  status = sol.status;
  return sol.objective_value;
}

std::pair<SolveStatus, double> face_value_signed(const RobustQuadraticInstance& inst, bool soc_cuts,
                                                 const Eigen::VectorXd& x, const SolverOptions& opts) {
  const int n = inst.n;
  Fixing fixing;
  for (int i = 0; i < n; ++i)
    if (1.0 - std::abs(x(i)) <= kFaceTol) fixing.values[i] = x(i) > 0.0 ? 1 : -1;
  const ReducedInstance r = reduce(inst, fixing);
  RobustQuadraticInstance red = r.inst;
  const double inf = std::numeric_limits<double>::infinity();
  if (r.window_empty) return {SolveStatus::infeasible, -inf};
  if (red.n == 0) {
    SolveStatus status;
    const double v = ball_value(red.C, red.c, opts, status);
    return {status, r.constant + v};
  }
  Eigen::VectorXd xf(red.n);
  for (int k = 0; k < red.n; ++k) xf(k) = x(r.free[k]);
  // an active window bound pins e'x on the face
  if (red.l < red.u) {
    if (red.u - xf.sum() <= kFaceTol * n) red.l = red.u;
    else if (xf.sum() - red.l <= kFaceTol * n) red.u = red.l;
  }
  if (!window_feasible(red.n, red.l, red.u)) return {SolveStatus::infeasible, -inf};
  const TentProgram sub = build_tent(red, soc_cuts);
  if (sub.interior_margin(xf) <= kFaceTol) return {SolveStatus::numerical_failure, 0.0};
  const TentEvaluation ev = solve_at(sub, xf, opts);
  if (ev.status == SolveStatus::infeasible) return {ev.status, -inf};
  return {ev.status, r.constant + ev.value};
}

}  // namespace

TentProgram build_tent(const RobustQuadraticInstance& inst, bool soc_cuts) {
  check_instance(inst);
  const int n = inst.n, q = inst.q;
  const WindowChart chart(n, inst.l, inst.u, q);
  const int k = chart.dim();

  ProgramBuilder b(n);
  const int uv = b.add_variables(q);
  const int Uv = b.add_variables(q * (q + 1) / 2);
  const int Pv = b.add_variables(k * q);
  const int Xv = b.add_variables(k * (k + 1) / 2);
  auto yhat = [&](int i, int j) -> LinExpr {
    if (i == 0) return 1.0;
    if (j == 0) return i <= q ? LinExpr::var(uv + i - 1) : LinExpr::param(i - q - 1);
    if (i <= q) return LinExpr::var(Uv + svec_index(i - 1, j - 1, q));
    if (j <= q) return LinExpr::var(Pv + (i - q - 1) * q + (j - 1));
    return LinExpr::var(Xv + svec_index(i - q - 1, j - q - 1, k));
  };
  auto uu = [&](int j) { return LinExpr::var(uv + j); };
  auto UU = [&](int i, int j) { return LinExpr::var(Uv + svec_index(i, j, q)); };
  auto psi = [&](int i, int j) { return chart.lifted(q + 1 + i, 1 + j, yhat); };

  const int psd_row = b.add_psd(chart.reduced_order(), yhat);
  add_gx_reduced(b, chart, yhat);
  add_gball(b, q, uu, UU);

  if (soc_cuts) {
    LinExpr sum_x;
    for (int i = 0; i < n; ++i) sum_x += chart.x(i, yhat);
    std::vector<LinExpr> upper(q), lower(q);
    for (int j = 0; j < q; ++j) {
      LinExpr col;
      for (int i = 0; i < n; ++i) col += psi(i, j);
      upper[j] = static_cast<double>(inst.u) * uu(j) - col;
      lower[j] = col - static_cast<double>(inst.l) * uu(j);
    }
    b.add_soc(static_cast<double>(inst.u) - sum_x, upper);
    b.add_soc(sum_x - static_cast<double>(inst.l), lower);
    for (int i = 0; i < n; ++i) {
      std::vector<LinExpr> tail(q);
      for (int j = 0; j < q; ++j) tail[j] = uu(j) + psi(i, j);
      b.add_soc(1.0 + chart.x(i, yhat), tail);
    }
  }

  LinExpr obj;
  for (int i = 0; i < n; ++i) {
    obj += 2.0 * inst.a(i) * chart.x(i, yhat);
    obj += inst.A(i, i) * chart.X(i, i, yhat);
    for (int j = 0; j < i; ++j)
      if (inst.A(i, j) != 0.0) obj += 2.0 * inst.A(i, j) * chart.X(i, j, yhat);
    for (int j = 0; j < q; ++j)
      if (inst.B(j, i) != 0.0) obj += 2.0 * inst.B(j, i) * psi(i, j);
  }
  for (int j = 0; j < q; ++j) {
    obj += 2.0 * inst.c(j) * uu(j);
    obj += inst.C(j, j) * UU(j, j);
    for (int i = 0; i < j; ++i) obj += 2.0 * inst.C(j, i) * UU(j, i);
  }
  b.set_objective(obj, Sense::maximize);

  TentProgram tp;
  const auto mid = interior_sum(n, inst.l, inst.u);
  if (mid) tp.center = Eigen::VectorXd::Constant(n, *mid / n);
  tp.face_value = [inst, soc_cuts](const Eigen::VectorXd& x, const SolverOptions& opts) {
    return face_value_signed(inst, soc_cuts, x, opts);
  };
  tp.domain = TentProgram::Domain::signed_window;
  tp.n = n;
  tp.q = q;
  tp.l = inst.l;
  tp.u = inst.u;
  tp.soc_cuts = soc_cuts;
  finish_bookkeeping(tp, b, psd_row, chart.reduced_order());
  return tp;
}

Eigen::VectorXd TentCertificate::supergradient(const TentProgram& tp) const {
  return tp.linear + 2.0 * w - A_lambda;
}

double TentCertificate::dual_value(const TentProgram& tp, const Eigen::VectorXd& x) const {
  return alpha + b_lambda + x.dot(supergradient(tp));
}


TentEvaluation evaluate_tent(const TentProgram& tp, const Eigen::VectorXd& x, const SolverOptions& opts) {
  if (x.size() != tp.n) throw std::invalid_argument("evaluate_tent: x has wrong size");
  TentEvaluation ev;
  if (!tp.in_domain(x)) {
    ev.status = SolveStatus::infeasible;
    ev.value = -std::numeric_limits<double>::infinity();
    return ev;
  }
  if (!tp.face_value || tp.interior_margin(x) > kFaceTol) return solve_at(tp, x, opts);

  const auto [status, value] = tp.face_value(x, opts);
  ev.status = status;
  ev.value = value;
  if (status != SolveStatus::optimal) return ev;
  TentCertificate& c = ev.certificate;
  if (!tp.center) {
    // dom g is {x}: every vector is a supergradient
    c.w = Eigen::VectorXd::Zero(tp.n);
    c.A_lambda = Eigen::VectorXd::Zero(tp.n);
    c.lambda = Eigen::VectorXd::Zero(tp.program.base.rhs.size());
    c.alpha = value - x.dot(tp.linear);
    ev.supergradient = c.supergradient(tp);
    return ev;
  }
  for (const double t : {1e-4, 1e-3, 1e-2}) {
    const TentEvaluation inner = solve_at(tp, x + t * (*tp.center - x), opts);
    if (!inner.finite()) continue;
    c = inner.certificate;
    ev.supergradient = inner.supergradient;
    set_epsilon(ev, tp, x, opts.tol);
    return ev;
  }
  ev.status = SolveStatus::numerical_failure;
  ev.warnings.push_back("no certificate from the interior near x");
  return ev;
}

ClassicalTent::ClassicalTent(const RobustQuadraticInstance& inst, Eigen::VectorXd lambda)
    : inst_(&inst), lambda_(std::move(lambda)) {
  check_instance(inst);
  if (lambda_.size() != inst.n) throw std::invalid_argument("ClassicalTent: lambda has wrong size");
  if (inst.B.cwiseAbs().maxCoeff() > 0.0) throw std::invalid_argument("ClassicalTent: B must vanish");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ec(inst.C, Eigen::EigenvaluesOnly);
  const double tol = 1e-10 * (1.0 + inst.C.cwiseAbs().maxCoeff());
  if (ec.eigenvalues().maxCoeff() > tol)
    throw std::invalid_argument("ClassicalTent: C must be negative semidefinite");
  const Eigen::MatrixXd Q = inst.A - Eigen::MatrixXd(lambda_.asDiagonal());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eq(Q, Eigen::EigenvaluesOnly);
  if (eq.eigenvalues().maxCoeff() > 1e-10 * (1.0 + Q.cwiseAbs().maxCoeff()))
    throw std::invalid_argument("ClassicalTent: A - diag(lambda) is not negative semidefinite");
  inner_ = TrustRegionOracle(inst.C).maximize(inst.c).value;
}

double ClassicalTent::value(const Eigen::VectorXd& x) const {
  const RobustQuadraticInstance& in = *inst_;
  const double f = x.dot(in.A * x) + 2.0 * in.a.dot(x) + inner_;
  return f - lambda_.dot((x.array().square() - 1.0).matrix());
}

Eigen::VectorXd ClassicalTent::default_multipliers(const RobustQuadraticInstance& inst) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(inst.A, Eigen::EigenvaluesOnly);
  return Eigen::VectorXd::Constant(inst.n, es.eigenvalues().maxCoeff() + 1.0);
}

double classical_tent_value(const ClassicalTent& ct, const Eigen::VectorXd& x) { return ct.value(x); }

}  // namespace ctent
