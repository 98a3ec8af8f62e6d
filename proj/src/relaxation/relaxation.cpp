#include "ctent/relaxation.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>

#include "ctent/builder.hpp"
#include "ctent/lifted_sets.hpp"
#include "ctent/objective.hpp"

namespace ctent {

int Fixing::sum() const {
  int s = 0;
  for (const auto& [i, v] : values) s += v;
  return s;
}

Fixing Fixing::with(int i, int v) const {
  Fixing f = *this;
  f.values[i] = v;
  return f;
}

Eigen::VectorXd ReducedInstance::embed(const Eigen::VectorXd& x_free, const Fixing& fixing, int n) const {
  Eigen::VectorXd x(n);
  for (const auto& [i, v] : fixing.values) x(i) = v;
  for (std::size_t k = 0; k < free.size(); ++k) x(free[k]) = x_free(static_cast<Eigen::Index>(k));
  return x;
}

ReducedInstance reduce(const RobustQuadraticInstance& inst, const Fixing& fixing) {
  const int n = inst.n;
  Eigen::VectorXd xf = Eigen::VectorXd::Zero(n);  // fixed values, zero on free coordinates
  for (const auto& [i, v] : fixing.values) {
    if (i < 0 || i >= n) throw std::invalid_argument("fixing index " + std::to_string(i) + " out of range");
    if (v != 1 && v != -1) throw std::invalid_argument("fixing value must be -1 or +1");
    xf(i) = v;
  }
  ReducedInstance r;
  for (int i = 0; i < n; ++i)
    if (!fixing.fixed(i)) r.free.push_back(i);
  const int m = static_cast<int>(r.free.size());
  const int s = fixing.sum();

  RobustQuadraticInstance& red = r.inst;
  red.n = m;
  red.q = inst.q;
  red.C = inst.C;
  red.l = inst.l - s;
  red.u = inst.u - s;
  red.seed = inst.seed;
  red.A.resize(m, m);
  red.a.resize(m);
  red.B.resize(inst.q, m);
  const Eigen::VectorXd Axf = inst.A * xf;
  for (int k = 0; k < m; ++k) {
    const int i = r.free[k];
    for (int kk = 0; kk < m; ++kk) red.A(k, kk) = inst.A(i, r.free[kk]);
    red.a(k) = inst.a(i) + Axf(i);
    red.B.col(k) = inst.B.col(i);
  }
  red.c = inst.c + inst.B * xf;
  r.constant = xf.dot(Axf) + 2.0 * inst.a.dot(xf);
  r.window_empty = m > 0 ? !window_feasible(m, red.l, red.u) : (s < inst.l || s > inst.u);
  return r;
}

RelaxationResult lower_bound(const RobustQuadraticInstance& inst, const Fixing& fixing, const SolverOptions& opts) {
  const int n = inst.n;
  const ReducedInstance r = reduce(inst, fixing);
  RelaxationResult out;
  if (r.window_empty) {
    out.status = SolveStatus::infeasible;
    out.bound = std::numeric_limits<double>::infinity();
    return out;
  }
  const RobustQuadraticInstance& red = r.inst;
  const int m = red.n;

  // A single point left: the relaxation is exact there.
  std::optional<std::pair<int, int>> window;
  if (m > 0) window = achievable_window(m, red.l, red.u);
  if (!window || (window->first == window->second && std::abs(window->first) == m)) {
    const double sign = window && window->first > 0 ? 1.0 : -1.0;
    out.x_rel = r.embed(Eigen::VectorXd::Constant(m, sign), fixing, n);
    out.X_rel = out.x_rel * out.x_rel.transpose();
    out.bound = evaluate_f_oracle(inst, out.x_rel).value;
    out.status = SolveStatus::optimal;
    return out;
  }

  const WindowChart chart(m, red.l, red.u);
  const int k = chart.dim();
  ProgramBuilder b;
  const int xh = b.add_variables(k);
  const int Xh = b.add_variables(k * (k + 1) / 2);
  const int alpha = b.add_variable();
  const int lambda = b.add_variable();
  auto yhat = [&](int i, int j) -> LinExpr {
    if (i == 0) return 1.0;
    if (j == 0) return LinExpr::var(xh + i - 1);
    return LinExpr::var(Xh + svec_index(i - 1, j - 1, k));
  };
  add_gx_reduced(b, chart, yhat);
  std::vector<LinExpr> xe(m);
  for (int i = 0; i < m; ++i) xe[i] = chart.x(i, yhat);
  b.add_psd(red.q + 1, [&](int i, int j) -> LinExpr {
    if (i == 0) return LinExpr::var(alpha);
    if (j == 0) {
      LinExpr e(red.c(i - 1));
      for (int t = 0; t < m; ++t) e += red.B(i - 1, t) * xe[t];
      return e;
    }
    LinExpr e(-red.C(i - 1, j - 1));
    if (i == j) e -= LinExpr::var(lambda);
    return e;
  });
  b.add_nonneg({-LinExpr::var(lambda)});
  LinExpr obj = LinExpr::var(alpha) - LinExpr::var(lambda) + r.constant;
  for (int i = 0; i < m; ++i) {
    obj += 2.0 * red.a(i) * xe[i];
    obj += red.A(i, i) * chart.X(i, i, yhat);
    for (int j = 0; j < i; ++j) obj += 2.0 * red.A(i, j) * chart.X(i, j, yhat);
  }
  b.set_objective(obj, Sense::minimize);

  const ConicSolution sol = solve(b.build().base, opts);
  out.status = sol.status;
  if (sol.status == SolveStatus::infeasible) {
    out.bound = std::numeric_limits<double>::infinity();
    return out;
  }
  out.bound = sol.objective_value;
  // read x and X back through the chart
  auto value = [&](const LinExpr& e) { return e.evaluate(sol.primal); };
  Eigen::VectorXd xr(m);
  for (int i = 0; i < m; ++i) xr(i) = value(xe[i]);
  out.x_rel = r.embed(xr, fixing, n);
  // rows touching fixed coordinates are rank one
  out.X_rel = out.x_rel * out.x_rel.transpose();
  for (int i = 0; i < m; ++i)
    for (int j = 0; j <= i; ++j) {
      const double v = value(chart.X(i, j, yhat));
      out.X_rel(r.free[i], r.free[j]) = v;
      out.X_rel(r.free[j], r.free[i]) = v;
    }
  return out;
}

}  // namespace ctent
