#include "ctent/lifted_sets.hpp"

#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "ctent/instance.hpp"

namespace ctent {

GBallBlock add_gball(ProgramBuilder& b, int q, const VecExpr& u, const MatExpr& U) {
  if (q < 1) throw std::invalid_argument("add_gball: q must be >= 1");
  GBallBlock blk;
  blk.q = q;
  blk.psd_row = b.add_psd(q + 1, [&](int i, int j) -> LinExpr {
    if (i == 0) return 1.0;
    if (j == 0) return u(i - 1);
    return U(i - 1, j - 1);
  });
  LinExpr trace(1.0);
  for (int i = 0; i < q; ++i) trace -= U(i, i);
  blk.trace_row = b.add_nonneg({trace});
  return blk;
}

GXBlock add_gx(ProgramBuilder& b, int n, int l, int u, const VecExpr& x, const MatExpr& X) {
  if (!window_feasible(n, l, u))
    throw std::invalid_argument("add_gx: window [" + std::to_string(l) + ", " + std::to_string(u) +
                                "] has no achievable e'x for n = " + std::to_string(n));
  GXBlock blk;
  blk.n = n;
  blk.l = l;
  blk.u = u;
  blk.s_var = b.add_variables(2);
  blk.v_var = b.add_variables(2 * n);
  blk.S_var = b.add_variables(3);
  auto s = [&](int k) { return LinExpr::var(blk.s_var + k); };
  auto V = [&](int i, int k) { return LinExpr::var(blk.v_var + 2 * i + k); };
  auto S = [&](int i, int j) { return LinExpr::var(blk.S_var + svec_index(i, j, 2)); };

  blk.psd_row = b.add_psd(n + 3, [&](int i, int j) -> LinExpr {
    if (i == 0) return 1.0;
    if (j == 0) return i <= n ? x(i - 1) : s(i - n - 1);
    if (i <= n) return X(i - 1, j - 1);
    if (j <= n) return V(j - 1, i - n - 1);
    return S(i - n - 1, j - n - 1);
  });

  LinExpr sum_x, sum_X, sum_v0, sum_v1;
  for (int i = 0; i < n; ++i) {
    sum_x += x(i);
    sum_v0 += V(i, 0);
    sum_v1 += V(i, 1);
    sum_X += X(i, i);
    for (int j = 0; j < i; ++j) sum_X += 2.0 * X(i, j);
  }
  blk.window_row = b.add_zero({sum_x + s(0) - static_cast<double>(u), sum_x - s(1) - static_cast<double>(l)});
  blk.quadratic_row = b.add_zero({sum_X + 2.0 * sum_v0 + S(0, 0) - static_cast<double>(u) * u,
                                  sum_X - 2.0 * sum_v1 + S(1, 1) - static_cast<double>(l) * l});
  blk.sign_row = b.add_nonneg({s(0), s(1), S(0, 0), S(1, 0), S(1, 1)});
  std::vector<LinExpr> diag;
  for (int i = 0; i < n; ++i) diag.push_back(X(i, i) - 1.0);
  blk.diag_row = b.add_zero(diag);
  return blk;
}

WindowChart::WindowChart(int n, int l, int u, int extra) : n_(n), l_(l), u_(u), extra_(extra) {
  if (n < 1) throw std::invalid_argument("WindowChart: n must be >= 1");
  if (l > u) throw std::invalid_argument("WindowChart: l > u");
  rows_.resize(lifted_order());
  for (int i = 0; i <= extra_; ++i) rows_[i] = {{i, 1.0}};
  for (int i = 0; i < dim(); ++i) rows_[extra_ + 1 + i] = {{extra_ + 1 + i, 1.0}};
  if (equality()) {
    auto& last = rows_[extra_ + n_];
    last.emplace_back(0, static_cast<double>(l_));
    for (int i = 0; i < dim(); ++i) last.emplace_back(extra_ + 1 + i, -1.0);
  }
}

LinExpr WindowChart::lifted(int i, int j, const MatExpr& yhat) const {
  if (rows_[i].size() == 1 && rows_[j].size() == 1) {
    const auto [a, ta] = rows_[i][0];
    const auto [b, tb] = rows_[j][0];
    return (ta * tb) * (a >= b ? yhat(a, b) : yhat(b, a));
  }
  LinExpr e;
  for (const auto& [a, ta] : rows_[i])
    for (const auto& [b, tb] : rows_[j]) e += (ta * tb) * (a >= b ? yhat(a, b) : yhat(b, a));
  return e;
}

GXReducedBlock add_gx_reduced(ProgramBuilder& b, const WindowChart& chart, const MatExpr& yhat) {
  const int n = chart.n(), k = chart.dim(), off = chart.extra();
  if (!window_feasible(n, chart.l(), chart.u()))
    throw std::invalid_argument("add_gx_reduced: window has no achievable e'x");
  GXReducedBlock blk;
  // principal submatrix of yhat on {0} and the x coordinates
  auto idx = [&](int a) { return a == 0 ? 0 : off + a; };
  blk.psd_row = b.add_psd(k + 1, [&](int i, int j) { return yhat(idx(i), idx(j)); });
  std::vector<LinExpr> diag;
  for (int i = 0; i < n; ++i) diag.push_back(chart.X(i, i, yhat) - 1.0);
  blk.diag_row = b.add_zero(diag);
  if (chart.equality()) return blk;

  const double u = chart.u(), l = chart.l();
  LinExpr sum_x, sum_X;
  for (int i = 0; i < n; ++i) {
    sum_x += chart.x(i, yhat);
    sum_X += chart.X(i, i, yhat);
    for (int j = 0; j < i; ++j) sum_X += 2.0 * chart.X(i, j, yhat);
  }
  // with x fixed by the caller these rows carry no variables and are left out
  if (!sum_x.vars.empty()) blk.window_row = b.add_nonneg({u - sum_x, sum_x - l});
  blk.sign_row = b.add_nonneg({u * u - 2.0 * u * sum_x + sum_X,
                               (u + l) * sum_x - u * l - sum_X,
                               sum_X - 2.0 * l * sum_x + l * l});
  return blk;
}

GBallModel build_gball(int q) {
  ProgramBuilder b;
  const int u = b.add_variables(q);
  const int U = b.add_variables(q * (q + 1) / 2);
  GBallModel m;
  m.block = add_gball(
      b, q, [&](int i) { return LinExpr::var(u + i); },
      [&](int i, int j) { return LinExpr::var(U + svec_index(i, j, q)); });
  m.program = b.build();
  return m;
}

Eigen::VectorXd GBallModel::pack(const Eigen::VectorXd& u, const Eigen::MatrixXd& U) const {
  const int q = block.q;
  Eigen::VectorXd v(q + q * (q + 1) / 2);
  v.head(q) = u;
  for (int j = 0; j < q; ++j)
    for (int i = j; i < q; ++i) v(q + svec_index(i, j, q)) = U(i, j);
  return v;
}

double GBallModel::violation(const Eigen::VectorXd& u, const Eigen::MatrixXd& U) const {
  return max_violation(program.base, pack(u, U));
}

GXModel build_gx(int n, int l, int u) {
  ProgramBuilder b;
  GXModel m;
  m.x_var = b.add_variables(n);
  m.X_var = b.add_variables(n * (n + 1) / 2);
  m.block = add_gx(
      b, n, l, u, [&](int i) { return LinExpr::var(m.x_var + i); },
      [&](int i, int j) { return LinExpr::var(m.X_var + svec_index(i, j, n)); });
  m.program = b.build();
  return m;
}

Eigen::VectorXd GXModel::lift(const Eigen::VectorXd& x) const { return embed(x, x * x.transpose()); }

Eigen::VectorXd GXModel::embed(const Eigen::VectorXd& x, const Eigen::MatrixXd& X) const {
  const int n = block.n;
  // rows of T for the two slacks: s1 = u - e'x, s2 = e'x - l
  Eigen::MatrixXd Y(n + 1, n + 1);
  Y(0, 0) = 1.0;
  Y.block(1, 0, n, 1) = x;
  Y.block(0, 1, 1, n) = x.transpose();
  Y.block(1, 1, n, n) = X;
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(2, n + 1);
  T(0, 0) = block.u;
  T.block(0, 1, 1, n).setConstant(-1.0);
  T(1, 0) = -block.l;
  T.block(1, 1, 1, n).setConstant(1.0);
  const Eigen::VectorXd s = T * Y.col(0);
  const Eigen::MatrixXd V = Y.block(1, 0, n, n + 1) * T.transpose();  // n x 2
  const Eigen::MatrixXd S = T * Y * T.transpose();

  Eigen::VectorXd v = Eigen::VectorXd::Zero(program.base.num_vars);
  v.segment(x_var, n) = x;
  for (int j = 0; j < n; ++j)
    for (int i = j; i < n; ++i) v(X_var + svec_index(i, j, n)) = X(i, j);
  v(block.s_var) = s(0);
  v(block.s_var + 1) = s(1);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < 2; ++k) v(block.v_var + 2 * i + k) = V(i, k);
  v(block.S_var) = S(0, 0);
  v(block.S_var + 1) = S(1, 0);
  v(block.S_var + 2) = S(1, 1);
  return v;
}

double GXModel::violation(const Eigen::VectorXd& v) const { return max_violation(program.base, v); }

NecReport check_nec_conditions(const GXModel& model, int max_points) {
  NecReport rep;
  const int n = model.block.n;
  const ConicProgram& p = model.program.base;
  const int first = model.block.diag_row;

  // Condition 1: the diag rows vanish at the lifting of every sampled x in X.
  rep.nec1 = true;
  const auto window = achievable_window(n, model.block.l, model.block.u);
  Eigen::VectorXd x(n);
  for (long long mask = 0; window && mask < (1LL << n) && rep.points_checked < max_points; ++mask) {
    int sum = 0;
    for (int i = 0; i < n; ++i) {
      x(i) = (mask >> (n - 1 - i)) & 1 ? 1.0 : -1.0;
      sum += static_cast<int>(x(i));
    }
    if (sum < window->first || sum > window->second) continue;
    ++rep.points_checked;
    const Eigen::VectorXd slack = p.rhs - p.coeffs * model.lift(x);
    for (int r = first; r < first + n; ++r)
      if (slack(r) != 0.0) {
        rep.nec1 = false;
        rep.messages.push_back("diag row " + std::to_string(r - first) + " is nonzero at a point of X");
      }
  }
  if (rep.points_checked == 0) {
    rep.nec1 = false;
    rep.messages.push_back("no point of X to check");
  }

  // Condition 2: lambda = e on the diag rows gives a positive definite combination.
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n, n);
  for (int r = first; r < first + n; ++r)
    for (SparseRows::InnerIterator it(p.coeffs, r); it; ++it) {
      const int k = static_cast<int>(it.col()) - model.X_var;
      if (k < 0 || k >= n * (n + 1) / 2) continue;
      int col = 0, start = 0;
      while (k >= start + (n - col)) start += n - col++;
      const int row = col + (k - start);
      // the row reads -coeffs . v; the matrix A_r satisfies A_r . X = that linear part
      const double w = -it.value();
      if (row == col) {
        M(row, row) += w;
      } else {
        M(row, col) += 0.5 * w;
        M(col, row) += 0.5 * w;
      }
    }
  rep.nec2_min_eigenvalue = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(M).eigenvalues()(0);
  rep.nec2 = rep.nec2_min_eigenvalue > 0.0;
  if (!rep.nec2) rep.messages.push_back("sum of diag row matrices is not positive definite");
  return rep;
}

}  // namespace ctent
