#include <algorithm>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

#include "ctent/builder.hpp"
#include "ctent/tent.hpp"

namespace ctent {

double Tent01Data::f(const Eigen::VectorXd& x) const {
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& p : vertices) best = std::max(best, p(0) + p.tail(n).dot(x));
  return best;
}

namespace {

// fixed[i] is -1 for a free coordinate, else its value in {0, 1}. Rows of the
// big block for fixed coordinates are 0 or a copy of the first row, so they
// are substituted out; rows left without variables hold trivially and are
// dropped.
TentProgram build_face(const Tent01Data& data, bool relaxed, const std::vector<int>& fixed) {
  const int n = data.n;
  const int k = static_cast<int>(data.vertices.size());
  if (n < 1) throw std::invalid_argument("build_tent01: n must be >= 1");
  if (k < 2) throw std::invalid_argument("build_tent01: need at least two vertices");
  for (const auto& p : data.vertices)
    if (p.size() != n + 1) throw std::invalid_argument("build_tent01: vertex must have n + 1 entries");
  const int d = k - 1;
  const Eigen::VectorXd& last = data.vertices.back();
  std::vector<int> slot(n, -1);  // parameter index of each free coordinate
  int m = 0;
  for (int i = 0; i < n; ++i)
    if (fixed[i] < 0) slot[i] = m++;

  ProgramBuilder b(m);
  const int uv = b.add_variables(d);
  const int Uv = b.add_variables(d * (d + 1) / 2);
  const int Pv = b.add_variables(m * d);
  const int Xv = b.add_variables(m * (m - 1) / 2);
  auto uu = [&](int j) { return LinExpr::var(uv + j); };
  auto UU = [&](int i, int j) { return LinExpr::var(Uv + svec_index(i, j, d)); };
  auto xx = [&](int i) { return fixed[i] < 0 ? LinExpr::param(slot[i]) : LinExpr(fixed[i]); };
  auto psi = [&](int i, int j) -> LinExpr {
    if (fixed[i] < 0) return LinExpr::var(Pv + slot[i] * d + j);
    return fixed[i] == 1 ? uu(j) : LinExpr();
  };
  // X_ij over the original coordinates, i != j
  auto XX = [&](int i, int j) -> LinExpr {
    if (fixed[i] >= 0) return fixed[i] * xx(j);
    if (fixed[j] >= 0) return fixed[j] * xx(i);
    int a = slot[i], c = slot[j];
    if (a < c) std::swap(a, c);
    int idx = 0;
    for (int col = 0; col < c; ++col) idx += m - 1 - col;
    return LinExpr::var(Xv + idx + (a - c - 1));
  };
  std::vector<int> free_idx;
  for (int i = 0; i < n; ++i)
    if (fixed[i] < 0) free_idx.push_back(i);

  const int order = 1 + d + m;
  const int psd_row = b.add_psd(order, [&](int i, int j) -> LinExpr {
    if (i == 0) return 1.0;
    if (j == 0) return i <= d ? uu(i - 1) : xx(free_idx[i - d - 1]);
    if (i <= d) return UU(i - 1, j - 1);
    if (j <= d) return psi(free_idx[i - d - 1], j - 1);
    if (i == j) return xx(free_idx[i - d - 1]);
    return XX(free_idx[i - d - 1], free_idx[j - d - 1]);
  });

  std::vector<LinExpr> rows;
  if (relaxed) {
    LinExpr trace(1.0);
    for (int j = 0; j < d; ++j) trace -= UU(j, j);
    rows.push_back(trace);
  } else {
    LinExpr total(1.0);
    for (int j = 0; j < d; ++j) {
      rows.push_back(uu(j) - UU(j, j));
      total -= uu(j);
    }
    rows.push_back(total);
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < d; ++j) rows.push_back(psi(i, j));
  for (int j = 0; j < n; ++j)
    for (int i = j + 1; i < n; ++i) {
      rows.push_back(XX(i, j));
      rows.push_back(xx(i) - XX(i, j));
      rows.push_back(xx(j) - XX(i, j));
    }
  std::erase_if(rows, [](const LinExpr& e) { return e.vars.empty(); });
  b.add_nonneg(rows);

  LinExpr obj(last(0));
  for (int i = 0; i < n; ++i) obj += last(1 + i) * xx(i);
  for (int j = 0; j < d; ++j) {
    const Eigen::VectorXd diff = data.vertices[j] - last;
    obj += diff(0) * uu(j);
    for (int i = 0; i < n; ++i)
      if (diff(1 + i) != 0.0) obj += diff(1 + i) * psi(i, j);
  }
  b.set_objective(obj, Sense::maximize);

  TentProgram tp;
  tp.domain = TentProgram::Domain::zero_one;
  tp.n = m;
  tp.q = d;
  tp.l = 0;
  tp.u = m;
  tp.program = b.build();
  tp.psd_row = psd_row;
  tp.psd_order = order;
  tp.linear = tp.program.objective_param;
  const SparseRows& R = tp.program.rhs_param;
  for (int r = 0; r < R.rows(); ++r)
    if (SparseRows::InnerIterator(R, r)) tp.x_rows.push_back(r);
  tp.center = Eigen::VectorXd::Constant(m, 0.5);
  return tp;
}

}  // namespace

TentProgram build_tent01(const Tent01Data& data, bool relaxed) {
  TentProgram tp = build_face(data, relaxed, std::vector<int>(data.n, -1));
  tp.face_value = [data, relaxed](const Eigen::VectorXd& x, const SolverOptions& opts) {
    std::vector<int> fixed(data.n, -1);
    std::vector<double> rest;
    for (int i = 0; i < data.n; ++i) {
      if (x(i) <= kFaceTol)
        fixed[i] = 0;
      else if (x(i) >= 1.0 - kFaceTol)
        fixed[i] = 1;
      else
        rest.push_back(x(i));
    }
    const TentProgram sub = build_face(data, relaxed, fixed);
    const ConicSolution sol =
        solve(sub.program.at(Eigen::Map<const Eigen::VectorXd>(rest.data(), static_cast<Eigen::Index>(rest.size()))),
              opts);
    if (sol.status == SolveStatus::infeasible)
      return std::make_pair(sol.status, -std::numeric_limits<double>::infinity());
    return std::make_pair(sol.status, sol.objective_value);
  };
  return tp;
}

Tent01Data unit_interval_example() {
  Tent01Data data;
  data.n = 1;
  data.vertices = {(Eigen::VectorXd(2) << 1.0, -8.0).finished(), (Eigen::VectorXd(2) << -2.0, 2.0).finished()};
  return data;
}

Eigen::VectorXd unit_interval_dual_point(const TentProgram& tp, double alpha, double beta, double gamma,
                                         double delta, double eps, double pi) {
  if (tp.domain != TentProgram::Domain::zero_one || tp.n != 1 || tp.q != 1 || tp.psd_order != 3)
    throw std::invalid_argument("unit_interval_dual_point: not a one-dimensional two-vertex 0/1 tent");
  const auto& cones = tp.program.base.cones;
  if (cones.size() != 2 || cones[1].rows.count != 3)
    throw std::invalid_argument("unit_interval_dual_point: expects the full tent");
  Eigen::MatrixXd Z(3, 3);
  Z << alpha, beta, gamma, beta, delta, eps, gamma, eps, pi;
  Eigen::VectorXd z(tp.program.base.rhs.size());
  z.segment(tp.psd_row, 6) = svec(Z);
  const int r = cones[1].rows.start;
  z(r) = delta;
  z(r + 1) = 0.0;
  z(r + 2) = 10.0 - 2.0 * eps;
  return z;
}

}  // namespace ctent
