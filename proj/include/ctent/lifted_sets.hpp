#pragma once

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ctent/builder.hpp"

namespace ctent {

using VecExpr = std::function<LinExpr(int)>;
using MatExpr = std::function<LinExpr(int, int)>;  // queried for i >= j

/// Rows of the lifted unit ball
///   [[1, u'], [u, U]] psd,  1 - trace(U) >= 0.
struct GBallBlock {
  int q = 0;
  int psd_row = -1;
  int trace_row = -1;
};

GBallBlock add_gball(ProgramBuilder& b, int q, const VecExpr& u, const MatExpr& U);

/// Rows of the outer approximation of the lifted feasible set for
/// X = { x in {-1,1}^n : l <= e'x <= u }. With z = (x, s1, s2) and
/// Z = [[X, V], [V', S]]:
///   [[1, z'], [z, Z]] psd of order n+3,
///   e'x + s1 = u,  e'x - s2 = l,
///   sum(X) + 2 sum(V.col(0)) + S11 = u^2,  sum(X) - 2 sum(V.col(1)) + S22 = l^2,
///   s >= 0,  S >= 0 entrywise,  diag(X) = e.
/// x and X are supplied by the caller; s, V and S are new variables.
struct GXBlock {
  int n = 0;
  int l = 0;
  int u = 0;
  int s_var = -1;  // s1, s2
  int v_var = -1;  // V(i, k) at v_var + 2 i + k
  int S_var = -1;  // S11, S21, S22
  int psd_row = -1;
  int window_row = -1;     // 2 linear equations
  int quadratic_row = -1;  // 2 lifted equations
  int sign_row = -1;       // 5 nonnegativity rows: s1, s2, S11, S21, S22
  int diag_row = -1;       // n rows X_ii - 1 = 0
};

GXBlock add_gx(ProgramBuilder& b, int n, int l, int u, const VecExpr& x, const MatExpr& X);

/// Coordinates in which the lifted window set has a strictly feasible point.
/// The literal rows above always admit the null vectors [-u; e; 1; 0] and
/// [-l; e; 0; -1], so every feasible lifted matrix factors as T Y T' with
/// Y = [[1, x'], [x, X]] and the s, V, S blocks fixed by (x, X). When l == u
/// the hyperplane e'x = l is removed as well by x_n = l - (x_1 + ... + x_{n-1}).
///
/// Lifted index space: 0 is the constant, 1..extra are pass-through
/// coordinates (e.g. an uncertainty vector), extra+1..extra+n is x. The
/// reduced space has the same layout with dim() coordinates for x.
class WindowChart {
 public:
  WindowChart(int n, int l, int u, int extra = 0);

  int n() const { return n_; }
  int l() const { return l_; }
  int u() const { return u_; }
  int extra() const { return extra_; }
  bool equality() const { return l_ == u_; }
  int dim() const { return equality() ? n_ - 1 : n_; }
  int lifted_order() const { return 1 + extra_ + n_; }
  int reduced_order() const { return 1 + extra_ + dim(); }

  /// Entry (i, j) of the lifted matrix from the reduced one; `yhat` is queried
  /// for i >= j only.
  LinExpr lifted(int i, int j, const MatExpr& yhat) const;
  LinExpr x(int i, const MatExpr& yhat) const { return lifted(extra_ + 1 + i, 0, yhat); }
  LinExpr X(int i, int j, const MatExpr& yhat) const { return lifted(extra_ + 1 + i, extra_ + 1 + j, yhat); }
  /// Reduced coordinates of x (drops x_n in the equality case).
  Eigen::VectorXd reduce(const Eigen::VectorXd& x) const { return x.head(dim()); }

 private:
  int n_, l_, u_, extra_;
  std::vector<std::vector<std::pair<int, double>>> rows_;  // nonzeros of T per lifted index
};

/// The window rows in chart coordinates, as used inside optimization models:
///   psd on [[1, xhat'], [xhat, Xhat]],  diag(X) = e,
/// and for l < u
///   u - e'x >= 0,  e'x - l >= 0,
///   (u - e'x)^2, (u - e'x)(e'x - l), (e'x - l)^2 lifted >= 0.
/// The equations of the literal block hold identically in these coordinates.
struct GXReducedBlock {
  int psd_row = -1;
  int diag_row = -1;
  int window_row = -1;  // -1 when l == u or when x holds no variables
  int sign_row = -1;    // -1 when l == u
};

GXReducedBlock add_gx_reduced(ProgramBuilder& b, const WindowChart& chart, const MatExpr& yhat);

/// Standalone models over their own variables, for membership checks.
struct GBallModel {
  ParametricProgram program;
  GBallBlock block;

  /// Variable vector for (u, U); U is stored entrywise on the lower triangle.
  Eigen::VectorXd pack(const Eigen::VectorXd& u, const Eigen::MatrixXd& U) const;
  double violation(const Eigen::VectorXd& u, const Eigen::MatrixXd& U) const;
};

GBallModel build_gball(int q);

struct GXModel {
  ParametricProgram program;
  GXBlock block;
  int x_var = 0;
  int X_var = 0;  // lower triangle of X, column by column

  /// Variable vector of the rank-one lifting of (x, u - e'x, e'x - l).
  Eigen::VectorXd lift(const Eigen::VectorXd& x) const;
  /// Variable vector for a general (x, X), with s, V, S read off
  /// T [[1, x'], [x, X]] T'.
  Eigen::VectorXd embed(const Eigen::VectorXd& x, const Eigen::MatrixXd& X) const;
  double violation(const Eigen::VectorXd& v) const;
};

/// Throws std::invalid_argument for windows without an achievable e'x.
GXModel build_gx(int n, int l, int u);

struct NecReport {
  bool nec1 = false;  // diag(xx') = e on every sampled x in X
  bool nec2 = false;  // sum of diag row matrices is positive definite
  int points_checked = 0;
  double nec2_min_eigenvalue = 0.0;
  std::vector<std::string> messages;
};

/// Checks both conditions on the diag(X) = e rows of a standalone model;
/// samples are all of X when it has at most max_points elements.
NecReport check_nec_conditions(const GXModel& model, int max_points = 4096);

}  // namespace ctent
