#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "ctent/instance.hpp"
#include "ctent/lifted_sets.hpp"
#include "ctent/solver.hpp"

namespace ctent {

/// Parametric program g(x) = sup { objective(v) + linear'x : rhs + R x - coeffs v in K }.
/// x enters right-hand sides and one additive objective term only, so the dual
/// value at any fixed dual point is affine in x.
struct TentProgram {
  enum class Domain { signed_window, zero_one };

  ParametricProgram program;
  Domain domain = Domain::signed_window;
  int n = 0;
  int q = 0;
  int l = 0;  // window bounds for signed_window
  int u = 0;
  bool soc_cuts = false;
  int psd_row = -1;  // the big block [[1, u', x'], [u, U, Psi'], [x, Psi, X]]
  int psd_order = 0;
  std::vector<int> x_rows;  // rows whose right-hand side depends on x
  Eigen::VectorXd linear;   // objective coefficient of x

  /// A point where the program is strictly feasible; empty when dom g is a
  /// single point.
  std::optional<Eigen::VectorXd> center;
  /// g on the boundary of its domain: the program restricted to the smallest
  /// face containing x, which has fewer coordinates and a strictly feasible
  /// point again. Set by the builders.
  std::function<std::pair<SolveStatus, double>(const Eigen::VectorXd&, const SolverOptions&)> face_value;

  bool in_domain(const Eigen::VectorXd& x, double tol = 1e-9) const;
  /// Distance-like slack of the tightest domain inequality at x; points with
  /// margin below kFaceTol are treated as boundary points.
  double interior_margin(const Eigen::VectorXd& x) const;
};

inline constexpr double kFaceTol = 1e-9;

/// Tent of the robust quadratic
///   sup A.X + 2a'x + 2 sum B_ji Psi_ij + C.U + 2c'u
/// over the big psd block, (x, X) in the window set, (u, U) in the lifted
/// ball and, when soc_cuts is set, the n + 2 cuts
///   ||u_bd u - Psi'e|| <= u_bd - e'x,  ||l u - Psi'e|| <= e'x - l,
///   ||u + Psi'e_i|| <= 1 + x_i.
/// Throws std::invalid_argument for invalid instances and empty windows.
TentProgram build_tent(const RobustQuadraticInstance& inst, bool soc_cuts = true);

/// (w, alpha, lambda) of a dual point: alpha collects the constant part of the
/// big block's contribution (plus the objective constant), w is half its x
/// part and lambda holds the multipliers of every other row.
struct TentCertificate {
  double alpha = 0.0;
  Eigen::VectorXd w;
  Eigen::VectorXd lambda;  // one entry per row; zero on the big block
  double b_lambda = 0.0;   // rhs' lambda
  Eigen::VectorXd A_lambda;  // adjoint of the x part applied to lambda, so x enters as -A_lambda' x

  /// linear + 2w - A_lambda
  Eigen::VectorXd supergradient(const TentProgram& tp) const;
  /// alpha + b_lambda + x' supergradient
  double dual_value(const TentProgram& tp, const Eigen::VectorXd& x) const;
};

struct TentEvaluation {
  SolveStatus status = SolveStatus::numerical_failure;
  double value = 0.0;  // -inf outside dom g
  Eigen::VectorXd supergradient;
  double epsilon = 0.0;
  TentCertificate certificate;
  std::vector<std::string> warnings;

  bool finite() const { return status == SolveStatus::optimal; }
};

/// Solves the tent at x. Outside dom g the status is infeasible and the value
/// is -inf. epsilon is the certificate's dual value minus g(x), clamped at 0.
/// On the boundary of dom g the value comes from face_value and the
/// certificate from a solve at x + t (center - x) for a small t, so epsilon
/// also absorbs the offset.
TentEvaluation evaluate_tent(const TentProgram& tp, const Eigen::VectorXd& x, const SolverOptions& opts = {});

/// Data for a max of affine functions of x in {0,1}^n,
///   f(x) = max_j  vertices[j](0) + vertices[j].tail(n)' x.
/// The uncertainty is the convex hull of the k vertices, written as
/// p_k + sum_j u_j (p_j - p_k) with u in the standard simplex of dimension k - 1.
struct Tent01Data {
  int n = 1;
  std::vector<Eigen::VectorXd> vertices;  // each of size n + 1

  double f(const Eigen::VectorXd& x) const;
};

/// 0/1 tent over the big block with diag(X) = x substituted:
///   full:    U_jj <= u_j,  e'u <= 1,  Psi >= 0,
///   relaxed: trace(U) <= 1,  Psi >= 0,
/// plus 0 <= X_ij <= x_i, x_j off the diagonal.
TentProgram build_tent01(const Tent01Data& data, bool relaxed = false);

/// f = max(1 - 8x, -2 + 2x) on {0, 1}.
Tent01Data unit_interval_example();

/// Dual point (alpha, beta, gamma, delta, eps, pi) of the one-dimensional full
/// 0/1 tent written as a dual vector of the program: the psd block gets
/// svec([[alpha, beta, gamma], [beta, delta, eps], [gamma, eps, pi]]), the rows
/// U <= u, u <= 1, psi >= 0 get delta, 0 and 10 - 2 eps.
Eigen::VectorXd unit_interval_dual_point(const TentProgram& tp, double alpha, double beta, double gamma,
                                         double delta, double eps, double pi);

/// g_c(x) = f(x) - sum_i lambda_i (x_i^2 - 1) for instances with B = 0 and
/// C negative semidefinite, where f is an explicit quadratic. Keeps a pointer
/// to the instance.
class ClassicalTent {
 public:
  /// Throws std::invalid_argument unless B = 0, C is negative semidefinite and
  /// A - diag(lambda) is negative semidefinite.
  ClassicalTent(const RobustQuadraticInstance& inst, Eigen::VectorXd lambda);

  const Eigen::VectorXd& lambda() const { return lambda_; }
  double value(const Eigen::VectorXd& x) const;

  /// lambda_i = lambda_max(A) + 1 for every i.
  static Eigen::VectorXd default_multipliers(const RobustQuadraticInstance& inst);

 private:
  const RobustQuadraticInstance* inst_;
  Eigen::VectorXd lambda_;
  double inner_ = 0.0;  // max over the ball of u'Cu + 2c'u
};

double classical_tent_value(const ClassicalTent& ct, const Eigen::VectorXd& x);

}  // namespace ctent
