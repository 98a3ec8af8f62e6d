#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "ctent/cone.hpp"

namespace ctent {

enum class Sense { minimize, maximize };

struct RowRange {
  int start = 0;
  int count = 0;
  int end() const { return start + count; }
};

struct ConeBlock {
  RowRange rows;
  ConeSpec cone;
};

using SparseRows = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// Linear conic program in slack form:
///
///   optimize  objective' v + offset
///   s.t.      rhs - coeffs * v  in  K_1 x ... x K_p
///
/// where each cone block claims a contiguous range of constraint rows.
/// Dual multipliers z (one per row, z in K*) satisfy coeffs' z = -objective
/// for minimization and coeffs' z = objective for maximization; the dual
/// objective is then -rhs' z + offset, respectively rhs' z + offset.
struct ConicProgram {
  int num_vars = 0;
  Eigen::VectorXd objective;
  double offset = 0.0;
  Sense sense = Sense::minimize;
  SparseRows coeffs;
  Eigen::VectorXd rhs;
  std::vector<ConeBlock> cones;

  int num_rows() const { return static_cast<int>(rhs.size()); }
};

enum class SolveStatus { optimal, infeasible, unbounded, numerical_failure };

std::string to_string(SolveStatus status);

struct ConicSolution {
  SolveStatus status = SolveStatus::numerical_failure;
  Eigen::VectorXd primal;
  Eigen::VectorXd dual;
  double objective_value = 0.0;
  double dual_value = 0.0;
  double gap = 0.0;  ///< relative primal-dual gap of the returned iterate
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  int iterations = 0;

  bool optimal() const { return status == SolveStatus::optimal; }
};

/// Structural checks; each message names the offending row, block or variable.
std::vector<std::string> validate(const ConicProgram& program);

/// Dual objective implied by the multipliers `dual` (see ConicProgram).
double dual_objective(const ConicProgram& program, const Eigen::VectorXd& dual);

/// Per-block slack violations at a primal point (0 = feasible).
std::vector<double> block_violations(const ConicProgram& program, const Eigen::VectorXd& v);
double max_violation(const ConicProgram& program, const Eigen::VectorXd& v);

/// Text dump, one constraint row per line:
///   <row> <cone-tag> rhs=<value> <col>:<coef> ...
/// preceded by an objective line.
void dump(const ConicProgram& program, std::ostream& out);

/// Conic program whose right-hand side and objective offset are affine in an
/// external parameter vector p:  rhs(p) = rhs + rhs_param * p,
/// offset(p) = offset + objective_param' p. Coefficients never depend on p.
struct ParametricProgram {
  ConicProgram base;
  SparseRows rhs_param;
  Eigen::VectorXd objective_param;

  int num_params() const { return static_cast<int>(objective_param.size()); }
  ConicProgram at(const Eigen::VectorXd& p) const;
};

}  // namespace ctent
