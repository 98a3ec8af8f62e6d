#pragma once

#include <map>
#include <vector>

#include <Eigen/Dense>

#include "ctent/instance.hpp"
#include "ctent/solver.hpp"

namespace ctent {

/// Partial assignment index -> value in {-1, +1}.
struct Fixing {
  std::map<int, int> values;

  bool fixed(int i) const { return values.count(i) > 0; }
  int sum() const;
  Fixing with(int i, int v) const;
};

/// The instance restricted to the free coordinates. f(x) equals
/// constant + f_reduced(x_free) for every x consistent with the fixing.
struct ReducedInstance {
  RobustQuadraticInstance inst;  // free part; l, u shifted by the fixed sum
  double constant = 0.0;
  std::vector<int> free;
  bool window_empty = false;  // no achievable free sum in the shifted window

  Eigen::VectorXd embed(const Eigen::VectorXd& x_free, const Fixing& fixing, int n) const;
};

/// Throws std::invalid_argument for out-of-range indices or values not in {-1, 1}.
ReducedInstance reduce(const RobustQuadraticInstance& inst, const Fixing& fixing);

struct RelaxationResult {
  SolveStatus status = SolveStatus::numerical_failure;
  double bound = 0.0;  // +inf when the fixing admits no point of X
  Eigen::VectorXd x_rel;
  Eigen::MatrixXd X_rel;

  bool feasible() const { return status == SolveStatus::optimal; }
};

/// Lower bound min A.X + 2a'x + alpha - lambda over the lifted outer
/// approximation, on the instance reduced by `fixing`. When the fixing leaves a
/// single point of X the bound is f at that point.
RelaxationResult lower_bound(const RobustQuadraticInstance& inst, const Fixing& fixing = {},
                             const SolverOptions& opts = {});

}  // namespace ctent
