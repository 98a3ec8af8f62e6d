#pragma once

#include <string>

#include <Eigen/Dense>

#include "ctent/instance.hpp"
#include "ctent/solver.hpp"
#include "ctent/tent.hpp"

namespace ctent {

/// argmin { y'x : l <= e'x <= u, x in {-1,1}^n }. Starts from x_i = -sign(y_i)
/// (ties to -1) and, if e'x misses the window, flips the cheapest coordinates
/// that move e'x toward it (stable in the index) until it reaches the nearest
/// achievable sum. Throws std::invalid_argument for windows without an
/// achievable sum.
Eigen::VectorXd linear_minimize_over_X(const Eigen::VectorXd& y, int l, int u);

/// argmin ||x0 - x||^2 over the same set; on {-1,1}^n this is
/// linear_minimize_over_X(-x0).
Eigen::VectorXd closest_feasible(const Eigen::VectorXd& x0, int l, int u);

enum class RoundingMethod { classical, tent_heuristic };

std::string to_string(RoundingMethod method);

struct RoundingOutcome {
  Eigen::VectorXd x_ub;
  double f_value = 0.0;
  RoundingMethod method = RoundingMethod::classical;
  // tent heuristic only
  double epsilon = 0.0;
  double supergradient_norm = 0.0;
  bool fell_back = false;  // tent evaluation failed; the point is the classical one
  std::string note;
};

/// f at a point of X: the SDP value, or the eigen-oracle value if the solve
/// does not reach optimal status.
double evaluate_f_at(const RobustQuadraticInstance& inst, const Eigen::VectorXd& x, const SolverOptions& opts = {});

RoundingOutcome classical_rounding(const RobustQuadraticInstance& inst, const Eigen::VectorXd& x_rel,
                                   const SolverOptions& opts = {});

/// Supergradient of the tent at x_rel, then the linear minimization over X.
/// x_rel is first clipped to the box and pulled into the window if the
/// relaxation left it marginally outside.
RoundingOutcome primal_heuristic(const RobustQuadraticInstance& inst, const TentProgram& tp,
                                 const Eigen::VectorXd& x_rel, const SolverOptions& opts = {});

}  // namespace ctent
