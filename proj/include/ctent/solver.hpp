#pragma once

#include "ctent/program.hpp"

namespace ctent {

inline constexpr double kDefaultSolverTol = 1e-8;

struct SolverOptions {
  double tol = kDefaultSolverTol;  ///< feasibility and relative-gap target
  int max_iterations = 120;
  bool verbose = false;
};

/// Primal-dual interior-point method on the homogeneous self-dual embedding
/// with Nesterov-Todd scaling and Mehrotra correction. Dense linear algebra;
/// intended for programs with up to a few thousand variables.
///
/// Throws std::invalid_argument when validate(program) reports violations.
ConicSolution solve(const ConicProgram& program, const SolverOptions& options = {});

inline ConicSolution solve(const ConicProgram& program, double tol) {
  SolverOptions opts;
  opts.tol = tol;
  return solve(program, opts);
}

}  // namespace ctent
