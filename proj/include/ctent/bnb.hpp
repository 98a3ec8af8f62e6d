#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "ctent/instance.hpp"
#include "ctent/rounding.hpp"
#include "ctent/solver.hpp"

namespace ctent {

struct BnBConfig {
  RoundingMethod rounding_mode = RoundingMethod::classical;
  double prune_tol = 1e-6;
  int max_nodes = 10000;
  bool round_every_node = true;
  SolverOptions solver;
};

/// One solved node. Nodes are numbered in the order their relaxations are solved.
struct NodeLogEntry {
  int node_id = 0;
  int depth = 0;  // number of fixed coordinates
  double bound = 0.0;
  double incumbent = 0.0;  // after this node's rounding
  bool pruned = false;
  std::string rounding_method;  // empty when no rounding ran
  double f_ub = 0.0;            // NaN when no rounding ran
};

struct BnBResult {
  double optimum = 0.0;
  Eigen::VectorXd x_star;
  int node_count = 0;
  double wall_time = 0.0;
  bool proven_optimal = false;  // false when max_nodes stopped the search
  int relaxation_failures = 0;  // nodes whose bound fell back to the parent's
  int rounding_fallbacks = 0;   // tent roundings that used the classical point
  std::vector<NodeLogEntry> node_log;
};

/// Depth-first branch and bound on a stack. Both children of a branching are
/// solved before either is pushed; the one with the smaller bound is pushed
/// last (the +1 child on ties). Branches on the free coordinate of x_rel
/// closest to 0 (lowest index on ties). The incumbent starts from one
/// classical rounding of the root relaxation.
BnBResult solve(const RobustQuadraticInstance& inst, const BnBConfig& config = {});

/// Exact minimum over X by enumeration in lexicographic order (-1 before +1,
/// first coordinate most significant); the first minimizer wins ties.
/// Throws std::invalid_argument for n > 22.
std::pair<double, Eigen::VectorXd> brute_force(const RobustQuadraticInstance& inst);

/// node_id,depth,bound,incumbent,pruned,rounding_method,f_ub
void write_node_log_csv(std::ostream& out, const std::vector<NodeLogEntry>& log);

}  // namespace ctent
