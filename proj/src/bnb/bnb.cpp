#include "ctent/bnb.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <optional>
#include <ostream>
#include <stdexcept>

#include "ctent/objective.hpp"
#include "ctent/relaxation.hpp"
#include "ctent/tent.hpp"

namespace ctent {

namespace {

struct Node {
  int id = 0;  // index into the node log
  Fixing fixing;
  double bound = 0.0;
  Eigen::VectorXd x_rel;
};

class Search {
 public:
  Search(const RobustQuadraticInstance& inst, const BnBConfig& config) : inst_(inst), config_(config) {
    if (config.prune_tol < 0.0) throw std::invalid_argument("BnBConfig: prune_tol must be >= 0");
    if (config.max_nodes < 1) throw std::invalid_argument("BnBConfig: max_nodes must be >= 1");
    if (config.rounding_mode == RoundingMethod::tent_heuristic) tent_ = build_tent(inst);
  }

  BnBResult run() {
    const auto t0 = std::chrono::steady_clock::now();
    check_instance(inst_);
    std::optional<Node> root = solve_node({}, -std::numeric_limits<double>::infinity(), true);
    std::vector<Node> stack;
    if (root && keep(*root)) stack.push_back(std::move(*root));

    while (!stack.empty()) {
      Node node = std::move(stack.back());
      stack.pop_back();
      if (!keep(node)) {
        mark_pruned_on_pop(node);
        continue;
      }
      if (result_.node_count + 2 > config_.max_nodes) {
        result_.proven_optimal = false;
        stop_ = true;
        break;
      }
      const int i = branch_index(node);
      std::optional<Node> minus = solve_node(node.fixing.with(i, -1), node.bound, false);
      std::optional<Node> plus = solve_node(node.fixing.with(i, 1), node.bound, false);
      const bool keep_minus = minus && keep(*minus);
      const bool keep_plus = plus && keep(*plus);
      if (keep_minus && keep_plus) {
        // the child popped next goes last
        if (minus->bound < plus->bound) {
          stack.push_back(std::move(*plus));
          stack.push_back(std::move(*minus));
        } else {
          stack.push_back(std::move(*minus));
          stack.push_back(std::move(*plus));
        }
      } else if (keep_minus) {
        stack.push_back(std::move(*minus));
      } else if (keep_plus) {
        stack.push_back(std::move(*plus));
      }
    }
    if (!stop_) result_.proven_optimal = true;
    if (!incumbent_x_) throw std::runtime_error("branch and bound ended without a feasible point");
    result_.optimum = incumbent_;
    result_.x_star = *incumbent_x_;
    result_.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return result_;
  }

 private:
  bool keep(const Node& node) const { return node.bound < incumbent_ - config_.prune_tol; }

  void mark_pruned_on_pop(const Node& node) { result_.node_log[node.id].pruned = true; }

  void offer(const RoundingOutcome& r, NodeLogEntry& entry) {
    entry.rounding_method = to_string(r.method);
    entry.f_ub = r.f_value;
    if (r.fell_back) ++result_.rounding_fallbacks;
    if (r.f_value < incumbent_) {
      incumbent_ = r.f_value;
      incumbent_x_ = r.x_ub;
    }
  }

  std::optional<Node> solve_node(const Fixing& fixing, double parent_bound, bool is_root) {
    const RelaxationResult rel = lower_bound(inst_, fixing, config_.solver);
    NodeLogEntry entry;
    entry.node_id = result_.node_count++;
    entry.depth = static_cast<int>(fixing.values.size());
    entry.f_ub = std::numeric_limits<double>::quiet_NaN();

    if (rel.status == SolveStatus::infeasible) {
      entry.bound = rel.bound;
      entry.incumbent = incumbent_;
      entry.pruned = true;
      result_.node_log.push_back(entry);
      return std::nullopt;
    }
    Node node;
    node.id = entry.node_id;
    node.fixing = fixing;
    if (rel.feasible()) {
      node.bound = rel.bound;
      node.x_rel = rel.x_rel;
    } else {
      // keep the parent's bound and branch on the fixing alone
      ++result_.relaxation_failures;
      node.bound = parent_bound;
      node.x_rel = Eigen::VectorXd::Zero(inst_.n);
      for (const auto& [k, v] : fixing.values) node.x_rel(k) = v;
    }
    entry.bound = node.bound;

    const bool leaf = static_cast<int>(fixing.values.size()) == inst_.n;
    if (leaf) {
      RoundingOutcome r;
      r.method = RoundingMethod::classical;
      r.x_ub = node.x_rel;
      r.f_value = rel.feasible() ? rel.bound : evaluate_f_at(inst_, node.x_rel, config_.solver);
      offer(r, entry);
    } else if (rel.feasible()) {
      if (is_root) offer(classical_rounding(inst_, node.x_rel, config_.solver), entry);
      const bool skip = is_root && config_.rounding_mode == RoundingMethod::classical;
      if (config_.round_every_node && !skip) offer(round(node.x_rel), entry);
    }
    entry.incumbent = incumbent_;
    entry.pruned = !keep(node) || leaf;
    result_.node_log.push_back(entry);
    if (leaf) return std::nullopt;
    return node;
  }

  RoundingOutcome round(const Eigen::VectorXd& x_rel) {
    if (config_.rounding_mode == RoundingMethod::classical) return classical_rounding(inst_, x_rel, config_.solver);
    return primal_heuristic(inst_, *tent_, x_rel, config_.solver);
  }

  int branch_index(const Node& node) const {
    int best = -1;
    double best_abs = std::numeric_limits<double>::infinity();
    for (int i = 0; i < inst_.n; ++i) {
      if (node.fixing.fixed(i)) continue;
      const double a = std::abs(node.x_rel(i));
      if (a < best_abs) {
        best_abs = a;
        best = i;
      }
    }
    return best;
  }

  const RobustQuadraticInstance& inst_;
  const BnBConfig& config_;
  std::optional<TentProgram> tent_;
  BnBResult result_;
  double incumbent_ = std::numeric_limits<double>::infinity();
  std::optional<Eigen::VectorXd> incumbent_x_;
  bool stop_ = false;
};

}  // namespace

BnBResult solve(const RobustQuadraticInstance& inst, const BnBConfig& config) { return Search(inst, config).run(); }

std::pair<double, Eigen::VectorXd> brute_force(const RobustQuadraticInstance& inst) {
  check_instance(inst);
  const int n = inst.n;
  if (n > 22) throw std::invalid_argument("brute_force: n must be at most 22");
  const TrustRegionOracle oracle(inst.C);
  double best = std::numeric_limits<double>::infinity();
  Eigen::VectorXd best_x;
  Eigen::VectorXd x(n);
  for (long long mask = 0; mask < (1LL << n); ++mask) {
    int s = 0;
    for (int i = 0; i < n; ++i) {
      x(i) = (mask >> (n - 1 - i)) & 1 ? 1.0 : -1.0;
      s += static_cast<int>(x(i));
    }
    if (s < inst.l || s > inst.u) continue;
    const double v = evaluate_f_oracle(inst, oracle, x).value;
    if (v < best) {
      best = v;
      best_x = x;
    }
  }
  return {best, best_x};
}

void write_node_log_csv(std::ostream& out, const std::vector<NodeLogEntry>& log) {
  out << "node_id,depth,bound,incumbent,pruned,rounding_method,f_ub\n";
  out.precision(17);
  for (const auto& e : log)
    out << e.node_id << ',' << e.depth << ',' << e.bound << ',' << e.incumbent << ',' << (e.pruned ? 1 : 0) << ','
        << e.rounding_method << ',' << e.f_ub << '\n';
}

}  // namespace ctent
