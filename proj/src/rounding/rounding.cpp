#include "ctent/rounding.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "ctent/objective.hpp"

namespace ctent {

Eigen::VectorXd linear_minimize_over_X(const Eigen::VectorXd& y, int l, int u) {
  const int n = static_cast<int>(y.size());
  const auto window = achievable_window(n, l, u);
  if (!window) throw std::invalid_argument("linear_minimize_over_X: window has no achievable sum");
  Eigen::VectorXd x(n);
  int s = 0;
  for (int i = 0; i < n; ++i) {
    x(i) = y(i) < 0.0 ? 1.0 : -1.0;
    s += static_cast<int>(x(i));
  }
  if (s >= window->first && s <= window->second) return x;

  // flipping i costs 2|y_i|; only coordinates on the wrong side may move
  const double from = s > window->second ? 1.0 : -1.0;
  const int flips = s > window->second ? (s - window->second) / 2 : (window->first - s) / 2;
  std::vector<int> order;
  for (int i = 0; i < n; ++i)
    if (x(i) == from) order.push_back(i);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return std::abs(y(a)) < std::abs(y(b)); });
  for (int k = 0; k < flips; ++k) x(order[k]) = -from;
  return x;
}

Eigen::VectorXd closest_feasible(const Eigen::VectorXd& x0, int l, int u) {
  return linear_minimize_over_X(-x0, l, u);
}

std::string to_string(RoundingMethod method) {
  return method == RoundingMethod::classical ? "classical" : "tent_heuristic";
}

double evaluate_f_at(const RobustQuadraticInstance& inst, const Eigen::VectorXd& x, const SolverOptions& opts) {
  const SdpEvaluation sdp = evaluate_f_sdp(inst, x, opts);
  if (sdp.status == SolveStatus::optimal) return sdp.value;
  return evaluate_f_oracle(inst, x).value;
}

RoundingOutcome classical_rounding(const RobustQuadraticInstance& inst, const Eigen::VectorXd& x_rel,
                                   const SolverOptions& opts) {
  RoundingOutcome out;
  out.method = RoundingMethod::classical;
  out.x_ub = closest_feasible(x_rel, inst.l, inst.u);
  out.f_value = evaluate_f_at(inst, out.x_ub, opts);
  return out;
}

namespace {

// x_rel from a relaxation solve can sit marginally outside the box or window
Eigen::VectorXd into_domain(const TentProgram& tp, const Eigen::VectorXd& x_rel) {
  Eigen::VectorXd x = x_rel.cwiseMax(-1.0).cwiseMin(1.0);
  for (Eigen::Index i = 0; i < x.size(); ++i)
    if (1.0 - std::abs(x(i)) <= 1e-6) x(i) = x(i) > 0.0 ? 1.0 : -1.0;
  if (!tp.center) return x;
  const Eigen::VectorXd& c = *tp.center;
  const double s = x.sum(), cs = c.sum();
  double t = 0.0;
  if (s > tp.u) t = (s - tp.u) / (s - cs);
  if (s < tp.l) t = (tp.l - s) / (cs - s);
  return x + std::clamp(t, 0.0, 1.0) * (c - x);
}

}  // namespace

RoundingOutcome primal_heuristic(const RobustQuadraticInstance& inst, const TentProgram& tp,
                                 const Eigen::VectorXd& x_rel, const SolverOptions& opts) {
  if (x_rel.size() != inst.n || tp.n != inst.n) throw std::invalid_argument("primal_heuristic: dimension mismatch");
  Eigen::VectorXd x = into_domain(tp, x_rel);
  TentEvaluation ev = evaluate_tent(tp, x, opts);
  if (!ev.finite() && tp.center) {
    x += 1e-3 * (*tp.center - x);
    ev = evaluate_tent(tp, x, opts);
  }
  if (!ev.finite()) {
    RoundingOutcome out = classical_rounding(inst, x_rel, opts);
    out.method = RoundingMethod::tent_heuristic;
    out.fell_back = true;
    out.note = "tent evaluation ended with " + to_string(ev.status);
    return out;
  }
  RoundingOutcome out;
  out.method = RoundingMethod::tent_heuristic;
  out.x_ub = linear_minimize_over_X(ev.supergradient, inst.l, inst.u);
  out.f_value = evaluate_f_at(inst, out.x_ub, opts);
  out.epsilon = ev.epsilon;
  out.supergradient_norm = ev.supergradient.norm();
  return out;
}

}  // namespace ctent
