#include "ctent/objective.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "ctent/builder.hpp"

namespace ctent {

SdpEvaluation evaluate_f_sdp(const RobustQuadraticInstance& inst, const Eigen::VectorXd& x,
                             const SolverOptions& opts) {
  if (x.size() != inst.n) throw std::invalid_argument("evaluate_f_sdp: x has wrong size");
  const Eigen::VectorXd g = inst.B * x + inst.c;
  ProgramBuilder b;
  const int alpha = b.add_variable();
  const int lambda = b.add_variable();
  b.add_psd(inst.q + 1, [&](int i, int j) -> LinExpr {
    if (i == 0) return LinExpr::var(alpha);
    if (j == 0) return g(i - 1);
    LinExpr e(-inst.C(i - 1, j - 1));
    if (i == j) e -= LinExpr::var(lambda);
    return e;
  });
  b.add_nonneg({-LinExpr::var(lambda)});
  b.set_objective(LinExpr::var(alpha) - LinExpr::var(lambda) + x.dot(inst.A * x) + 2.0 * inst.a.dot(x),
                  Sense::minimize);
  const ConicSolution sol = solve(b.build().base, opts);
  SdpEvaluation out;
  out.status = sol.status;
  out.value = sol.objective_value;
  if (sol.primal.size() == 2) {
    out.alpha = sol.primal(alpha);
    out.lambda = sol.primal(lambda);
  }
  return out;
}

TrustRegionOracle::TrustRegionOracle(const Eigen::MatrixXd& C) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (C + C.transpose()));
  eigenvalues_ = es.eigenvalues();
  eigenvectors_ = es.eigenvectors();
}

TrustRegionOracle::Result TrustRegionOracle::maximize(const Eigen::VectorXd& g) const {
  const int q = static_cast<int>(eigenvalues_.size());
  const Eigen::VectorXd gh = eigenvectors_.transpose() * g;
  const Eigen::VectorXd& lam = eigenvalues_;
  const double lmax = lam(q - 1);
  const double gnorm = gh.norm();
  const double eig_tol = 1e-12 * (1.0 + lam.cwiseAbs().maxCoeff());

  auto u_of = [&](double mu) {
    Eigen::VectorXd uh(q);
    for (int i = 0; i < q; ++i) uh(i) = gh(i) / (mu - lam(i));
    return uh;
  };
  auto finish = [&](const Eigen::VectorXd& uh, double mu) {
    Result r;
    r.u = eigenvectors_ * uh;
    r.value = uh.dot(lam.cwiseProduct(uh)) + 2.0 * gh.dot(uh);
    r.multiplier = mu;
    return r;
  };

  // Interior solution: C negative definite and the unconstrained maximizer fits.
  if (lmax < -eig_tol) {
    const Eigen::VectorXd uh = u_of(0.0);
    if (uh.norm() <= 1.0) return finish(uh, 0.0);
  }

  // Hard case: g has no weight on the leading eigenspace.
  double lead_weight = 0.0;
  for (int i = 0; i < q; ++i)
    if (lam(i) >= lmax - eig_tol) lead_weight += gh(i) * gh(i);
  if (lmax >= -eig_tol && std::sqrt(lead_weight) <= 1e-12 * (1.0 + gnorm)) {
    const double mu = std::max(lmax, 0.0);
    Eigen::VectorXd uh = Eigen::VectorXd::Zero(q);
    for (int i = 0; i < q; ++i)
      if (lam(i) < lmax - eig_tol) uh(i) = gh(i) / (mu - lam(i));
    const double rest = uh.squaredNorm();
    if (rest <= 1.0) {
      uh(q - 1) += std::sqrt(1.0 - rest);
      return finish(uh, mu);
    }
  }

  // Boundary solution: ||u(mu)|| = 1 for mu in (lo, hi]. Newton on
  // 1/||u(mu)|| - 1, which is close to linear, with bisection safeguard.
  double lo = std::max(lmax, 0.0);
  double hi = lo + gnorm;
  double mu = hi;
  for (int it = 0; it < 200; ++it) {
    const Eigen::VectorXd uh = u_of(mu);
    const double nu = uh.norm();
    const double phi = 1.0 / nu - 1.0;
    if (std::abs(phi) <= 1e-15) break;
    if (phi < 0.0)
      lo = mu;
    else
      hi = mu;
    double d3 = 0.0;
    for (int i = 0; i < q; ++i) d3 += gh(i) * gh(i) / std::pow(mu - lam(i), 3);
    const double dphi = d3 / (nu * nu * nu);
    double next = mu - phi / dphi;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (hi - lo <= 1e-16 * std::max(1.0, std::abs(mu))) break;
    mu = next;
  }
  return finish(u_of(mu), mu);
}

OracleEvaluation evaluate_f_oracle(const RobustQuadraticInstance& inst, const TrustRegionOracle& oracle,
                                   const Eigen::VectorXd& x) {
  if (x.size() != inst.n) throw std::invalid_argument("evaluate_f_oracle: x has wrong size");
  const auto tr = oracle.maximize(inst.B * x + inst.c);
  return {x.dot(inst.A * x) + 2.0 * inst.a.dot(x) + tr.value, tr.u};
}

OracleEvaluation evaluate_f_oracle(const RobustQuadraticInstance& inst, const Eigen::VectorXd& x) {
  return evaluate_f_oracle(inst, TrustRegionOracle(inst.C), x);
}

double AffinePieces::value(const Eigen::VectorXd& x) const {
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < slopes.size(); ++i) best = std::max(best, slopes[i].dot(x) - intercepts[i]);
  return best;
}

double pasch_hausdorff(const AffinePieces& pieces, const Eigen::VectorXd& x, const SolverOptions& opts) {
  const int k = static_cast<int>(pieces.slopes.size());
  if (k == 0 || static_cast<int>(pieces.intercepts.size()) != k)
    throw std::invalid_argument("pasch_hausdorff: need matching slopes and intercepts");
  if (!(pieces.beta > 0.0)) throw std::invalid_argument("pasch_hausdorff: beta must be positive");
  const int dim = static_cast<int>(x.size());
  for (const auto& s : pieces.slopes)
    if (s.size() != dim) throw std::invalid_argument("pasch_hausdorff: slope dimension mismatch");

  ProgramBuilder b;
  const int lam = b.add_variables(k);
  std::vector<LinExpr> nonneg, tail(dim);
  LinExpr total(-1.0), obj;
  for (int i = 0; i < k; ++i) {
    nonneg.push_back(LinExpr::var(lam + i));
    total += LinExpr::var(lam + i);
    obj += LinExpr::var(lam + i, pieces.slopes[i].dot(x) - pieces.intercepts[i]);
    for (int d = 0; d < dim; ++d) tail[d] += LinExpr::var(lam + i, pieces.slopes[i](d));
  }
  b.add_nonneg(nonneg);
  b.add_zero({total});
  if (dim > 0) b.add_soc(pieces.beta, tail);
  b.set_objective(obj, Sense::maximize);
  const ConicSolution sol = solve(b.build().base, opts);
  // No mixture of slopes fits in the beta-ball: the envelope is identically -inf.
  if (sol.status == SolveStatus::infeasible) return -std::numeric_limits<double>::infinity();
  if (!sol.optimal()) throw std::runtime_error("pasch_hausdorff: solve ended with " + to_string(sol.status));
  return sol.objective_value;
}

}  // namespace ctent
