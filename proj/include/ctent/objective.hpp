#pragma once

#include <vector>

#include <Eigen/Dense>

#include "ctent/instance.hpp"
#include "ctent/solver.hpp"

namespace ctent {

/// f(x) through the SDP  min alpha - lambda  s.t.
/// [[alpha, (Bx+c)'], [Bx+c, -C - lambda I]] psd, lambda <= 0.
struct SdpEvaluation {
  SolveStatus status = SolveStatus::numerical_failure;
  double value = 0.0;
  double alpha = 0.0;
  double lambda = 0.0;
};

SdpEvaluation evaluate_f_sdp(const RobustQuadraticInstance& inst, const Eigen::VectorXd& x,
                             const SolverOptions& opts = {});

/// max_{||u|| <= 1} u'Cu + 2g'u via one eigendecomposition of C and a
/// safeguarded Newton iteration on the secular equation. Handles the hard
/// case (g orthogonal to the leading eigenspace).
class TrustRegionOracle {
 public:
  explicit TrustRegionOracle(const Eigen::MatrixXd& C);

  struct Result {
    double value = 0.0;
    Eigen::VectorXd u;
    double multiplier = 0.0;  // mu >= 0 with (mu I - C) u = g
  };
  Result maximize(const Eigen::VectorXd& g) const;

 private:
  Eigen::VectorXd eigenvalues_;  // ascending
  Eigen::MatrixXd eigenvectors_;
};

struct OracleEvaluation {
  double value = 0.0;
  Eigen::VectorXd u_star;
};

OracleEvaluation evaluate_f_oracle(const RobustQuadraticInstance& inst, const Eigen::VectorXd& x);
OracleEvaluation evaluate_f_oracle(const RobustQuadraticInstance& inst, const TrustRegionOracle& oracle,
                                   const Eigen::VectorXd& x);

/// f(x) = max_i slopes[i]'x - intercepts[i], with a Lipschitz budget beta.
struct AffinePieces {
  std::vector<Eigen::VectorXd> slopes;
  std::vector<double> intercepts;
  double beta = 1.0;

  double value(const Eigen::VectorXd& x) const;
};

/// Envelope sup { x'(U lambda) - b'lambda : lambda in simplex, ||U lambda|| <= beta },
/// U = [slopes]. Coincides with the max-of-affine function when beta is at
/// least every slope norm. Returns -inf when no mixture meets the budget;
/// throws std::runtime_error when the solve fails.
double pasch_hausdorff(const AffinePieces& pieces, const Eigen::VectorXd& x, const SolverOptions& opts = {});

}  // namespace ctent
