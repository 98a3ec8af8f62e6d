#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <Eigen/Dense>

#include "json.hpp"

namespace ctent {

/// min_{x in X} x'Ax + 2a'x + max_{||u|| <= 1} 2u'Bx + u'Cu + 2c'u
/// over X = { x in {-1,1}^n : l <= e'x <= u }.
struct RobustQuadraticInstance {
  int n = 0;
  int q = 0;
  Eigen::MatrixXd A;  // n x n, symmetric
  Eigen::VectorXd a;
  Eigen::MatrixXd B;  // q x n
  Eigen::MatrixXd C;  // q x q, symmetric
  Eigen::VectorXd c;
  int l = 0;
  int u = 0;
  std::optional<std::uint64_t> seed;
};

/// Achievable values of e'x for x in {-1,1}^n that fall in [l, u], as the
/// closed range [lo, hi] (same parity as n); nullopt when there are none.
std::optional<std::pair<int, int>> achievable_window(int n, int l, int u);
inline bool window_feasible(int n, int l, int u) { return achievable_window(n, l, u).has_value(); }

/// Throws std::invalid_argument on inconsistent dimensions, asymmetry above
/// 1e-12, or an infeasible window.
void check_instance(const RobustQuadraticInstance& inst);

/// Instance JSON: {"n","q","l","u","A","a","B","C","c","seed"?}; matrices
/// dense row-major. A and C are symmetrized on load after asserting their
/// asymmetry is at most 1e-9.
RobustQuadraticInstance instance_from_json(const nlohmann::json& j);
nlohmann::json to_json(const RobustQuadraticInstance& inst);
RobustQuadraticInstance read_instance(const std::string& path);
void write_instance(const RobustQuadraticInstance& inst, const std::string& path);

}  // namespace ctent
