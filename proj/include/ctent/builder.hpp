#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "ctent/program.hpp"

namespace ctent {

/// Affine expression in program variables and external parameters.
struct LinExpr {
  std::vector<std::pair<int, double>> vars;
  std::vector<std::pair<int, double>> params;
  double constant = 0.0;

  LinExpr() = default;
  LinExpr(double c) : constant(c) {}  // NOLINT(google-explicit-constructor)

  static LinExpr var(int index, double coef = 1.0) {
    LinExpr e;
    e.vars.emplace_back(index, coef);
    return e;
  }
  static LinExpr param(int index, double coef = 1.0) {
    LinExpr e;
    e.params.emplace_back(index, coef);
    return e;
  }

  LinExpr& operator+=(const LinExpr& o);
  LinExpr& operator-=(const LinExpr& o);
  LinExpr& operator*=(double s);

  double evaluate(const Eigen::VectorXd& v, const Eigen::VectorXd& p = {}) const;
};

inline LinExpr operator+(LinExpr a, const LinExpr& b) { return a += b; }
inline LinExpr operator-(LinExpr a, const LinExpr& b) { return a -= b; }
inline LinExpr operator*(double s, LinExpr a) { return a *= s; }
inline LinExpr operator*(LinExpr a, double s) { return a *= s; }
inline LinExpr operator-(LinExpr a) { return a *= -1.0; }

/// Incremental construction of a ParametricProgram. Every constraint is given
/// as the slack expression that must lie in the cone, e.g. add_nonneg({x - 2})
/// encodes x >= 2.
class ProgramBuilder {
 public:
  explicit ProgramBuilder(int num_params = 0) : num_params_(num_params) {}

  int add_variables(int count);
  int add_variable() { return add_variables(1); }
  int num_vars() const { return num_vars_; }
  int num_params() const { return num_params_; }
  int num_rows() const { return static_cast<int>(rows_.size()); }

  /// Each returns the first row of the new block.
  int add_zero(const std::vector<LinExpr>& exprs);
  int add_nonneg(const std::vector<LinExpr>& exprs);
  int add_soc(const LinExpr& head, const std::vector<LinExpr>& tail);
  /// `entry(i, j)` is queried for i >= j only.
  int add_psd(int order, const std::function<LinExpr(int, int)>& entry);

  void set_objective(const LinExpr& obj, Sense sense);

  ParametricProgram build() const;

 private:
  int add_block(ConeSpec cone, const std::vector<LinExpr>& exprs);

  int num_params_ = 0;
  int num_vars_ = 0;
  std::vector<LinExpr> rows_;
  std::vector<ConeBlock> blocks_;
  LinExpr objective_;
  Sense sense_ = Sense::minimize;
};

}  // namespace ctent
