#include "ctent/builder.hpp"

#include <map>
#include <stdexcept>

namespace ctent {

namespace {

void append_terms(std::vector<std::pair<int, double>>& dst,
                  const std::vector<std::pair<int, double>>& src, double scale) {
  for (const auto& [idx, coef] : src) dst.emplace_back(idx, scale * coef);
}

// Merge duplicate indices and drop exact zeros.
std::vector<std::pair<int, double>> merged(const std::vector<std::pair<int, double>>& terms) {
  std::map<int, double> acc;
  for (const auto& [idx, coef] : terms) acc[idx] += coef;
  std::vector<std::pair<int, double>> out;
  for (const auto& [idx, coef] : acc)
    if (coef != 0.0) out.emplace_back(idx, coef);
  return out;
}

}  // namespace

LinExpr& LinExpr::operator+=(const LinExpr& o) {
  append_terms(vars, o.vars, 1.0);
  append_terms(params, o.params, 1.0);
  constant += o.constant;
  return *this;
}

LinExpr& LinExpr::operator-=(const LinExpr& o) {
  append_terms(vars, o.vars, -1.0);
  append_terms(params, o.params, -1.0);
  constant -= o.constant;
  return *this;
}

LinExpr& LinExpr::operator*=(double s) {
  for (auto& t : vars) t.second *= s;
  for (auto& t : params) t.second *= s;
  constant *= s;
  return *this;
}

double LinExpr::evaluate(const Eigen::VectorXd& v, const Eigen::VectorXd& p) const {
  double out = constant;
  for (const auto& [idx, coef] : vars) out += coef * v(idx);
  for (const auto& [idx, coef] : params) out += coef * p(idx);
  return out;
}

int ProgramBuilder::add_variables(int count) {
  if (count < 0) throw std::invalid_argument("add_variables: negative count");
  const int first = num_vars_;
  num_vars_ += count;
  return first;
}

int ProgramBuilder::add_block(ConeSpec cone, const std::vector<LinExpr>& exprs) {
  if (static_cast<int>(exprs.size()) != cone.slots())
    throw std::invalid_argument("add_block: slot count does not match cone");
  const int first = num_rows();
  for (const auto& e : exprs) {
    for (const auto& [idx, coef] : e.vars)
      if (idx < 0 || idx >= num_vars_) throw std::out_of_range("LinExpr: unknown variable");
    for (const auto& [idx, coef] : e.params)
      if (idx < 0 || idx >= num_params_) throw std::out_of_range("LinExpr: unknown parameter");
    rows_.push_back(e);
  }
  blocks_.push_back({RowRange{first, cone.slots()}, cone});
  return first;
}

int ProgramBuilder::add_zero(const std::vector<LinExpr>& exprs) {
  return add_block(ConeSpec::zero(static_cast<int>(exprs.size())), exprs);
}

int ProgramBuilder::add_nonneg(const std::vector<LinExpr>& exprs) {
  return add_block(ConeSpec::nonnegative(static_cast<int>(exprs.size())), exprs);
}

int ProgramBuilder::add_soc(const LinExpr& head, const std::vector<LinExpr>& tail) {
  std::vector<LinExpr> exprs;
  exprs.reserve(tail.size() + 1);
  exprs.push_back(head);
  exprs.insert(exprs.end(), tail.begin(), tail.end());
  return add_block(ConeSpec::second_order(static_cast<int>(exprs.size())), exprs);
}

int ProgramBuilder::add_psd(int order, const std::function<LinExpr(int, int)>& entry) {
  std::vector<LinExpr> exprs;
  exprs.reserve(order * (order + 1) / 2);
  for (int j = 0; j < order; ++j)
    for (int i = j; i < order; ++i) exprs.push_back(i == j ? entry(i, j) : kSqrt2 * entry(i, j));
  return add_block(ConeSpec::psd(order), exprs);
}

void ProgramBuilder::set_objective(const LinExpr& obj, Sense sense) {
  objective_ = obj;
  sense_ = sense;
}

ParametricProgram ProgramBuilder::build() const {
  ParametricProgram pp;
  ConicProgram& p = pp.base;
  const int m = num_rows();
  p.num_vars = num_vars_;
  p.sense = sense_;
  p.cones = blocks_;
  p.rhs = Eigen::VectorXd::Zero(m);
  p.objective = Eigen::VectorXd::Zero(num_vars_);
  p.offset = objective_.constant;
  pp.objective_param = Eigen::VectorXd::Zero(num_params_);

  std::vector<Eigen::Triplet<double>> coef_trips;
  std::vector<Eigen::Triplet<double>> param_trips;
  // Slack = t'v + p'x + k  ==>  coeffs row = -t, rhs = k, rhs_param row = p.
  for (int r = 0; r < m; ++r) {
    const LinExpr& e = rows_[r];
    for (const auto& [idx, coef] : merged(e.vars)) coef_trips.emplace_back(r, idx, -coef);
    for (const auto& [idx, coef] : merged(e.params)) param_trips.emplace_back(r, idx, coef);
    p.rhs(r) = e.constant;
  }
  p.coeffs.resize(m, num_vars_);
  p.coeffs.setFromTriplets(coef_trips.begin(), coef_trips.end());
  pp.rhs_param.resize(m, num_params_);
  pp.rhs_param.setFromTriplets(param_trips.begin(), param_trips.end());

  for (const auto& [idx, coef] : merged(objective_.vars)) p.objective(idx) = coef;
  for (const auto& [idx, coef] : merged(objective_.params)) pp.objective_param(idx) = coef;
  return pp;
}

}  // namespace ctent
