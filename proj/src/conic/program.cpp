#include <algorithm>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "ctent/program.hpp"

namespace ctent {

std::string to_string(ConeKind kind) {
  switch (kind) {
    case ConeKind::zero: return "zero";
    case ConeKind::nonnegative: return "nonneg";
    case ConeKind::second_order: return "soc";
    case ConeKind::psd_triangle: return "psd";
  }
  return "?";
}

std::string to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::infeasible: return "infeasible";
    case SolveStatus::unbounded: return "unbounded";
    case SolveStatus::numerical_failure: return "numerical_failure";
  }
  return "?";
}

double cone_violation(const ConeSpec& cone, const Eigen::Ref<const Eigen::VectorXd>& x) {
  switch (cone.kind) {
    case ConeKind::zero: return x.size() ? x.cwiseAbs().maxCoeff() : 0.0;
    case ConeKind::nonnegative: return x.size() ? std::max(0.0, -x.minCoeff()) : 0.0;
    case ConeKind::second_order:
      return std::max(0.0, x.tail(x.size() - 1).norm() - x(0));
    case ConeKind::psd_triangle: {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(smat(x), Eigen::EigenvaluesOnly);
      return std::max(0.0, -es.eigenvalues()(0));
    }
  }
  return 0.0;
}

std::vector<std::string> validate(const ConicProgram& p) {
  std::vector<std::string> out;
  const int m = p.num_rows();
  if (p.num_vars < 0) out.push_back("num_vars is negative");
  if (p.objective.size() != p.num_vars)
    out.push_back("objective has " + std::to_string(p.objective.size()) + " entries, expected " +
                  std::to_string(p.num_vars));
  if (p.coeffs.rows() != m || p.coeffs.cols() != p.num_vars) {
    out.push_back("coefficient matrix is " + std::to_string(p.coeffs.rows()) + "x" +
                  std::to_string(p.coeffs.cols()) + ", expected " + std::to_string(m) + "x" +
                  std::to_string(p.num_vars));
    return out;
  }

  std::vector<int> owner(m, -1);
  for (std::size_t b = 0; b < p.cones.size(); ++b) {
    const auto& blk = p.cones[b];
    const std::string tag = "block " + std::to_string(b) + " (" + to_string(blk.cone.kind) + ")";
    if (blk.cone.dim < 1) out.push_back(tag + ": dimension must be >= 1");
    if (blk.cone.kind == ConeKind::second_order && blk.cone.dim < 2)
      out.push_back(tag + ": second-order cone needs dimension >= 2");
    if (blk.rows.count != blk.cone.slots())
      out.push_back(tag + ": covers " + std::to_string(blk.rows.count) + " rows but cone has " +
                    std::to_string(blk.cone.slots()) + " slots");
    if (blk.rows.start < 0 || blk.rows.end() > m) {
      out.push_back(tag + ": row range [" + std::to_string(blk.rows.start) + ", " +
                    std::to_string(blk.rows.end()) + ") outside [0, " + std::to_string(m) + ")");
      continue;
    }
    for (int r = blk.rows.start; r < blk.rows.end(); ++r) {
      if (owner[r] >= 0) {
        out.push_back(tag + ": row " + std::to_string(r) + " overlaps block " +
                      std::to_string(owner[r]));
        break;
      }
      owner[r] = static_cast<int>(b);
    }
  }
  for (int r = 0; r < m; ++r)
    if (owner[r] < 0) out.push_back("row " + std::to_string(r) + " is assigned to no cone");

  std::vector<bool> used(p.num_vars, false);
  for (int r = 0; r < m; ++r)
    for (SparseRows::InnerIterator it(p.coeffs, r); it; ++it)
      if (it.value() != 0.0) used[it.col()] = true;
  for (int j = 0; j < p.num_vars; ++j)
    if (!used[j] && p.objective(j) == 0.0)
      out.push_back("variable " + std::to_string(j) + " is referenced by no row or objective");
  return out;
}

double dual_objective(const ConicProgram& p, const Eigen::VectorXd& dual) {
  const double sign = p.sense == Sense::minimize ? -1.0 : 1.0;
  return sign * p.rhs.dot(dual) + p.offset;
}

std::vector<double> block_violations(const ConicProgram& p, const Eigen::VectorXd& v) {
  const Eigen::VectorXd slack = p.rhs - p.coeffs * v;
  std::vector<double> out;
  out.reserve(p.cones.size());
  for (const auto& blk : p.cones)
    out.push_back(cone_violation(blk.cone, slack.segment(blk.rows.start, blk.rows.count)));
  return out;
}

double max_violation(const ConicProgram& p, const Eigen::VectorXd& v) {
  const auto viol = block_violations(p, v);
  return viol.empty() ? 0.0 : *std::max_element(viol.begin(), viol.end());
}

void dump(const ConicProgram& p, std::ostream& out) {
  std::ostringstream os;
  os << std::setprecision(17);
  os << (p.sense == Sense::minimize ? "minimize" : "maximize") << " offset=" << p.offset;
  for (int j = 0; j < p.num_vars; ++j)
    if (p.objective(j) != 0.0) os << ' ' << j << ':' << p.objective(j);
  os << '\n';
  std::vector<std::string> tags(p.num_rows(), "none");
  for (std::size_t b = 0; b < p.cones.size(); ++b) {
    const auto& blk = p.cones[b];
    for (int r = blk.rows.start; r < std::min(blk.rows.end(), p.num_rows()); ++r)
      tags[r] = to_string(blk.cone.kind) + '[' + std::to_string(b) + ']';
  }
  for (int r = 0; r < p.num_rows(); ++r) {
    os << r << ' ' << tags[r] << " rhs=" << p.rhs(r);
    for (SparseRows::InnerIterator it(p.coeffs, r); it; ++it) os << ' ' << it.col() << ':' << it.value();
    os << '\n';
  }
  out << os.str();
}

ConicProgram ParametricProgram::at(const Eigen::VectorXd& param) const {
  ConicProgram p = base;
  if (param.size() != num_params()) throw std::invalid_argument("ParametricProgram::at: parameter size");
  if (num_params() > 0) {
    p.rhs += rhs_param * param;
    p.offset += objective_param.dot(param);
  }
  return p;
}

}  // namespace ctent
