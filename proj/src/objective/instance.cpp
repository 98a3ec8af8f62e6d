#include "ctent/instance.hpp"

#include <fstream>
#include <stdexcept>

namespace ctent {

namespace {

Eigen::MatrixXd matrix_from_json(const nlohmann::json& j, int rows, int cols, const char* name) {
  if (!j.is_array() || static_cast<int>(j.size()) != rows)
    throw std::invalid_argument(std::string(name) + ": expected " + std::to_string(rows) + " rows");
  Eigen::MatrixXd m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    const auto& row = j[i];
    if (!row.is_array() || static_cast<int>(row.size()) != cols)
      throw std::invalid_argument(std::string(name) + ": row " + std::to_string(i) + " needs " +
                                  std::to_string(cols) + " entries");
    for (int k = 0; k < cols; ++k) m(i, k) = row[k].get<double>();
  }
  return m;
}

Eigen::VectorXd vector_from_json(const nlohmann::json& j, int size, const char* name) {
  if (!j.is_array() || static_cast<int>(j.size()) != size)
    throw std::invalid_argument(std::string(name) + ": expected " + std::to_string(size) + " entries");
  Eigen::VectorXd v(size);
  for (int i = 0; i < size; ++i) v(i) = j[i].get<double>();
  return v;
}

nlohmann::json matrix_to_json(const Eigen::MatrixXd& m) {
  nlohmann::json out = nlohmann::json::array();
  for (int i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (int k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
    out.push_back(row);
  }
  return out;
}

Eigen::MatrixXd symmetrized(const Eigen::MatrixXd& m, const char* name) {
  const double asym = m.size() ? (m - m.transpose()).cwiseAbs().maxCoeff() : 0.0;
  if (asym > 1e-9) throw std::invalid_argument(std::string(name) + " is not symmetric");
  return 0.5 * (m + m.transpose());
}

}  // namespace

std::optional<std::pair<int, int>> achievable_window(int n, int l, int u) {
  if (n < 0 || l > u) return std::nullopt;
  // smallest/largest k in [l, u] with k = n mod 2 and |k| <= n
  int lo = std::max(l, -n);
  int hi = std::min(u, n);
  if (((lo - n) % 2 + 2) % 2 != 0) ++lo;
  if (((hi - n) % 2 + 2) % 2 != 0) --hi;
  if (lo > hi) return std::nullopt;
  return std::make_pair(lo, hi);
}

void check_instance(const RobustQuadraticInstance& inst) {
  const int n = inst.n, q = inst.q;
  if (n < 1 || q < 1) throw std::invalid_argument("instance needs n >= 1 and q >= 1");
  if (inst.A.rows() != n || inst.A.cols() != n) throw std::invalid_argument("A must be n x n");
  if (inst.a.size() != n) throw std::invalid_argument("a must have n entries");
  if (inst.B.rows() != q || inst.B.cols() != n) throw std::invalid_argument("B must be q x n");
  if (inst.C.rows() != q || inst.C.cols() != q) throw std::invalid_argument("C must be q x q");
  if (inst.c.size() != q) throw std::invalid_argument("c must have q entries");
  if ((inst.A - inst.A.transpose()).cwiseAbs().maxCoeff() > 1e-12) throw std::invalid_argument("A not symmetric");
  if ((inst.C - inst.C.transpose()).cwiseAbs().maxCoeff() > 1e-12) throw std::invalid_argument("C not symmetric");
  if (inst.l > inst.u) throw std::invalid_argument("window has l > u");
  if (!window_feasible(n, inst.l, inst.u))
    throw std::invalid_argument("window [" + std::to_string(inst.l) + ", " + std::to_string(inst.u) +
                                "] contains no achievable value of e'x");
}

RobustQuadraticInstance instance_from_json(const nlohmann::json& j) {
  RobustQuadraticInstance inst;
  inst.n = j.at("n").get<int>();
  inst.q = j.at("q").get<int>();
  inst.l = j.at("l").get<int>();
  inst.u = j.at("u").get<int>();
  if (inst.n < 1 || inst.q < 1) throw std::invalid_argument("instance needs n >= 1 and q >= 1");
  inst.A = symmetrized(matrix_from_json(j.at("A"), inst.n, inst.n, "A"), "A");
  inst.a = vector_from_json(j.at("a"), inst.n, "a");
  inst.B = matrix_from_json(j.at("B"), inst.q, inst.n, "B");
  inst.C = symmetrized(matrix_from_json(j.at("C"), inst.q, inst.q, "C"), "C");
  inst.c = vector_from_json(j.at("c"), inst.q, "c");
  if (j.contains("seed") && !j.at("seed").is_null()) inst.seed = j.at("seed").get<std::uint64_t>();
  check_instance(inst);
  return inst;
}

nlohmann::json to_json(const RobustQuadraticInstance& inst) {
  nlohmann::json j;
  j["n"] = inst.n;
  j["q"] = inst.q;
  j["l"] = inst.l;
  j["u"] = inst.u;
  j["A"] = matrix_to_json(inst.A);
  j["a"] = std::vector<double>(inst.a.data(), inst.a.data() + inst.a.size());
  j["B"] = matrix_to_json(inst.B);
  j["C"] = matrix_to_json(inst.C);
  j["c"] = std::vector<double>(inst.c.data(), inst.c.data() + inst.c.size());
  if (inst.seed) j["seed"] = *inst.seed;
  return j;
}

RobustQuadraticInstance read_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return instance_from_json(nlohmann::json::parse(in));
}

void write_instance(const RobustQuadraticInstance& inst, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << to_json(inst).dump(2) << '\n';
}

}  // namespace ctent
