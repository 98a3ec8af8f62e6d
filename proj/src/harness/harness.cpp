#include "ctent/harness.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

namespace ctent {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t instance_seed(std::uint64_t base, int n, int q, int l, int u, int k) {
  std::uint64_t s = base;
  for (const std::int64_t v : {std::int64_t{n}, std::int64_t{q}, std::int64_t{l}, std::int64_t{u}, std::int64_t{k}}) {
    s ^= static_cast<std::uint64_t>(v);
    s = splitmix64(s);
  }
  return s;
}

namespace {

// uniform on [lo, hi) from the top 53 bits, identical on every platform
class Uniform {
 public:
  explicit Uniform(std::uint64_t seed) {
    std::uint64_t s = seed;
    std::seed_seq seq{static_cast<std::uint32_t>(splitmix64(s)), static_cast<std::uint32_t>(splitmix64(s)),
                      static_cast<std::uint32_t>(splitmix64(s)), static_cast<std::uint32_t>(splitmix64(s))};
    engine_.seed(seq);
  }
  double operator()(double lo, double hi) {
    const double unit = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * unit;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace

RobustQuadraticInstance generate(const GenerationRecipe& recipe, int n, int q, int l, int u, std::uint64_t seed) {
  if (n < 1 || q < 1) throw std::invalid_argument("generate: n and q must be >= 1");
  if (!window_feasible(n, l, u)) throw std::invalid_argument("generate: window has no achievable sum");
  Uniform rng(seed);
  auto fill = [&](int rows, int cols, double lo, double hi) {
    Eigen::MatrixXd M(rows, cols);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) M(i, j) = rng(lo, hi);
    return M;
  };
  RobustQuadraticInstance inst;
  inst.n = n;
  inst.q = q;
  inst.l = l;
  inst.u = u;
  inst.seed = seed;
  const Eigen::MatrixXd At = fill(n, n, recipe.a_lo, recipe.a_hi);
  const Eigen::MatrixXd Ct = fill(q, q, recipe.a_lo, recipe.a_hi);
  const Eigen::MatrixXd Bt = fill(q, n, recipe.b_lo, recipe.b_hi);
  inst.A = (At + At.transpose()) / (static_cast<double>(n) * n);
  inst.C = (Ct + Ct.transpose()) / (static_cast<double>(q) * q);
  inst.B = Bt / (static_cast<double>(q) * n);
  inst.a = fill(n, 1, recipe.a_lo, recipe.a_hi).col(0) / (static_cast<double>(n) * n);
  inst.c = fill(q, 1, recipe.b_lo, recipe.b_hi).col(0) / (static_cast<double>(q) * q);
  return inst;
}

std::string InstanceType::name() const {
  return std::to_string(n) + "_" + std::to_string(q) + "_" + std::to_string(l) + "_" + std::to_string(u);
}

InstanceType InstanceType::parse(const std::string& name) {
  InstanceType t;
  char s1 = 0, s2 = 0, s3 = 0;
  std::istringstream in(name);
  if (!(in >> t.n >> s1 >> t.q >> s2 >> t.l >> s3 >> t.u) || s1 != '_' || s2 != '_' || s3 != '_' || !in.eof())
    throw std::invalid_argument("instance type must read n_q_l_u, got '" + name + "'");
  return t;
}

RoundingMethod parse_mode(const std::string& mode) {
  if (mode == "classical") return RoundingMethod::classical;
  if (mode == "tent" || mode == "tent_heuristic") return RoundingMethod::tent_heuristic;
  throw std::invalid_argument("unknown rounding mode '" + mode + "'");
}

ExperimentSpec experiment_spec_from_json(const nlohmann::json& j) {
  ExperimentSpec spec;
  for (const auto& t : j.at("instance_types")) {
    InstanceType it;
    if (t.is_string()) {
      it = InstanceType::parse(t.get<std::string>());
    } else {
      const auto v = t.get<std::vector<int>>();
      if (v.size() != 4) throw std::invalid_argument("instance type needs [n, q, l, u]");
      it = {v[0], v[1], v[2], v[3]};
    }
    if (it.n < 1 || it.q < 1 || !window_feasible(it.n, it.l, it.u))
      throw std::invalid_argument("instance type " + it.name() + " is not valid");
    spec.instance_types.push_back(it);
  }
  spec.instances_per_type = j.value("instances_per_type", 5);
  if (spec.instances_per_type < 1) throw std::invalid_argument("instances_per_type must be >= 1");
  spec.seed = j.value("seed", std::uint64_t{1});
  if (j.contains("modes")) {
    spec.modes.clear();
    for (const auto& m : j.at("modes")) spec.modes.push_back(parse_mode(m.get<std::string>()));
  }
  spec.max_nodes = j.value("max_nodes", 10000);
  spec.output = j.value("output", std::string{});
  return spec;
}

int run_experiment(const ExperimentSpec& spec, std::ostream& out, std::ostream& log) {
  out << "instance_id,n,q,l,u,seed,mode,node_count,wall_time_s,optimum,x_star\n";
  out.precision(17);
  int rows = 0;
  for (const auto& t : spec.instance_types)
    for (int k = 0; k < spec.instances_per_type; ++k) {
      const std::uint64_t seed = instance_seed(spec.seed, t.n, t.q, t.l, t.u, k);
      const std::string id = t.name() + "_" + std::to_string(k);
      RobustQuadraticInstance inst;
      try {
        inst = generate(spec.recipe, t.n, t.q, t.l, t.u, seed);
      } catch (const std::exception& e) {
        log << id << ": generation failed: " << e.what() << '\n';
        continue;
      }
      for (const RoundingMethod mode : spec.modes) {
        BnBConfig cfg;
        cfg.rounding_mode = mode;
        cfg.max_nodes = spec.max_nodes;
        try {
          const BnBResult r = solve(inst, cfg);
          std::string xs;
          for (Eigen::Index i = 0; i < r.x_star.size(); ++i) xs += r.x_star(i) > 0 ? '+' : '-';
          out << id << ',' << t.n << ',' << t.q << ',' << t.l << ',' << t.u << ',' << seed << ',' << to_string(mode)
              << ',' << r.node_count << ',' << r.wall_time << ',' << r.optimum << ',' << xs << '\n';
          ++rows;
          if (!r.proven_optimal) log << id << " " << to_string(mode) << ": node limit reached\n";
        } catch (const std::exception& e) {
          log << id << " " << to_string(mode) << ": " << e.what() << '\n';
        }
      }
    }
  return rows;
}

std::vector<Eigen::VectorXd> grid(int dim, double lo, double hi, int points) {
  if (dim < 1 || points < 1) throw std::invalid_argument("grid: need dim >= 1 and points >= 1");
  std::vector<double> axis(points);
  for (int k = 0; k < points; ++k) axis[k] = points == 1 ? lo : lo + (hi - lo) * k / (points - 1);
  std::vector<Eigen::VectorXd> out;
  std::vector<int> idx(dim, 0);
  while (true) {
    Eigen::VectorXd x(dim);
    for (int d = 0; d < dim; ++d) x(d) = axis[idx[d]];
    out.push_back(x);
    int d = dim - 1;
    while (d >= 0 && ++idx[d] == points) idx[d--] = 0;
    if (d < 0) break;
  }
  return out;
}

void sample_tent(const TentProgram& with_cuts, const TentProgram& without_cuts,
                 const std::function<double(const Eigen::VectorXd&)>& f, const std::vector<Eigen::VectorXd>& points,
                 std::ostream& out, const SolverOptions& opts) {
  const int n = with_cuts.n;
  for (int i = 0; i < n; ++i) out << 'x' << i + 1 << ',';
  out << "g_with_cuts,g_without_cuts,f";
  for (int i = 0; i < n; ++i) out << ",y" << i + 1;
  out << ",epsilon\n";
  out.precision(12);
  for (const auto& x : points) {
    const TentEvaluation g = evaluate_tent(with_cuts, x, opts);
    const TentEvaluation h = evaluate_tent(without_cuts, x, opts);
    for (int i = 0; i < n; ++i) out << x(i) << ',';
    out << g.value << ',' << h.value << ',' << f(x);
    const bool ok = g.finite();
    for (int i = 0; i < n; ++i) out << ',' << (ok ? g.supergradient(i) : std::numeric_limits<double>::quiet_NaN());
    out << ',' << (ok ? g.epsilon : std::numeric_limits<double>::quiet_NaN()) << '\n';
  }
}

}  // namespace ctent
