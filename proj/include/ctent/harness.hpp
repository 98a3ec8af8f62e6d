#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"

#include "ctent/bnb.hpp"
#include "ctent/instance.hpp"
#include "ctent/tent.hpp"

namespace ctent {

/// Entry distributions of random instances:
///   A = (At + At') / n^2,  At_ij ~ U[a_lo, a_hi]
///   C = (Ct + Ct') / q^2,  Ct_ij ~ U[a_lo, a_hi]
///   B = Bt / (q n),        Bt_ij ~ U[b_lo, b_hi]
///   a_i ~ U[a_lo, a_hi] / n^2,  c_i ~ U[b_lo, b_hi] / q^2
/// drawn in the order At, Ct, Bt, a, c (matrices row by row).
struct GenerationRecipe {
  double a_lo = -0.5;
  double a_hi = 0.5;
  double b_lo = 0.0;
  double b_hi = 1.0;
};

/// SplitMix64 step; used to derive independent stream seeds.
std::uint64_t splitmix64(std::uint64_t& state);

/// Seed of instance k of type (n, q, l, u) under a base seed. Does not depend
/// on other types in the same experiment.
std::uint64_t instance_seed(std::uint64_t base, int n, int q, int l, int u, int k);

/// Deterministic in seed; throws std::invalid_argument for windows without an
/// achievable sum.
RobustQuadraticInstance generate(const GenerationRecipe& recipe, int n, int q, int l, int u, std::uint64_t seed);

struct InstanceType {
  int n = 0, q = 0, l = 0, u = 0;

  std::string name() const;  // "n_q_l_u"
  static InstanceType parse(const std::string& name);
};

struct ExperimentSpec {
  std::vector<InstanceType> instance_types;
  int instances_per_type = 5;
  std::uint64_t seed = 1;
  std::vector<RoundingMethod> modes{RoundingMethod::classical, RoundingMethod::tent_heuristic};
  int max_nodes = 10000;
  std::string output;  // empty: caller's stream
  GenerationRecipe recipe;
};

/// {"instance_types": ["30_10_-5_5", [8, 3, -2, 2]], "instances_per_type": 5,
///  "seed": 1, "modes": ["classical", "tent"], "max_nodes": 10000, "output": "out.csv"}
ExperimentSpec experiment_spec_from_json(const nlohmann::json& j);

RoundingMethod parse_mode(const std::string& mode);

/// CSV columns instance_id,n,q,l,u,seed,mode,node_count,wall_time_s,optimum,x_star
/// (x_star as a string of + and -). Failing instances are reported on `log`
/// and skipped. Returns the number of rows written.
int run_experiment(const ExperimentSpec& spec, std::ostream& out, std::ostream& log);

/// Cartesian grid: `points` values from lo to hi in each of `dim` coordinates.
std::vector<Eigen::VectorXd> grid(int dim, double lo, double hi, int points);

/// CSV columns x1..xn,g_with_cuts,g_without_cuts,f,y1..yn,epsilon; y and
/// epsilon belong to the first tent. Points outside dom g give -inf for g and
/// nan for y and epsilon.
void sample_tent(const TentProgram& with_cuts, const TentProgram& without_cuts,
                 const std::function<double(const Eigen::VectorXd&)>& f, const std::vector<Eigen::VectorXd>& points,
                 std::ostream& out, const SolverOptions& opts = {});

}  // namespace ctent
