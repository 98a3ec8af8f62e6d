#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "ctent/bnb.hpp"
#include "ctent/harness.hpp"
#include "ctent/objective.hpp"
#include "ctent/relaxation.hpp"
#include "ctent/tent.hpp"

using namespace ctent;
using nlohmann::json;

namespace {

Eigen::VectorXd parse_point(const std::string& text, int n) {
  std::vector<double> vals;
  std::stringstream in(text);
  std::string tok;
  while (std::getline(in, tok, ',')) vals.push_back(std::stod(tok));
  if (static_cast<int>(vals.size()) != n)
    throw std::invalid_argument("point has " + std::to_string(vals.size()) + " entries, expected " + std::to_string(n));
  return Eigen::Map<Eigen::VectorXd>(vals.data(), n);
}

std::vector<double> to_vec(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

// writes to path, or stdout when path is empty or "-"
template <class F>
void with_output(const std::string& path, F&& write) {
  if (path.empty() || path == "-") {
    write(std::cout);
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  write(out);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Concave-tent rounding and branch and bound for robust binary quadratic programs"};
  app.require_subcommand(1);
  SolverOptions solver;
  app.add_option("--tol", solver.tol, "solver tolerance")->capture_default_str();

  // generate
  auto* gen = app.add_subcommand("generate", "write a random instance as JSON");
  int g_n = 8, g_q = 3, g_l = -8, g_u = 8;
  std::uint64_t g_seed = 1;
  std::string g_out;
  gen->add_option("-n", g_n)->required();
  gen->add_option("-q", g_q)->required();
  gen->add_option("-l", g_l, "lower window bound")->capture_default_str();
  gen->add_option("-u", g_u, "upper window bound")->capture_default_str();
  gen->add_option("--seed", g_seed)->capture_default_str();
  gen->add_option("-o,--out", g_out, "output file (default stdout)");

  // evaluate
  auto* eval = app.add_subcommand("evaluate", "f at a point");
  std::string instance_path, point;
  eval->add_option("instance", instance_path)->required()->check(CLI::ExistingFile);
  eval->add_option("--x", point, "comma separated point")->required();

  // tent
  auto* tent = app.add_subcommand("tent", "tent value and supergradient at a point");
  bool no_cuts = false;
  tent->add_option("instance", instance_path)->required()->check(CLI::ExistingFile);
  tent->add_option("--x", point, "comma separated point")->required();
  tent->add_flag("--no-cuts", no_cuts, "drop the second-order cone cuts");

  // solve
  auto* slv = app.add_subcommand("solve", "branch and bound");
  std::string mode = "classical", node_log;
  BnBConfig cfg;
  slv->add_option("instance", instance_path)->required()->check(CLI::ExistingFile);
  slv->add_option("--mode", mode)->check(CLI::IsMember({"classical", "tent"}))->capture_default_str();
  slv->add_option("--max-nodes", cfg.max_nodes)->capture_default_str();
  slv->add_option("--prune-tol", cfg.prune_tol)->capture_default_str();
  slv->add_option("--node-log", node_log, "write the node log as CSV");
  bool verify = false;
  slv->add_flag("--verify", verify, "also enumerate X (n <= 22)");

  // experiment
  auto* exp = app.add_subcommand("experiment", "run an experiment spec file");
  std::string spec_path, exp_out;
  exp->add_option("spec", spec_path)->required()->check(CLI::ExistingFile);
  exp->add_option("-o,--out", exp_out, "CSV output (replaces the file's output entry)");

  // sample-tent
  auto* smp = app.add_subcommand("sample-tent", "tent values on a grid as CSV");
  std::string example, s_out;
  double lo = 0.0, hi = 1.0;
  int points = 11;
  auto* inst_opt = smp->add_option("--instance", instance_path)->check(CLI::ExistingFile);
  smp->add_option("--example", example, "built-in data")->check(CLI::IsMember({"unit-interval"}))->excludes(inst_opt);
  smp->add_option("--lo", lo)->capture_default_str();
  smp->add_option("--hi", hi)->capture_default_str();
  smp->add_option("--points", points, "grid points per coordinate")->capture_default_str();
  smp->add_option("-o,--out", s_out, "output file (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) {
      const auto inst = generate({}, g_n, g_q, g_l, g_u, g_seed);
      with_output(g_out, [&](std::ostream& o) { o << to_json(inst).dump(2) << '\n'; });
    } else if (*eval) {
      const auto inst = read_instance(instance_path);
      const Eigen::VectorXd x = parse_point(point, inst.n);
      const auto sdp = evaluate_f_sdp(inst, x, solver);
      const auto oracle = evaluate_f_oracle(inst, x);
      json j{{"f_oracle", oracle.value}, {"u_star", to_vec(oracle.u_star)}, {"sdp_status", to_string(sdp.status)}};
      if (sdp.status == SolveStatus::optimal) j["f_sdp"] = sdp.value;
      std::cout << j.dump(2) << '\n';
    } else if (*tent) {
      const auto inst = read_instance(instance_path);
      const Eigen::VectorXd x = parse_point(point, inst.n);
      const auto ev = evaluate_tent(build_tent(inst, !no_cuts), x, solver);
      json j{{"status", to_string(ev.status)}, {"warnings", ev.warnings}};
      if (ev.finite()) {
        j["g"] = ev.value;
        j["supergradient"] = to_vec(ev.supergradient);
        j["epsilon"] = ev.epsilon;
      }
      std::cout << j.dump(2) << '\n';
    } else if (*slv) {
      const auto inst = read_instance(instance_path);
      cfg.rounding_mode = parse_mode(mode);
      cfg.solver = solver;
      const auto r = solve(inst, cfg);
      json j{{"optimum", r.optimum},
             {"x_star", to_vec(r.x_star)},
             {"node_count", r.node_count},
             {"wall_time_s", r.wall_time},
             {"proven_optimal", r.proven_optimal},
             {"relaxation_failures", r.relaxation_failures},
             {"rounding_fallbacks", r.rounding_fallbacks}};
      if (verify) {
        const auto [opt, x] = brute_force(inst);
        j["enumeration_optimum"] = opt;
        j["enumeration_x"] = to_vec(x);
      }
      std::cout << j.dump(2) << '\n';
      if (!node_log.empty()) with_output(node_log, [&](std::ostream& o) { write_node_log_csv(o, r.node_log); });
    } else if (*exp) {
      std::ifstream in(spec_path);
      ExperimentSpec spec = experiment_spec_from_json(json::parse(in));
      if (!exp_out.empty()) spec.output = exp_out;
      with_output(spec.output, [&](std::ostream& o) { run_experiment(spec, o, std::cerr); });
    } else if (*smp) {
      if (example.empty() && instance_path.empty()) throw std::invalid_argument("give --instance or --example");
      with_output(s_out, [&](std::ostream& o) {
        if (!example.empty()) {
          const Tent01Data data = unit_interval_example();
          sample_tent(build_tent01(data, false), build_tent01(data, true),
                      [&](const Eigen::VectorXd& x) { return data.f(x); }, grid(data.n, lo, hi, points), o, solver);
        } else {
          const auto inst = read_instance(instance_path);
          const TrustRegionOracle oracle(inst.C);
          sample_tent(build_tent(inst, true), build_tent(inst, false),
                      [&](const Eigen::VectorXd& x) { return evaluate_f_oracle(inst, oracle, x).value; },
                      grid(inst.n, lo, hi, points), o, solver);
        }
      });
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
