// Acceptance checks: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "ctent/bnb.hpp"
#include "ctent/harness.hpp"
#include "ctent/objective.hpp"
#include "ctent/relaxation.hpp"
#include "ctent/rounding.hpp"
#include "ctent/tent.hpp"
#include "test_support.hpp"

namespace {

using namespace ctent;
using Eigen::MatrixXd;
using Eigen::VectorXd;
using Clock = std::chrono::steady_clock;

int failures = 0;

void report(int id, const std::string& name, bool ok, const std::string& detail) {
  std::printf("%s %2d %-32s %s\n", ok ? "PASS" : "FAIL", id, name.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

// ---- closed forms on the unit interval ----

void unit_interval_checks() {
  const Tent01Data data = unit_interval_example();
  {
    const auto t0 = Clock::now();
    const auto tp = build_tent01(data, false);
    double err = 0.0;
    bool finite = true;
    for (int k = 0; k <= 10; ++k) {
      const double x = k / 10.0;
      const auto ev = evaluate_tent(tp, VectorXd::Constant(1, x));
      finite = finite && ev.finite();
      err = std::max(err, std::abs(ev.value - (1.0 - x)));
    }
    const double t = seconds_since(t0);
    const bool ends = data.f(VectorXd::Zero(1)) == 1.0 && data.f(VectorXd::Ones(1)) == 0.0;
    report(1, "unit_interval_full_tent", finite && ends && err <= 1e-5 && t < 1.0,
           fmt("max |g - (1-x)| = %.2e, %.3f s", err, t));
  }
  {
    const auto tp = build_tent01(data, true);
    double err = 0.0;
    bool finite = true;
    for (int k = 0; k <= 10; ++k) {
      const double x = k / 10.0;
      const auto ev = evaluate_tent(tp, VectorXd::Constant(1, x));
      finite = finite && ev.finite();
      err = std::max(err, std::abs(ev.value - (3.0 * std::sqrt(1.0 - x) + 2.0 * x - 2.0)));
    }
    report(2, "unit_interval_relaxed_tent", finite && err <= 1e-5, fmt("max error %.2e", err));
  }
  {
    const auto tp = build_tent01(data, false);
    const VectorXd z = unit_interval_dual_point(tp, 3, -3, -3, 3, 3, 3);
    const auto& base = tp.program.base;
    const double stat = (VectorXd(base.coeffs.transpose() * z) - base.objective).cwiseAbs().maxCoeff();
    double cone = 0.0;
    for (const auto& c : base.cones) {
      const VectorXd zc = z.segment(c.rows.start, c.rows.count);
      if (c.cone.kind == ConeKind::psd_triangle)
        cone = std::min(cone, Eigen::SelfAdjointEigenSolver<MatrixXd>(smat(zc)).eigenvalues().minCoeff());
      else if (c.cone.kind == ConeKind::nonnegative)
        cone = std::min(cone, zc.minCoeff());
    }
    std::mt19937_64 rng(51);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    double err = 0.0;
    for (int k = 0; k < 111; ++k) {
      const double x = k <= 10 ? k / 10.0 : U(rng);
      const auto p = tp.program.at(VectorXd::Constant(1, x));
      err = std::max(err, std::abs(p.rhs.dot(z) + p.offset - (1.0 - x)));
    }
    report(3, "unit_interval_dual_certificate", stat <= 1e-12 && cone >= -1e-12 && err <= 1e-12,
           fmt("stationarity %.1e, cone %.1e, objective error %.1e", stat, cone, err));
  }
}

// ---- property suite on random instances ----

struct Sampled {
  RobustQuadraticInstance inst;
  TentProgram with, without;
  std::vector<VectorXd> vertices, pool;
  std::vector<double> pool_g;
};

void property_checks() {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> dn(4, 8), dq(2, 4);
  std::vector<Sampled> cases;

  // 4: tent equals f on X
  {
    const auto t0 = Clock::now();
    double worst = 0.0;
    bool finite = true;
    for (int k = 0; k < 20; ++k) {
      const int n = dn(rng), q = dq(rng);
      const auto [l, u] = testing::random_window(rng, n);
      Sampled s;
      s.inst = generate({}, n, q, l, u, instance_seed(4, n, q, l, u, k));
      s.with = build_tent(s.inst, true);
      s.without = build_tent(s.inst, false);
      s.vertices = testing::enumerate_X(n, l, u);
      for (const auto& x : s.vertices) {
        const auto ev = evaluate_tent(s.with, x);
        finite = finite && ev.finite();
        const double f = testing::f_ref(s.inst, x);
        worst = std::max(worst, std::abs(ev.value - f) / (1.0 + std::abs(f)));
      }
      cases.push_back(std::move(s));
    }
    const double t = seconds_since(t0);
    report(4, "tent_equals_f_on_vertices", finite && worst <= 1e-4 && t < 300.0,
           fmt("max relative error %.2e over 20 instances, %.1f s", worst, t));
  }

  // 5: concavity along random segments of conv(X)
  {
    double worst = 0.0;
    int evals = 0;
    for (auto& s : cases) {
      std::uniform_real_distribution<double> T(0.0, 1.0);
      for (int k = 0; k < 50; ++k) {
        s.pool.push_back(testing::random_hull_point(rng, s.vertices));
        s.pool_g.push_back(evaluate_tent(s.with, s.pool.back()).value);
      }
      std::uniform_int_distribution<std::size_t> pick(0, s.pool.size() - 1);
      for (int k = 0; k < 200; ++k) {
        const std::size_t i = pick(rng), j = pick(rng);
        const double t = T(rng);
        const double g = evaluate_tent(s.with, t * s.pool[i] + (1 - t) * s.pool[j]).value;
        worst = std::max(worst, t * s.pool_g[i] + (1 - t) * s.pool_g[j] - g);
        ++evals;
      }
    }
    report(5, "tent_concavity", worst <= 1e-6, fmt("max violation %.2e over %.0f combinations", worst, evals));
  }

  // 6: epsilon-supergradient inequality
  {
    double worst = 0.0, max_eps = 0.0;
    int evals = 0;
    for (auto& s : cases) {
      std::vector<VectorXd> centers(s.pool.begin(), s.pool.begin() + 4);
      centers.push_back(s.vertices.front());
      for (const auto& xb : centers) {
        const auto ev = evaluate_tent(s.with, xb);
        if (!ev.finite()) {
          worst = std::numeric_limits<double>::infinity();
          continue;
        }
        max_eps = std::max(max_eps, ev.epsilon);
        for (std::size_t k = 0; k < 50; ++k) {
          const double rhs = ev.value + ev.supergradient.dot(s.pool[k] - xb) + ev.epsilon;
          worst = std::max(worst, s.pool_g[k] - rhs);
        }
        ++evals;
      }
    }
    report(6, "epsilon_supergradient", worst <= 1e-6,
           fmt("min slack %.2e over %.0f evaluations x 50 points, max eps %.1e", -worst, evals, max_eps));
  }

  // 7: SDP value of f against the trust-region oracle
  {
    std::uniform_int_distribution<int> n8(1, 8), q5(1, 5);
    std::uniform_real_distribution<double> X(-1.5, 1.5);
    double worst = 0.0;
    bool solved = true;
    for (int k = 0; k < 100; ++k) {
      const int n = n8(rng), q = q5(rng);
      const auto inst = generate({}, n, q, -n, n, instance_seed(7, n, q, -n, n, k));
      VectorXd x(n);
      for (int i = 0; i < n; ++i) x(i) = k % 4 == 0 ? (X(rng) < 0 ? -1.0 : 1.0) : X(rng);
      const auto sdp = evaluate_f_sdp(inst, x);
      solved = solved && sdp.status == SolveStatus::optimal;
      const double f = evaluate_f_oracle(inst, x).value;
      worst = std::max(worst, std::abs(sdp.value - f) / (1.0 + std::abs(f)));
    }
    report(7, "sdp_matches_oracle", solved && worst <= 1e-6, fmt("max relative difference %.2e", worst));
  }

  // 8: root relaxation below the enumerated optimum
  {
    std::uniform_int_distribution<int> n10(2, 10), q4(1, 4);
    double worst = -std::numeric_limits<double>::infinity();
    bool solved = true;
    for (int k = 0; k < 50; ++k) {
      const int n = n10(rng), q = q4(rng);
      const auto [l, u] = testing::random_window(rng, n);
      const auto inst = generate({}, n, q, l, u, instance_seed(8, n, q, l, u, k));
      const auto r = lower_bound(inst);
      solved = solved && r.feasible();
      const double opt = testing::min_over_X(inst);
      worst = std::max(worst, (r.bound - opt) / (1.0 + std::abs(opt)));
    }
    report(8, "relaxation_validity", solved && worst <= 1e-5, fmt("max (bound - opt)/(1+|opt|) = %.2e", worst));
  }

  // 9: combinatorial rounding against enumeration
  {
    std::uniform_int_distribution<int> n12(1, 12), small(-2, 2);
    std::normal_distribution<double> N;
    std::uniform_real_distribution<double> U(-1.2, 1.2);
    int mismatches = 0;
    for (int k = 0; k < 200; ++k) {
      const int n = n12(rng);
      const auto [l, u] = testing::random_window(rng, n);
      VectorXd y(n), x0(n);
      for (int i = 0; i < n; ++i) {
        y(i) = k % 4 == 0 ? small(rng) : N(rng);
        x0(i) = U(rng);
      }
      const auto V = testing::enumerate_X(n, l, u);
      double best_lin = std::numeric_limits<double>::infinity(), best_dist = best_lin;
      for (const auto& v : V) {
        best_lin = std::min(best_lin, y.dot(v));
        best_dist = std::min(best_dist, (x0 - v).squaredNorm());
      }
      const VectorXd a = linear_minimize_over_X(y, l, u), b = closest_feasible(x0, l, u);
      auto member = [&](const VectorXd& x) {
        return (x.array().abs() == 1.0).all() && x.sum() >= l && x.sum() <= u;
      };
      if (!member(a) || y.dot(a) != best_lin) ++mismatches;
      if (!member(b) || (x0 - b).squaredNorm() != best_dist) ++mismatches;
    }
    report(9, "rounding_exactness", mismatches == 0, fmt("%.0f mismatches in 200 x 2 problems", mismatches));
  }

  // 10: branch and bound against enumeration, both modes
  {
    std::uniform_int_distribution<int> n10(2, 10), q4(1, 4);
    double worst = 0.0, worst_prune = 0.0;
    bool proven = true;
    int nodes[2] = {0, 0};
    for (int k = 0; k < 30; ++k) {
      const int n = n10(rng), q = q4(rng);
      const auto [l, u] = testing::random_window(rng, n);
      const auto inst = generate({}, n, q, l, u, instance_seed(10, n, q, l, u, k));
      const double opt = testing::min_over_X(inst);
      int m = 0;
      for (const auto mode : {RoundingMethod::classical, RoundingMethod::tent_heuristic}) {
        BnBConfig cfg;
        cfg.rounding_mode = mode;
        const auto r = solve(inst, cfg);
        proven = proven && r.proven_optimal;
        worst = std::max(worst, std::abs(r.optimum - opt));
        for (const auto& e : r.node_log)
          if (e.pruned) worst_prune = std::max(worst_prune, opt - e.bound);
        nodes[m++] += r.node_count;
      }
    }
    report(10, "bnb_correctness", proven && worst <= 1e-5 && worst_prune <= 1e-6,
           fmt("max |opt error| %.2e, max pruned-bound deficit %.2e, ", worst, worst_prune) +
               "nodes classical " + std::to_string(nodes[0]) + " / tent " + std::to_string(nodes[1]));
  }

  // 11: dominance over the classical tent
  {
    double worst = -std::numeric_limits<double>::infinity();
    bool finite = true;
    for (int k = 0; k < 10; ++k) {
      const int q = 1 + k % 3;
      auto inst = generate({}, 2, q, -2, 2, instance_seed(11, 2, q, -2, 2, k));
      inst.B.setZero();
      inst.C = -MatrixXd::Identity(q, q);
      const ClassicalTent ct(inst, ClassicalTent::default_multipliers(inst));
      const auto tp = build_tent(inst);
      for (const auto& x : grid(2, -1.0, 1.0, 10)) {
        const auto ev = evaluate_tent(tp, x);
        finite = finite && ev.finite();
        worst = std::max(worst, ev.value - classical_tent_value(ct, x));
      }
    }
    report(11, "classical_tent_dominance", finite && worst <= 1e-5,
           fmt("max g - g_c = %.2e on 10 x 100 grid points", worst));
  }

  // 12: the cone cuts only lower the tent
  {
    double worst = -std::numeric_limits<double>::infinity();
    int evals = 0;
    for (auto& s : cases)
      for (std::size_t k = 0; k < 20; ++k) {
        worst = std::max(worst, s.pool_g[k] - evaluate_tent(s.without, s.pool[k]).value);
        ++evals;
      }
    std::mt19937_64 grng(12);
    const auto inst = testing::random_instance(grng, 2, 2, -2, 2);
    const auto with = build_tent(inst, true), without = build_tent(inst, false);
    for (const auto& x : grid(2, -1.0, 1.0, 9)) {
      worst = std::max(worst, evaluate_tent(with, x).value - evaluate_tent(without, x).value);
      ++evals;
    }
    report(12, "cut_ordering", worst <= 1e-6, fmt("max g_with - g_without = %.2e at %.0f points", worst, evals));
  }
}

// ---- scale ----

void scale_checks() {
  const auto t0 = Clock::now();
  const auto big = generate({}, 30, 10, -5, 5, 13);
  const auto root = lower_bound(big);
  const double t_root = seconds_since(t0);

  const auto inst = generate({}, 16, 5, -4, 4, 16);
  std::string detail = fmt("root n=30 q=10 %.2f s; n=16 nodes", t_root);
  bool ok = root.feasible() && t_root < 60.0;
  double optima[2];
  int m = 0;
  for (const auto mode : {RoundingMethod::classical, RoundingMethod::tent_heuristic}) {
    BnBConfig cfg;
    cfg.rounding_mode = mode;
    cfg.max_nodes = 10000;
    const auto r = solve(inst, cfg);
    ok = ok && r.proven_optimal && r.node_count <= 10000;
    optima[m++] = r.optimum;
    detail += " " + to_string(mode) + "=" + std::to_string(r.node_count) + fmt(" (%.1f s)", r.wall_time);
  }
  ok = ok && std::abs(optima[0] - optima[1]) <= 1e-5;
  report(13, "scale_smoke", ok, detail);
}

}  // namespace

int main() {
  unit_interval_checks();
  property_checks();
  scale_checks();
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
