#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

#include "ctent/objective.hpp"
#include "ctent/tent.hpp"
#include "test_support.hpp"

namespace ctent {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

int soc_count(const TentProgram& tp) {
  int k = 0;
  for (const auto& c : tp.program.base.cones)
    if (c.cone.kind == ConeKind::second_order) {
      ++k;
      EXPECT_EQ(c.cone.dim, tp.q + 1);
    }
  return k;
}

TEST(BuildTent, Shape) {
  std::mt19937_64 rng(1);
  const auto inst = testing::random_instance(rng, 2, 2, -2, 2);
  const auto with = build_tent(inst, true);
  EXPECT_EQ(with.psd_order, 5);
  EXPECT_EQ(soc_count(with), 4);
  const auto without = build_tent(inst, false);
  EXPECT_EQ(soc_count(without), 0);
  EXPECT_EQ(with.linear, 2.0 * inst.a);
  EXPECT_TRUE(validate(with.program.base).empty());
}

TEST(BuildTent, XEntersOnlyRightHandSides) {
  std::mt19937_64 rng(2);
  const auto inst = testing::random_instance(rng, 3, 2, -1, 3);
  const auto tp = build_tent(inst);
  EXPECT_EQ(tp.program.num_params(), 3);
  EXPECT_EQ(tp.program.objective_param, tp.linear);
  const auto p0 = tp.program.at(VectorXd::Zero(3));
  const auto p1 = tp.program.at(VectorXd::Constant(3, 0.5));
  EXPECT_EQ((p0.coeffs - p1.coeffs).norm(), 0.0);
  EXPECT_EQ(p0.objective, p1.objective);
}

TEST(BuildTent, RejectsEmptyWindow) {
  std::mt19937_64 rng(3);
  auto inst = testing::random_instance(rng, 4, 2, -4, 4);
  inst.l = inst.u = 1;
  EXPECT_THROW(build_tent(inst), std::invalid_argument);
}

TEST(EvaluateTent, ScalarVertex) {
  std::mt19937_64 rng(4);
  const auto inst = testing::random_instance(rng, 1, 1, -1, 1);
  const auto tp = build_tent(inst);
  for (const double s : {-1.0, 1.0}) {
    const VectorXd x = VectorXd::Constant(1, s);
    const auto ev = evaluate_tent(tp, x);
    ASSERT_TRUE(ev.finite());
    EXPECT_NEAR(ev.value, testing::f_ref(inst, x), 1e-6);
  }
}

TEST(EvaluateTent, AgreesWithFOnVertices) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 4; ++trial) {
    const int n = 3 + trial % 3, q = 2 + trial % 2;
    const auto [l, u] = testing::random_window(rng, n);
    const auto inst = testing::random_instance(rng, n, q, l, u);
    const auto tp = build_tent(inst);
    for (const auto& x : testing::enumerate_X(n, l, u)) {
      const auto ev = evaluate_tent(tp, x);
      ASSERT_TRUE(ev.finite());
      const double f = testing::f_ref(inst, x);
      EXPECT_NEAR(ev.value, f, 1e-4 * (1.0 + std::abs(f)));
    }
  }
}

TEST(EvaluateTent, OutsideDomainIsMinusInfinity) {
  std::mt19937_64 rng(6);
  const auto inst = testing::random_instance(rng, 3, 2, -1, 1);
  const auto tp = build_tent(inst);
  for (const VectorXd& x : {VectorXd(VectorXd::Constant(3, 0.9)), VectorXd(VectorXd::Constant(3, -0.9)),
                            VectorXd(VectorXd::Unit(3, 0) * 1.2)}) {
    const auto ev = evaluate_tent(tp, x);
    EXPECT_EQ(ev.status, SolveStatus::infeasible);
    EXPECT_EQ(ev.value, -std::numeric_limits<double>::infinity());
    EXPECT_FALSE(tp.in_domain(x));
  }
}

class TentProperties : public ::testing::Test {
 protected:
  void SetUp() override {
    std::mt19937_64 rng(7);
    inst_ = testing::random_instance(rng, 4, 3, -2, 2);
    with_ = build_tent(inst_, true);
    without_ = build_tent(inst_, false);
    vertices_ = testing::enumerate_X(4, -2, 2);
  }
  RobustQuadraticInstance inst_;
  TentProgram with_, without_;
  std::vector<VectorXd> vertices_;
};

TEST_F(TentProperties, ConcaveAlongSegments) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 15; ++trial) {
    const VectorXd x1 = testing::random_hull_point(rng, vertices_), x2 = testing::random_hull_point(rng, vertices_);
    const double g1 = evaluate_tent(with_, x1).value, g2 = evaluate_tent(with_, x2).value;
    for (const double t : {0.25, 0.5, 0.75})
      EXPECT_GE(evaluate_tent(with_, t * x1 + (1 - t) * x2).value, t * g1 + (1 - t) * g2 - 1e-6);
  }
}

TEST_F(TentProperties, VertexMidpoints) {
  for (std::size_t i = 0; i + 1 < vertices_.size(); i += 2) {
    const VectorXd &a = vertices_[i], &b = vertices_[i + 1];
    const auto mid = evaluate_tent(with_, 0.5 * (a + b));
    ASSERT_TRUE(mid.finite());
    EXPECT_GE(mid.value, 0.5 * (testing::f_ref(inst_, a) + testing::f_ref(inst_, b)) - 1e-6);
  }
}

TEST_F(TentProperties, EpsilonSupergradientInequality) {
  std::mt19937_64 rng(9);
  std::vector<VectorXd> probes;
  std::vector<double> probe_g;
  for (int k = 0; k < 12; ++k) {
    probes.push_back(testing::random_hull_point(rng, vertices_));
    probe_g.push_back(evaluate_tent(with_, probes.back()).value);
  }
  for (const auto& v : vertices_) {
    probes.push_back(v);
    probe_g.push_back(evaluate_tent(with_, v).value);
  }
  for (int trial = 0; trial < 6; ++trial) {
    const VectorXd xb = trial < 3 ? testing::random_hull_point(rng, vertices_) : vertices_[trial];
    const auto ev = evaluate_tent(with_, xb);
    ASSERT_TRUE(ev.finite());
    EXPECT_GE(ev.epsilon, -1e-9);
    EXPECT_LE((ev.certificate.supergradient(with_) - ev.supergradient).cwiseAbs().maxCoeff(), 1e-9);
    for (std::size_t k = 0; k < probes.size(); ++k)
      EXPECT_LE(probe_g[k], ev.value + ev.supergradient.dot(probes[k] - xb) + ev.epsilon + 1e-6);
  }
}

TEST_F(TentProperties, DominatesVertexAverages) {
  // g(sum w_k v_k) >= sum w_k f(v_k); f itself may exceed g inside the hull
  std::mt19937_64 rng(10);
  std::uniform_int_distribution<std::size_t> pick(0, vertices_.size() - 1);
  std::exponential_distribution<double> E(1.0);
  for (int trial = 0; trial < 15; ++trial) {
    VectorXd x = VectorXd::Zero(4);
    double avg = 0.0, total = 0.0;
    for (int k = 0; k < 3; ++k) {
      const double w = E(rng);
      const VectorXd& v = vertices_[pick(rng)];
      x += w * v;
      avg += w * testing::f_ref(inst_, v);
      total += w;
    }
    EXPECT_GE(evaluate_tent(with_, x / total).value, avg / total - 1e-6);
  }
}

TEST_F(TentProperties, CutsOnlyLowerTheTent) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 15; ++trial) {
    const VectorXd x = testing::random_hull_point(rng, vertices_);
    EXPECT_LE(evaluate_tent(with_, x).value, evaluate_tent(without_, x).value + 1e-6);
  }
}

TEST(UnitInterval, FullTentIsOneMinusX) {
  const auto tp = build_tent01(unit_interval_example(), false);
  for (int k = 0; k <= 10; ++k) {
    const double x = k / 10.0;
    const auto ev = evaluate_tent(tp, VectorXd::Constant(1, x));
    ASSERT_TRUE(ev.finite()) << x;
    EXPECT_NEAR(ev.value, 1.0 - x, 1e-5);
  }
}

TEST(UnitInterval, EndpointsMatchF) {
  const auto data = unit_interval_example();
  EXPECT_EQ(data.f(VectorXd::Zero(1)), 1.0);
  EXPECT_EQ(data.f(VectorXd::Ones(1)), 0.0);
}

TEST(UnitInterval, RelaxedTentClosedForm) {
  const auto tp = build_tent01(unit_interval_example(), true);
  for (int k = 0; k <= 10; ++k) {
    const double x = k / 10.0;
    const auto ev = evaluate_tent(tp, VectorXd::Constant(1, x));
    ASSERT_TRUE(ev.finite()) << x;
    EXPECT_NEAR(ev.value, 3.0 * std::sqrt(1.0 - x) + 2.0 * x - 2.0, 1e-5);
  }
}

TEST(UnitInterval, OutsideIsSentinel) {
  const auto tp = build_tent01(unit_interval_example(), false);
  const auto ev = evaluate_tent(tp, VectorXd::Constant(1, 1.5));
  EXPECT_EQ(ev.status, SolveStatus::infeasible);
  EXPECT_EQ(ev.value, -std::numeric_limits<double>::infinity());
}

TEST(UnitInterval, DualPointCertifiesOneMinusX) {
  const auto tp = build_tent01(unit_interval_example(), false);
  const VectorXd z = unit_interval_dual_point(tp, 3, -3, -3, 3, 3, 3);
  const auto& base = tp.program.base;
  // stationarity for a maximization: coeffs' z = objective
  EXPECT_LE((VectorXd(base.coeffs.transpose() * z) - base.objective).cwiseAbs().maxCoeff(), 1e-12);
  for (const auto& c : base.cones) {
    const VectorXd zc = z.segment(c.rows.start, c.rows.count);
    if (c.cone.kind == ConeKind::psd_triangle)
      EXPECT_GE(Eigen::SelfAdjointEigenSolver<MatrixXd>(smat(zc)).eigenvalues().minCoeff(), -1e-12);
    if (c.cone.kind == ConeKind::nonnegative) EXPECT_GE(zc.minCoeff(), 0.0);
  }
  for (int k = 0; k <= 10; ++k) {
    const double x = k / 10.0;
    const auto p = tp.program.at(VectorXd::Constant(1, x));
    EXPECT_NEAR(p.rhs.dot(z) + p.offset, 1.0 - x, 1e-12);
    EXPECT_NEAR(dual_objective(p, z), 1.0 - x, 1e-12);
  }
}

TEST(Tent01, TwoDimensionalTentMatchesFOnVertices) {
  Tent01Data d;
  d.n = 2;
  VectorXd p1(3), p2(3), p3(3);
  p1 << 1.0, -2.0, 0.5;
  p2 << -0.5, 1.0, 1.0;
  p3 << 0.0, 0.3, -1.5;
  d.vertices = {p1, p2, p3};
  for (const bool relaxed : {false, true}) {
    const auto tp = build_tent01(d, relaxed);
    for (const auto& v : testing::enumerate_X(2, -2, 2)) {
      const VectorXd x = (v.array() + 1.0) / 2.0;
      const auto ev = evaluate_tent(tp, x);
      ASSERT_TRUE(ev.finite());
      if (!relaxed) EXPECT_NEAR(ev.value, d.f(x), 1e-5);
      EXPECT_GE(ev.value, d.f(x) - 1e-6);
    }
  }
}

RobustQuadraticInstance concave_instance(std::mt19937_64& rng, int n, int q) {
  auto inst = testing::random_instance(rng, n, q, -n, n);
  inst.B.setZero();
  inst.C = -MatrixXd::Identity(q, q);
  return inst;
}

TEST(ClassicalTent, AgreesOnVertices) {
  std::mt19937_64 rng(12);
  const auto inst = concave_instance(rng, 4, 2);
  const ClassicalTent ct(inst, ClassicalTent::default_multipliers(inst));
  for (const auto& x : testing::enumerate_X(4, -4, 4))
    EXPECT_NEAR(classical_tent_value(ct, x), testing::f_ref(inst, x), 1e-12);
}

TEST(ClassicalTent, IdentityAtOrigin) {
  RobustQuadraticInstance inst;
  inst.n = 2;
  inst.q = 1;
  inst.A = MatrixXd::Identity(2, 2);
  inst.a = VectorXd::Zero(2);
  inst.B = MatrixXd::Zero(1, 2);
  inst.C = -MatrixXd::Identity(1, 1);
  inst.c = VectorXd::Zero(1);
  inst.l = -2;
  inst.u = 2;
  const ClassicalTent ct(inst, VectorXd::Constant(2, 2.0));
  EXPECT_DOUBLE_EQ(ct.lambda()(0), ClassicalTent::default_multipliers(inst)(0));
  EXPECT_NEAR(classical_tent_value(ct, VectorXd::Zero(2)), testing::f_ref(inst, VectorXd::Zero(2)) + 4.0, 1e-14);
}

TEST(ClassicalTent, RejectsUncertifiedInstances) {
  std::mt19937_64 rng(13);
  auto inst = concave_instance(rng, 3, 2);
  EXPECT_THROW(ClassicalTent(inst, VectorXd::Constant(3, -5.0)), std::invalid_argument);
  auto coupled = inst;
  coupled.B(0, 0) = 0.1;
  EXPECT_THROW(ClassicalTent(coupled, ClassicalTent::default_multipliers(coupled)), std::invalid_argument);
  auto convex = inst;
  convex.C = MatrixXd::Identity(2, 2);
  EXPECT_THROW(ClassicalTent(convex, ClassicalTent::default_multipliers(convex)), std::invalid_argument);
}

TEST(ClassicalTent, DominatesTheConicTent) {
  std::mt19937_64 rng(14);
  const auto inst = concave_instance(rng, 3, 2);
  const ClassicalTent ct(inst, ClassicalTent::default_multipliers(inst));
  const auto tp = build_tent(inst);
  const auto V = testing::enumerate_X(3, -3, 3);
  for (int k = 0; k < 20; ++k) {
    const VectorXd x = testing::random_hull_point(rng, V);
    EXPECT_LE(evaluate_tent(tp, x).value, ct.value(x) + 1e-5);
  }
}

}  // namespace
}  // namespace ctent
