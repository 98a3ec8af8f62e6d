#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "ctent/builder.hpp"
#include "ctent/solver.hpp"

namespace ctent {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

ConicProgram one_d_lp() {
  ProgramBuilder b;
  const int x = b.add_variable();
  b.add_nonneg({LinExpr::var(x) - 2.0});
  b.set_objective(LinExpr::var(x), Sense::minimize);
  return b.build().base;
}

TEST(Svec, RoundTripIsExact) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(-3.0, 3.0);
  for (int d = 1; d <= 6; ++d) {
    MatrixXd A(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j <= i; ++j) A(i, j) = A(j, i) = U(rng);
    const MatrixXd back = smat(svec(A));
    EXPECT_LE((back - A).cwiseAbs().maxCoeff(), 1e-15);
    for (int i = 0; i < d; ++i) EXPECT_EQ(back(i, i), A(i, i));
  }
}

TEST(Svec, InnerProductMatchesFrobenius) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> N;
  for (int trial = 0; trial < 50; ++trial) {
    const int d = 1 + trial % 6;
    MatrixXd A(d, d), B(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j <= i; ++j) {
        A(i, j) = A(j, i) = N(rng);
        B(i, j) = B(j, i) = N(rng);
      }
    EXPECT_NEAR(svec(A).dot(svec(B)), (A.transpose() * B).trace(), 1e-12);
  }
}

TEST(Svec, IndexMatchesLayout) {
  const int d = 4;
  MatrixXd A = MatrixXd::Zero(d, d);
  int k = 0;
  for (int j = 0; j < d; ++j)
    for (int i = j; i < d; ++i) {
      EXPECT_EQ(svec_index(i, j, d), k);
      EXPECT_EQ(svec_index(j, i, d), k);
      ++k;
    }
}

TEST(Validate, WellFormedLpHasNoViolations) { EXPECT_TRUE(validate(one_d_lp()).empty()); }

TEST(Validate, OverlapIsReported) {
  ConicProgram p = one_d_lp();
  p.cones.push_back({RowRange{0, 1}, ConeSpec::nonnegative(1)});
  const auto v = validate(p);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_NE(v[0].find("overlaps"), std::string::npos);
  EXPECT_NE(v[0].find("row 0"), std::string::npos);
}

TEST(Validate, UnassignedRowIsReported) {
  ConicProgram p = one_d_lp();
  p.cones.clear();
  const auto v = validate(p);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_NE(v[0].find("row 0"), std::string::npos);
}

TEST(Validate, UnreferencedVariableIsReported) {
  ProgramBuilder b;
  const int x = b.add_variables(2);
  b.add_nonneg({LinExpr::var(x)});
  b.set_objective(LinExpr::var(x), Sense::minimize);
  const auto v = validate(b.build().base);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_NE(v[0].find("variable 1"), std::string::npos);
}

TEST(Validate, SolveRejectsMalformed) {
  ConicProgram p = one_d_lp();
  p.cones.clear();
  EXPECT_THROW(solve(p), std::invalid_argument);
}

TEST(Solve, OneDimensionalLp) {
  const ConicProgram p = one_d_lp();
  const auto sol = solve(p);
  ASSERT_EQ(sol.status, SolveStatus::optimal);
  EXPECT_NEAR(sol.objective_value, 2.0, 1e-7);
  EXPECT_NEAR(sol.dual(0), 1.0, 1e-7);
  EXPECT_LE(sol.gap, kDefaultSolverTol);
}

TEST(Solve, SecondOrderNorm) {
  ProgramBuilder b;
  const int t = b.add_variable();
  b.add_soc(LinExpr::var(t), {3.0, 4.0});
  b.set_objective(LinExpr::var(t), Sense::minimize);
  const auto sol = solve(b.build().base);
  ASSERT_EQ(sol.status, SolveStatus::optimal);
  EXPECT_NEAR(sol.objective_value, 5.0, 1e-7);
}

TEST(Solve, TraceWithFixedDiagonal) {
  ProgramBuilder b;
  const int m = b.add_variables(3);  // M11, M21, M22
  b.add_psd(2, [&](int i, int j) { return LinExpr::var(m + svec_index(i, j, 2)); });
  b.add_zero({LinExpr::var(m) - 1.0, LinExpr::var(m + 2) - 1.0, LinExpr::var(m + 1) - 0.5});
  b.set_objective(LinExpr::var(m) + LinExpr::var(m + 2), Sense::minimize);
  const auto sol = solve(b.build().base);
  ASSERT_EQ(sol.status, SolveStatus::optimal);
  EXPECT_NEAR(sol.objective_value, 2.0, 1e-7);
}

TEST(Solve, MaximizeSenseAndDualSign) {
  // max x + y s.t. x <= 1, y <= 2, x + y <= 2.5
  ProgramBuilder b;
  const int x = b.add_variables(2);
  b.add_nonneg({1.0 - LinExpr::var(x), 2.0 - LinExpr::var(x + 1), 2.5 - LinExpr::var(x) - LinExpr::var(x + 1)});
  b.set_objective(LinExpr::var(x) + LinExpr::var(x + 1), Sense::maximize);
  const ConicProgram p = b.build().base;
  const auto sol = solve(p);
  ASSERT_EQ(sol.status, SolveStatus::optimal);
  EXPECT_NEAR(sol.objective_value, 2.5, 1e-7);
  EXPECT_NEAR(sol.dual_value, 2.5, 1e-7);
  const VectorXd stat = p.coeffs.transpose() * sol.dual - p.objective;
  EXPECT_LE(stat.cwiseAbs().maxCoeff(), 1e-7);
}

TEST(Solve, InfeasibleIsClassified) {
  ProgramBuilder b;
  const int x = b.add_variable();
  b.add_nonneg({LinExpr::var(x) - 2.0, 1.0 - LinExpr::var(x)});
  b.set_objective(LinExpr::var(x), Sense::minimize);
  EXPECT_EQ(solve(b.build().base).status, SolveStatus::infeasible);
}

TEST(Solve, UnboundedIsClassified) {
  ProgramBuilder b;
  const int x = b.add_variable();
  b.add_nonneg({2.0 - LinExpr::var(x)});
  b.set_objective(LinExpr::var(x), Sense::minimize);
  EXPECT_EQ(solve(b.build().base).status, SolveStatus::unbounded);
}

TEST(Solve, LargestEigenvalueBySdp) {
  // min t s.t. tI - S psd ; value lambda_max(S)
  std::mt19937_64 rng(3);
  std::normal_distribution<double> N;
  const int d = 5;
  MatrixXd S(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j <= i; ++j) S(i, j) = S(j, i) = N(rng);
  ProgramBuilder b;
  const int t = b.add_variable();
  b.add_psd(d, [&](int i, int j) { return (i == j ? LinExpr::var(t) : LinExpr()) - S(i, j); });
  b.set_objective(LinExpr::var(t), Sense::minimize);
  const auto sol = solve(b.build().base);
  ASSERT_EQ(sol.status, SolveStatus::optimal);
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(S);
  EXPECT_NEAR(sol.objective_value, es.eigenvalues()(d - 1), 1e-7);
}

TEST(Solve, WeakDualityOnRandomMixedPrograms) {
  std::mt19937_64 rng(19);
  std::normal_distribution<double> N;
  for (int trial = 0; trial < 20; ++trial) {
    // min c'v s.t. ||v|| <= 1 (soc), V(v) psd with V = I + sum v_k S_k, v_0 >= -0.5
    const int n = 4;
    ProgramBuilder b;
    const int v = b.add_variables(n);
    std::vector<LinExpr> tail;
    for (int k = 0; k < n; ++k) tail.push_back(LinExpr::var(v + k));
    b.add_soc(1.0, tail);
    std::vector<MatrixXd> Sk(n, MatrixXd(3, 3));
    for (auto& S : Sk)
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j <= i; ++j) S(i, j) = S(j, i) = N(rng);
    b.add_psd(3, [&](int i, int j) {
      LinExpr e = i == j ? LinExpr(1.0) : LinExpr();
      for (int k = 0; k < n; ++k) e += LinExpr::var(v + k, Sk[k](i, j));
      return e;
    });
    b.add_nonneg({LinExpr::var(v) + 0.5});
    LinExpr obj;
    for (int k = 0; k < n; ++k) obj += LinExpr::var(v + k, N(rng));
    b.set_objective(obj, Sense::minimize);
    const ConicProgram p = b.build().base;
    const auto sol = solve(p);
    ASSERT_EQ(sol.status, SolveStatus::optimal) << "trial " << trial;
    EXPECT_LE(sol.dual_value, sol.objective_value + kDefaultSolverTol);
    EXPECT_LE(max_violation(p, sol.primal), 1e-7);
    for (const auto& blk : p.cones)
      EXPECT_LE(cone_violation(blk.cone, sol.dual.segment(blk.rows.start, blk.rows.count)), 1e-7);
  }
}

TEST(Dump, OneLinePerRow) {
  std::ostringstream os;
  dump(one_d_lp(), os);
  EXPECT_EQ(os.str(), "minimize offset=0 0:1\n0 nonneg[0] rhs=-2 0:-1\n");
}

TEST(Parametric, RhsAndOffsetAreAffine) {
  ProgramBuilder b(1);
  const int x = b.add_variable();
  b.add_nonneg({LinExpr::var(x) - LinExpr::param(0, 3.0)});
  b.set_objective(LinExpr::var(x) + LinExpr::param(0), Sense::minimize);
  const auto pp = b.build();
  const auto sol = solve(pp.at(VectorXd::Constant(1, 2.0)));
  ASSERT_TRUE(sol.optimal());
  EXPECT_NEAR(sol.objective_value, 8.0, 1e-7);
}

}  // namespace
}  // namespace ctent
