#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "ssam/chain_lab.hpp"
#include "ssam/oracle.hpp"

namespace ssam {
namespace {

Vector V(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

TEST(QuadraticOracle, GradientOfHalfSquaredNorm) {
  QuadraticOracle q(Matrix::Identity(2, 2), Vector::Zero(2));
  RngStream rng(1);
  const SubgradientEstimate est = q.Query(V({1.0, 1.0}), rng);
  EXPECT_EQ(est.g, V({1.0, 1.0}));
  EXPECT_DOUBLE_EQ(est.f_estimate, 1.0);
  EXPECT_DOUBLE_EQ(*q.Value(V({1.0, 1.0})), 1.0);
}

TEST(QuadraticOracle, ExactSolutionInteriorMinimizer) {
  QuadraticOracle q(Matrix::Identity(2, 2), V({1.0, 0.0}));
  const Vector s = *q.ExactSolution(BoxConstraint::Symmetric(2, 1.0));
  EXPECT_NEAR((s - V({1.0, 0.0})).norm(), 0.0, 1e-12);
}

TEST(QuadraticOracle, ExactSolutionOnCornerMatchesGrid) {
  Matrix A = Matrix::Zero(2, 2);
  A(0, 0) = 1.0;
  A(1, 1) = 2.0;
  QuadraticOracle q(A, V({1.0, 1.0}));
  const BoxConstraint box = BoxConstraint::Uniform(2, 0.0, 0.25);
  const Vector s = *q.ExactSolution(box);
  EXPECT_NEAR((s - V({0.25, 0.25})).norm(), 0.0, 1e-12);
  // Grid brute force over the box.
  double best = std::numeric_limits<double>::infinity();
  Vector arg(2);
  for (int i = 0; i <= 250; ++i) {
    for (int j = 0; j <= 250; ++j) {
      const Vector y = V({0.25 * i / 250.0, 0.25 * j / 250.0});
      const double v = *q.Value(y);
      if (v < best) best = v, arg = y;
    }
  }
  EXPECT_NEAR((arg - s).norm(), 0.0, 1e-9);
}

TEST(QuadraticOracle, RankDeficientSolutionIsUsageError) {
  Matrix A = Matrix::Zero(2, 2);
  A(0, 0) = 1.0;
  QuadraticOracle q(A, V({1.0, 0.0}));
  EXPECT_THROW(q.ExactSolution(BoxConstraint::Symmetric(2, 1.0)), UsageError);
}

TEST(QuadraticOracle, ShapeMismatchIsUsageError) {
  EXPECT_THROW(QuadraticOracle(Matrix::Identity(2, 2), Vector::Zero(3)), UsageError);
}

TEST(L1Oracle, TieGivesZeroSelection) {
  L1Oracle o(V({0.3, -0.2}));
  RngStream rng(1);
  EXPECT_EQ(o.Query(V({0.3, -0.2}), rng).g, V({0.0, 0.0}));
}

TEST(L1Oracle, SignVector) {
  L1Oracle o(V({0.3, -0.2}));
  RngStream rng(1);
  const SubgradientEstimate est = o.Query(V({1.3, -2.2}), rng);
  EXPECT_EQ(est.g, V({1.0, -1.0}));
  EXPECT_DOUBLE_EQ(est.f_estimate, 3.0);
}

TEST(L1Oracle, IncrementAlongSegmentEqualsPathIntegral) {
  const Vector xstar = V({0.1, -0.4});
  L1Oracle o(xstar);
  const Path p = Path::Segment(xstar, xstar + V({1.0, 1.0}));
  EXPECT_DOUBLE_EQ(*o.Value(p.Point(1.0)) - *o.Value(p.Point(0.0)), 2.0);
  const SelectionFunction fn = L1DistanceSelection(xstar);
  EXPECT_NEAR(path_integral(fn, p, 1e-3), 2.0, 1e-12);
}

TEST(L1Oracle, ExactSolutionIsProjectedTarget) {
  L1Oracle o(V({1.5, -0.5}));
  EXPECT_EQ(*o.ExactSolution(BoxConstraint::Symmetric(2, 1.0)), V({1.0, -0.5}));
}

TEST(NoisyOracle, ZeroNoiseReturnsBaseOutput) {
  NoisyOracle noisy(std::make_unique<L1Oracle>(V({0.0, 0.0})), NoiseSpec{});
  L1Oracle plain(V({0.0, 0.0}));
  RngStream r1(3), r2(3);
  for (int i = 0; i < 10; ++i) {
    const Vector x = r2.UniformVector(2, -1.0, 1.0);
    r1.UniformVector(2, -1.0, 1.0);
    EXPECT_EQ(noisy.Query(x, r1).g, plain.Query(x, r2).g);
  }
  auto factory = l1_oracle(V({0.0, 0.0}));
  EXPECT_EQ(dynamic_cast<NoisyOracle*>(factory.get()), nullptr);
}

TEST(NoisyOracle, NoiseMeanVanishes) {
  const double sigma = 0.1;
  const int queries = 100000;
  NoisyOracle noisy(std::make_unique<QuadraticOracle>(Matrix::Identity(3, 3), Vector::Zero(3)),
                    NoiseSpec{sigma, 0.0, 1.0});
  RngStream rng(77);
  const Vector x = V({0.2, -0.1, 0.4});
  Vector sum = Vector::Zero(3);
  for (int i = 0; i < queries; ++i) {
    const SubgradientEstimate est = noisy.Query(x, rng);
    ASSERT_TRUE(est.true_part.has_value());
    sum += est.g - *est.true_part;
  }
  const Vector mean = sum / queries;
  const double bound = 3.0 * sigma / std::sqrt(static_cast<double>(queries));
  for (int i = 0; i < 3; ++i) EXPECT_LE(std::abs(mean[i]), bound);
}

TEST(NoisyOracle, BiasDecayLaw) {
  NoisyOracle noisy(std::make_unique<L1Oracle>(V({0.0, 0.0, 0.0})), NoiseSpec{0.0, 1.0, 1.0});
  EXPECT_NEAR(noisy.Bias(999).norm(), 1e-3, 1e-15);
  EXPECT_NEAR(noisy.Bias(0).norm(), 1.0, 1e-15);
  NoisyOracle fast(std::make_unique<L1Oracle>(V({0.0})), NoiseSpec{0.0, 2.0, 2.0});
  EXPECT_NEAR(fast.Bias(9).norm(), 0.02, 1e-15);
}

TEST(NoisyOracle, BiasAppliedPerQueryCount) {
  NoisyOracle noisy(std::make_unique<L1Oracle>(V({0.0})), NoiseSpec{0.0, 1.0, 1.0});
  RngStream rng(1);
  EXPECT_DOUBLE_EQ(noisy.Query(V({0.0}), rng).g[0], 1.0);
  EXPECT_DOUBLE_EQ(noisy.Query(V({0.0}), rng).g[0], 0.5);
  EXPECT_EQ(noisy.queries(), 2u);
}

TEST(NoisyOracle, SameSeedSameNoise) {
  auto make = [] { return quadratic_oracle(Matrix::Identity(4, 4), Vector::Zero(4), {0.3, 0.1, 1.0}); };
  auto o1 = make();
  auto o2 = make();
  RngStream r1(8, 1), r2(8, 1);
  for (int i = 0; i < 50; ++i) {
    const Vector x = Vector::Constant(4, 0.01 * i);
    ASSERT_EQ(o1->Query(x, r1).g, o2->Query(x, r2).g);
  }
}

TEST(NoiseSpec, RejectsNegativeValues) {
  EXPECT_THROW((NoiseSpec{-1.0, 0.0, 1.0}.Validate()), UsageError);
  EXPECT_THROW((NoiseSpec{0.0, -1.0, 1.0}.Validate()), UsageError);
}

TEST(Benchmarks, QuadraticHasActiveBounds) {
  const QuadraticBenchmark qb = MakeQuadraticBenchmark(10, 1);
  QuadraticOracle q(qb.A, qb.b);
  const Vector s = *q.ExactSolution(qb.box);
  int active = 0;
  for (int i = 0; i < 10; ++i) active += std::abs(std::abs(s[i]) - 1.0) < 1e-12;
  EXPECT_GE(active, 2);
  // First-order optimality: projected gradient step leaves s fixed.
  EXPECT_LE((qb.box.Project(s - q.Gradient(s)) - s).norm(), 1e-10);
}

TEST(Benchmarks, AreSeedDeterministic) {
  EXPECT_EQ(MakeQuadraticBenchmark(5, 3).A, MakeQuadraticBenchmark(5, 3).A);
  EXPECT_NE(MakeQuadraticBenchmark(5, 3).A, MakeQuadraticBenchmark(5, 4).A);
  EXPECT_EQ(MakeL1Benchmark(5, 3).xstar, MakeL1Benchmark(5, 3).xstar);
}

}  // namespace
}  // namespace ssam
