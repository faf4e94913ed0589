#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "pli/enumeration.hpp"
#include "pli/probability.hpp"

namespace {

using pli::dependence_profile;

dependence_profile random_profile(std::mt19937_64& rng, std::size_t m, double hi = 1.0) {
  std::uniform_real_distribution<double> u(0.0, hi);
  std::vector<double> p(m - 1);
  for (double& v : p) v = u(rng);
  return {m, p};
}

TEST(ProfileTest, RejectsBadShapes) {
  EXPECT_THROW(dependence_profile(3, {0.5}), pli::validation_error);
  EXPECT_THROW(dependence_profile(2, {1.5}), pli::validation_error);
  EXPECT_THROW(dependence_profile(2, {-0.1}), pli::validation_error);
  EXPECT_THROW(dependence_profile(1, {}), pli::validation_error);
  EXPECT_THROW(dependence_profile(2, {std::nan("")}), pli::validation_error);
  EXPECT_NO_THROW(dependence_profile(2, {1.0}));
}

TEST(PliExactTest, WorkedBinaryExample) {
  const dependence_profile prof(2, {0.5});
  EXPECT_DOUBLE_EQ(pli::pli_exact(prof, 2), 0.5);
  EXPECT_DOUBLE_EQ(pli::pli_exact(prof, 3), 0.75);
  EXPECT_DOUBLE_EQ(pli::pli_exact(prof, 4), 0.875);
  EXPECT_DOUBLE_EQ(pli::pli_exact(prof, 8), 0.9921875);
}

TEST(PliExactTest, SpecExamples) {
  EXPECT_DOUBLE_EQ(pli::pli_exact({3, {0.0, 0.0}}, 3), 1.0);
  // (1-0.5)^2 * (1 + (0.5 + 0.5)) by hand.
  EXPECT_NEAR(pli::pli_exact({3, {0.5, 0.5}}, 4), 0.5, 1e-15);
  EXPECT_EQ(pli::pli_exact({3, {0.5, 1.0}}, 100), 0.0);
}

TEST(PliExactTest, ZeroBelowClassCount) {
  std::mt19937_64 rng(7);
  for (std::size_t m = 2; m <= 8; ++m) {
    const auto prof = random_profile(rng, m);
    for (std::size_t n = 0; n < m; ++n) EXPECT_EQ(pli::pli_exact(prof, n), 0.0);
  }
}

TEST(PliExactTest, CurveMatchesPointEvaluation) {
  const dependence_profile prof(4, {0.2, 0.7, 0.4});
  const auto curve = pli::pli_exact_curve(prof, 1, 30);
  ASSERT_EQ(curve.size(), 30u);
  for (const auto& pt : curve) EXPECT_DOUBLE_EQ(pt.pli, pli::pli_exact(prof, pt.n));
  for (std::size_t i = 1; i < curve.size(); ++i) {
    EXPECT_GT(curve[i].n, curve[i - 1].n);
    EXPECT_GE(curve[i].pli, curve[i - 1].pli);
  }
}

TEST(PliExactTest, MonotoneAndConvergent) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t m = 2 + rng() % 7;
    const auto prof = random_profile(rng, m, 0.9);
    const auto curve = pli::pli_exact_curve(prof, 0, 10000);
    for (std::size_t i = 1; i < curve.size(); ++i) ASSERT_GE(curve[i].pli, curve[i - 1].pli);
    EXPECT_GE(curve.back().pli, 1.0 - 1e-6);
  }
}

TEST(PliExactTest, CertainDependenceBlocksFullRank) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t m = 2 + rng() % 6;
    const auto base = random_profile(rng, m);
    std::vector<double> p(base.values().begin(), base.values().end());
    p[rng() % p.size()] = 1.0;
    const dependence_profile prof(m, p);
    for (std::size_t n : {0u, 5u, 50u, 500u}) EXPECT_EQ(pli::pli_exact(prof, n), 0.0);
  }
}

TEST(PliUniformTest, SpecExamples) {
  EXPECT_DOUBLE_EQ(pli::pli_uniform(0.5, 2, 4), 0.875);
  EXPECT_DOUBLE_EQ(pli::pli_uniform(0.0, 5, 5), 1.0);
  // (1-0.5)^2 * (C(1,1) + C(2,1)*0.5)
  EXPECT_NEAR(pli::pli_uniform(0.5, 3, 4), 0.5, 1e-15);
  EXPECT_THROW(pli::pli_uniform(1.2, 3, 4), pli::validation_error);
  EXPECT_THROW(pli::pli_uniform(-0.2, 3, 4), pli::validation_error);
}

TEST(PliUniformTest, BinaryClosedForm) {
  for (double p = 0.0; p <= 1.0; p += 1.0 / 64.0) {
    for (std::size_t n = 2; n <= 60; ++n)
      ASSERT_NEAR(pli::pli_uniform(p, 2, n), 1.0 - std::pow(p, static_cast<double>(n - 1)), 1e-15)
          << "p=" << p << " n=" << n;
  }
}

// Three classes: (1-p)^2 * sum_{k=0}^{K} (k+1) p^k with K = n-3, which sums to
// 1 - (K+2) p^{K+1} + (K+1) p^{K+2}.
TEST(PliUniformTest, TernaryClosedForm) {
  for (double p : {0.0, 0.1, 0.37, 0.5, 0.83, 0.99}) {
    for (std::size_t n = 3; n <= 80; ++n) {
      const double K = static_cast<double>(n - 3);
      const double expected = 1.0 - (K + 2.0) * std::pow(p, K + 1.0) + (K + 1.0) * std::pow(p, K + 2.0);
      ASSERT_NEAR(pli::pli_uniform(p, 3, n), expected, 1e-13) << "p=" << p << " n=" << n;
    }
  }
}

TEST(PliUniformTest, AgreesWithExactOnUniformProfiles) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t m = 2 + rng() % 4;
    const std::size_t n = rng() % 21;
    const double p = u(rng);
    EXPECT_NEAR(pli::pli_uniform(p, m, n), pli::pli_exact(dependence_profile::uniform(m, p), n), 1e-12);
  }
}

TEST(PliUniformTest, LargeInputsStayFinite) {
  const double v = pli::pli_uniform(0.95, 64, 4096);
  EXPECT_TRUE(std::isfinite(v));
  EXPECT_NEAR(v, pli::pli_exact(dependence_profile::uniform(64, 0.95), 4096), 1e-10);
}

TEST(PliUniformTest, CurveMatchesPoints) {
  const auto curve = pli::pli_uniform_curve(0.3, 4, 1, 25);
  for (const auto& pt : curve) EXPECT_DOUBLE_EQ(pt.pli, pli::pli_uniform(0.3, 4, pt.n));
}

TEST(MonteCarloTest, MatchesExactOnWorkedExample) {
  const dependence_profile prof(2, {0.5});
  const auto mc = pli::pli_monte_carlo(prof, 8, 1'000'000, 42);
  EXPECT_NEAR(mc.estimate, 0.9921875, 3 * mc.std_error);
}

TEST(MonteCarloTest, DegenerateCases) {
  EXPECT_EQ(pli::pli_monte_carlo({3, {1.0, 0.0}}, 50, 1000, 1).estimate, 0.0);
  const auto all = pli::pli_monte_carlo({2, {0.0}}, 2, 100, 1);
  EXPECT_EQ(all.estimate, 1.0);
  EXPECT_EQ(all.std_error, 0.0);
  EXPECT_THROW(pli::pli_monte_carlo({2, {0.5}}, 4, 0, 1), pli::validation_error);
}

TEST(MonteCarloTest, DeterministicPerSeed) {
  const dependence_profile prof(4, {0.3, 0.5, 0.2});
  const auto a = pli::pli_monte_carlo(prof, 9, 5000, 99);
  const auto b = pli::pli_monte_carlo(prof, 9, 5000, 99);
  EXPECT_EQ(a.estimate, b.estimate);
}

TEST(SolveIncTest, SpecExamples) {
  EXPECT_EQ(pli::solve_inc({2, {0.5}}, {0.99, 4096}), 8u);
  EXPECT_EQ(pli::solve_inc({4, {0.0, 0.0, 0.0}}, {0.9999, 4096}), 4u);
  EXPECT_EQ(pli::solve_inc({3, {0.5, 0.5}}, {0.49, 4096}), 4u);
}

TEST(SolveIncTest, UnreachableCases) {
  EXPECT_FALSE(pli::solve_inc({3, {0.2, 1.0}}, {0.5, 4096}).has_value());
  // 1 - 0.99^(n-1) >= 0.9999 needs n ~ 918.
  EXPECT_FALSE(pli::solve_inc({2, {0.99}}, {0.9999, 100}).has_value());
  EXPECT_TRUE(pli::solve_inc({2, {0.99}}, {0.9999, 4096}).has_value());
}

TEST(SolveIncTest, RejectsBadThreshold) {
  EXPECT_THROW(pli::solve_inc({2, {0.5}}, {1.0, 10}), pli::validation_error);
  EXPECT_THROW(pli::solve_inc({2, {0.5}}, {0.0, 10}), pli::validation_error);
  EXPECT_THROW(pli::solve_sinc(0.5, 2, {1.0, 10}), pli::validation_error);
}

TEST(SolveIncTest, ResultIsMinimal) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t m = 2 + rng() % 5;
    const auto prof = random_profile(rng, m, 0.95);
    const pli::sizing_request req{0.999, 4096};
    const auto n = pli::solve_inc(prof, req);
    ASSERT_TRUE(n.has_value());
    EXPECT_GE(pli::pli_exact(prof, *n), req.threshold);
    EXPECT_LT(pli::pli_exact(prof, *n - 1), req.threshold);
  }
}

TEST(SolveSincTest, SpecExamples) {
  EXPECT_EQ(pli::solve_sinc(0.5, 2, {0.99, 4096}), 8u);
  EXPECT_EQ(pli::solve_sinc(0.0, 7, {0.9999, 4096}), 7u);
  EXPECT_EQ(pli::solve_sinc(0.5, 3, {0.49, 4096}), 4u);
  EXPECT_FALSE(pli::solve_sinc(1.0, 3, {0.5, 4096}).has_value());
}

TEST(SolveSincTest, BinaryMatchesLogFormula) {
  for (double p : {0.05, 0.2, 0.5, 0.77, 0.9}) {
    for (double t : {0.5, 0.9, 0.99, 0.9999}) {
      const auto expected = static_cast<std::size_t>(std::ceil(1.0 + std::log(1.0 - t) / std::log(p)));
      EXPECT_EQ(pli::solve_sinc(p, 2, {t, 4096}), std::max<std::size_t>(expected, 2)) << p << " " << t;
    }
  }
}

}  // namespace
