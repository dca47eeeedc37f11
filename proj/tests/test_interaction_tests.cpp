#include <gtest/gtest.h>

#include <random>

#include "support.hpp"

using namespace lancaster;
using testing_support::normal_series;

namespace {

TestConfig config(std::size_t bootstraps, std::uint64_t seed) {
  TestConfig cfg;
  cfg.bootstraps = bootstraps;
  cfg.seed = seed;
  return cfg;
}

TripleSeries with_constant_z(const TripleSeries& t) {
  return {t.x(), t.y(), Series::scalars(std::vector<double>(t.size(), -0.25))};
}

double rejection_rate(ArKind kind, double coeff, std::size_t n, int reps, StatisticKind stat, std::uint64_t seed) {
  int rejects = 0;
  for (int r = 0; r < reps; ++r) {
    const auto t = generate({kind, n, coeff}, Stream(seed).child(r));
    const auto cfg = config(250, Stream(seed).child(r).derive_seed());
    const auto res = stat == StatisticKind::lancaster ? lancaster_test(t, cfg) : threeway_hsic_test(t, cfg);
    rejects += res.reject_h0 ? 1 : 0;
  }
  return static_cast<double>(rejects) / reps;
}

}  // namespace

TEST(Corrections, SimpleExamples) {
  EXPECT_TRUE(correction_simple({0.01, 0.02, 0.04}, 0.05));
  EXPECT_FALSE(correction_simple({0.01, 0.02, 0.06}, 0.05));
  EXPECT_TRUE(correction_simple({0.05, 0.05, 0.05}, 0.05));
}

TEST(Corrections, HolmBonferroniExamples) {
  EXPECT_TRUE(correction_holm_bonferroni({0.01, 0.02, 0.04}, 0.05));
  EXPECT_TRUE(correction_holm_bonferroni({0.04, 0.01, 0.02}, 0.05));
  EXPECT_FALSE(correction_holm_bonferroni({0.02, 0.02, 0.02}, 0.05));
  EXPECT_TRUE(correction_holm_bonferroni({0.05 / 3.0, 0.025, 0.05}, 0.05));
}

TEST(Corrections, DominanceOnGrid) {
  std::vector<double> grid;
  for (int i = 1; i <= 60; ++i) grid.push_back(i / 600.0);
  grid.insert(grid.end(), {0.2, 0.5, 1.0, 0.05 / 3.0, 0.025});
  for (double alpha : {0.01, 0.05, 0.1})
    for (double a : grid)
      for (double b : grid)
        for (double c : grid)
          ASSERT_TRUE(!correction_holm_bonferroni({a, b, c}, alpha) || correction_simple({a, b, c}, alpha));
}

TEST(TestConfig, Validation) {
  TestConfig cfg;
  cfg.bootstraps = 0;
  EXPECT_THROW(cfg.validate(), InputError);
  cfg = {};
  cfg.alpha = 1.0;
  EXPECT_THROW(cfg.validate(), InputError);
  cfg = {};
  cfg.ln = -2.0;
  EXPECT_THROW(cfg.validate(), InputError);
}

TEST(SubHypothesis, ConstantTargetHasUnitPValue) {
  const auto t = with_constant_z(generate({ArKind::weak_pairwise, 80, 1.0}, Stream(51)));
  for (auto method : {BootstrapMethod::wild, BootstrapMethod::permutation})
    for (auto kind : {StatisticKind::lancaster, StatisticKind::threeway_hsic}) {
      auto cfg = config(50, 3);
      cfg.method = method;
      const auto r = test_subhypothesis(t, Target::Z, cfg, kind);
      EXPECT_EQ(r.statistic, 0.0);
      EXPECT_EQ(r.p, 1.0);
      EXPECT_EQ(r.n_draws, 50u);
    }
}

TEST(SubHypothesis, IndependentArRegression) {
  // Recorded from a seeded run.
  const auto t = generate({ArKind::independent, 500, 0.5}, Stream(2024));
  const auto r = test_subhypothesis(t, Target::Z, config(250, 7), StatisticKind::lancaster);
  EXPECT_EQ(r.n_draws, 250u);
  EXPECT_NEAR(r.statistic, 0.097670085493050326, 1e-12);
  EXPECT_DOUBLE_EQ(r.p, 103.0 / 251.0);
}

TEST(SubHypothesis, StrongJointDependenceSaturates) {
  const auto t = generate({ArKind::weak_pairwise, 1200, 3.0}, Stream(52));
  const auto r = test_subhypothesis(t, Target::Z, config(250, 8), StatisticKind::lancaster);
  EXPECT_DOUBLE_EQ(r.p, 1.0 / 251.0);
}

TEST(SubHypothesis, PValueRange) {
  for (int seed = 0; seed < 5; ++seed) {
    const auto t = generate({ArKind::independent, 60, 0.3}, Stream(seed));
    for (Target target : kAllTargets) {
      const auto r = test_subhypothesis(t, target, config(19, seed), StatisticKind::threeway_hsic);
      EXPECT_GE(r.p, 1.0 / 20.0);
      EXPECT_LE(r.p, 1.0);
    }
  }
}

TEST(Composite, ConsistentWithDeclaredCorrection) {
  for (int seed = 0; seed < 6; ++seed) {
    const auto t = generate({ArKind::weak_pairwise, 150, 0.5 * seed}, Stream(seed));
    for (auto corr : {Correction::simple, Correction::holm_bonferroni}) {
      auto cfg = config(60, seed);
      cfg.correction = corr;
      const auto r = lancaster_test(t, cfg);
      EXPECT_EQ(r.correction, corr);
      EXPECT_EQ(r.reject_h0, apply_correction(corr, r.p_values(), cfg.alpha));
      for (Target target : kAllTargets) EXPECT_EQ(r.sub[static_cast<std::size_t>(target)].target, target);
    }
  }
}

TEST(Composite, DeterministicUnderSeed) {
  const auto t = generate({ArKind::strong_pairwise, 200, 0.2}, Stream(53));
  for (auto method : {BootstrapMethod::wild, BootstrapMethod::permutation}) {
    auto cfg = config(80, 99);
    cfg.method = method;
    const auto a = threeway_hsic_test(t, cfg);
    const auto b = threeway_hsic_test(t, cfg);
    EXPECT_EQ(a.p_values(), b.p_values());
    EXPECT_EQ(a.reject_h0, b.reject_h0);
    for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(a.sub[i].statistic, b.sub[i].statistic);
  }
}

TEST(Composite, SubTestsUseIndependentStreams) {
  // The same core bootstrapped for two targets would give equal p-values only by chance.
  const auto t = generate({ArKind::independent, 100, 0.0}, Stream(54));
  const auto r = lancaster_test(t, config(200, 1));
  EXPECT_NE(detail::subtest_stream(config(1, 1), StatisticKind::lancaster, Target::X).derive_seed(),
            detail::subtest_stream(config(1, 1), StatisticKind::lancaster, Target::Y).derive_seed());
  // All three statistics coincide for the Lancaster test; their bootstrap draws must not.
  EXPECT_NEAR(r.sub[0].statistic, r.sub[2].statistic, 1e-9 * std::abs(r.sub[2].statistic));
  EXPECT_FALSE(r.sub[0].p == r.sub[1].p && r.sub[1].p == r.sub[2].p);
}

TEST(Composite, ConstantZNeverRejects) {
  for (int seed = 0; seed < 3; ++seed) {
    const auto t = with_constant_z(generate({ArKind::weak_pairwise, 300, 2.0}, Stream(seed)));
    const auto l = lancaster_test(t, config(100, seed));
    const auto h = threeway_hsic_test(t, config(100, seed));
    EXPECT_FALSE(l.reject_h0);
    EXPECT_FALSE(h.reject_h0);
    EXPECT_EQ(l.sub[2].p, 1.0);
    EXPECT_EQ(h.sub[2].p, 1.0);
  }
}

TEST(Composite, MedianHeuristicResolvesBandwidths) {
  const auto t = generate({ArKind::weak_pairwise, 100, 1.0}, Stream(55));
  auto cfg = config(20, 0);
  cfg.median_heuristic = true;
  const auto k = resolve_kernels(t, cfg);
  EXPECT_DOUBLE_EQ(k.x.bandwidth(), median_heuristic_bandwidth(t.x()));
  EXPECT_DOUBLE_EQ(k.z.bandwidth(), median_heuristic_bandwidth(t.z()));
  EXPECT_NO_THROW(lancaster_test(t, cfg));
}

TEST(Composite, LancasterTypeIBoundOnIndependentAr) {
  EXPECT_LE(rejection_rate(ArKind::independent, 0.5, 500, 200, StatisticKind::lancaster, 56), 0.08);
}

TEST(Composite, LancasterPowerWeakPairwise) {
  EXPECT_GE(rejection_rate(ArKind::weak_pairwise, 2.0, 1200, 50, StatisticKind::lancaster, 57), 0.9);
}

TEST(Composite, ThreewayHsicBeatsLancasterOnStrongPairwise) {
  const double h = rejection_rate(ArKind::strong_pairwise, 0.5, 300, 40, StatisticKind::threeway_hsic, 58);
  const double l = rejection_rate(ArKind::strong_pairwise, 0.5, 300, 40, StatisticKind::lancaster, 58);
  EXPECT_GT(h, l);
}

TEST(Composite, WildTypeIBoundAcrossFactorisingGenerators) {
  for (double a : {0.0, 0.3, 0.6}) {
    const double rate = rejection_rate(ArKind::independent, a, 300, 200, StatisticKind::lancaster, 59);
    EXPECT_GE(rate, 0.0) << a;
    EXPECT_LE(rate, 0.10) << a;
  }
}

TEST(Composite, SemiConsistencyInSampleSize) {
  double prev = -1.0;
  for (std::size_t n : {200u, 600u, 1200u}) {
    const double rate = rejection_rate(ArKind::weak_pairwise, 2.0, n, 50, StatisticKind::lancaster, 60);
    EXPECT_GE(rate, prev) << "n=" << n;
    prev = rate;
  }
}

TEST(PairwiseHsic, SelfDependenceSaturates) {
  std::mt19937_64 rng(61);
  const auto a = normal_series(500, 1, rng);
  EXPECT_DOUBLE_EQ(pairwise_hsic_test(a, a, config(250, 1)).p, 1.0 / 251.0);
}

TEST(PairwiseHsic, ConstantGivesUnitPValue) {
  std::mt19937_64 rng(62);
  const auto r = pairwise_hsic_test(normal_series(50, 1, rng), Series::scalars(std::vector<double>(50, 2.0)),
                                    config(100, 1));
  EXPECT_EQ(r.p, 1.0);
  EXPECT_EQ(r.statistic, 0.0);
}

TEST(PairwiseHsic, CalibratedOnIndependentAr) {
  int rejects = 0;
  for (int r = 0; r < 200; ++r) {
    const auto t = generate({ArKind::independent, 500, 0.5}, Stream(63).child(r));
    rejects += pairwise_hsic_test(t.x(), t.y(), config(250, r)).p <= 0.05 ? 1 : 0;
  }
  EXPECT_LE(rejects / 200.0, 0.08);
}

TEST(PairwiseHsic, LengthMismatchThrows) {
  EXPECT_THROW(pairwise_hsic_test(Series::scalars({0, 1, 2}), Series::scalars({0, 1}), config(5, 0)), InputError);
}
