#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "exact_binomial.hpp"
#include "landchange/binom_stats.hpp"
#include "landchange/error.hpp"
#include "landchange/synthgen.hpp"

using namespace landchange;

namespace {

NeighborhoodCounts counts(std::int64_t d, std::int64_t m, std::int64_t D, std::int64_t M) { return {d, m, D, M}; }

}  // namespace

TEST(BinomTail, BoundaryValues) {
  EXPECT_EQ(log_binom_cdf(10, 0.3, 10), 0.0);
  EXPECT_EQ(log_binom_cdf(10, 0.3, 25), 0.0);
  EXPECT_EQ(log_binom_cdf(10, 0.3, -1), kLogZero);
  EXPECT_EQ(log_binom_sf(10, 0.3, 0), 0.0);
  EXPECT_EQ(log_binom_sf(10, 0.3, 11), kLogZero);
  EXPECT_EQ(log_binom_cdf(0, 0.5, 0), 0.0);
}

TEST(BinomTail, DegenerateProbabilities) {
  EXPECT_EQ(log_binom_cdf(5, 0.0, 0), 0.0);
  EXPECT_EQ(log_binom_cdf(5, 1.0, 4), kLogZero);
  EXPECT_EQ(log_binom_sf(5, 0.0, 1), kLogZero);
  EXPECT_EQ(log_binom_sf(5, 1.0, 5), 0.0);
}

TEST(BinomTail, SingleTrial) {
  EXPECT_NEAR(log_binom_cdf(1, 0.3, 0), std::log(0.7), 1e-15);
  EXPECT_NEAR(log_binom_sf(1, 0.3, 1), std::log(0.3), 1e-15);
}

TEST(BinomTail, ExtremeTailsStayFinite) {
  // P(X >= 200) = 0.01^200, far below double range in the linear domain.
  EXPECT_NEAR(log_binom_sf(200, 0.01, 200), 200 * std::log(0.01), 1e-9);
  EXPECT_NEAR(log_binom_cdf(5000, 0.5, 0), 5000 * std::log(0.5), 1e-7);
}

TEST(BinomTail, RejectsInvalidParameters) {
  EXPECT_THROW(log_binom_cdf(-1, 0.5, 0), ConfigError);
  EXPECT_THROW(log_binom_cdf(3, 1.5, 0), ConfigError);
  EXPECT_THROW(log_binom_sf(3, std::nan(""), 1), ConfigError);
}

TEST(BinomTail, MatchesExactRationalsOnSmallGrid) {
  for (std::int64_t n : {1, 2, 7, 30, 120}) {
    for (double p : {0.001, 0.13, 0.5, 0.77, 0.999}) {
      const auto rp = oracle::exact_double(p);
      for (std::int64_t x = 0; x <= n; ++x) {
        EXPECT_LT(oracle::relative_error(log_binom_cdf(n, p, x), oracle::binom_cdf(n, rp, x)), 1e-10)
            << "cdf n=" << n << " p=" << p << " x=" << x;
        EXPECT_LT(oracle::relative_error(log_binom_sf(n, p, x), oracle::binom_sf(n, rp, x)), 1e-10)
            << "sf n=" << n << " p=" << p << " x=" << x;
      }
    }
  }
}

TEST(BinomTail, ComplementsSumToOne) {
  SynthRng rng(7);
  for (int trial = 0; trial < 500; ++trial) {
    const std::int64_t n = rng.uniform_int(1, 400);
    const double p = rng.uniform(0.0, 1.0);
    const std::int64_t x = rng.uniform_int(0, static_cast<int>(n) - 1);
    const double total = std::exp(log_binom_cdf(n, p, x)) + std::exp(log_binom_sf(n, p, x + 1));
    EXPECT_NEAR(total, 1.0, 1e-12);
  }
}

TEST(BinomTail, MonotoneInThreshold) {
  for (double p : {0.05, 0.4, 0.9}) {
    double prev_cdf = kLogZero;
    double prev_sf = 1.0;
    for (std::int64_t x = 0; x <= 150; ++x) {
      const double c = log_binom_cdf(150, p, x);
      const double s = log_binom_sf(150, p, x);
      EXPECT_GE(c, prev_cdf);
      EXPECT_LE(s, prev_sf);
      prev_cdf = c;
      prev_sf = s;
    }
  }
}

TEST(NeighborhoodTests, Eq1UndefinedWithoutMatches) {
  EXPECT_FALSE(test_eq1(counts(3, 0, 50, 0)).has_value());
}

TEST(NeighborhoodTests, Eq1IsMinusInfinityWithZeroLocalMatches) {
  const auto v = test_eq1(counts(4, 0, 100, 60));
  ASSERT_TRUE(v.has_value());
  EXPECT_EQ(*v, kLogZero);
}

TEST(NeighborhoodTests, Eq3FiniteWithZeroLocalMatches) {
  const double v = test_eq3(counts(4, 0, 100, 60));
  EXPECT_TRUE(std::isfinite(v));
  // (1 - 4/100)^60
  EXPECT_NEAR(v, 60 * std::log(0.96), 1e-12);
}

TEST(NeighborhoodTests, Eq2ClosedForm) {
  // d = 3 keypoints, none matched, global match rate 0.5 → 0.5^3.
  EXPECT_NEAR(test_eq2(counts(3, 0, 100, 50)), 3 * std::log(0.5), 1e-14);
}

TEST(NeighborhoodTests, FullyMatchedNeighborhoodIsUnremarkable) {
  // X ~ B(80, 0.1) has mean 8, so P(X <= 10) is well above one half.
  EXPECT_GT(test_eq3(counts(10, 10, 100, 80)), std::log(0.5));
  EXPECT_EQ(test_eq2(counts(10, 10, 100, 80)), 0.0);
}

TEST(NeighborhoodTests, EmptyImageIsAConfigError) {
  EXPECT_THROW(test_eq2(counts(0, 0, 0, 0)), ConfigError);
  EXPECT_THROW(test_eq3(counts(0, 0, 0, 0)), ConfigError);
}

TEST(NeighborhoodTests, InconsistentCountsRejected) {
  EXPECT_THROW(test_eq3(counts(5, 6, 10, 8)), ConfigError);   // m > d
  EXPECT_THROW(test_eq3(counts(11, 1, 10, 8)), ConfigError);  // d > D
  EXPECT_THROW(test_eq3(counts(5, 1, 10, 11)), ConfigError);  // M > D
  EXPECT_THROW(test_eq3(counts(5, 4, 10, 3)), ConfigError);   // m > M
}

TEST(NeighborhoodTests, MoreLocalMatchesMeansLessSurprise) {
  for (std::int64_t m = 0; m < 10; ++m) {
    EXPECT_LT(test_eq3(counts(10, m, 200, 150)), test_eq3(counts(10, m + 1, 200, 150)));
    EXPECT_LT(test_eq2(counts(10, m, 200, 150)), test_eq2(counts(10, m + 1, 200, 150)));
  }
}

TEST(KsGrid, SpreadPointsFitAndConcentratedDoNot) {
  std::vector<PointXY> spread;
  SynthRng rng(11);
  for (int i = 0; i < 2000; ++i) spread.push_back({rng.uniform(0.0, 512.0), rng.uniform(0.0, 400.0)});
  const KsReport a = ks_binomial_grid(spread, 512, 400);
  EXPECT_EQ(a.columns * a.rows, 320);
  EXPECT_EQ(a.total_keypoints, 2000);
  EXPECT_LT(a.ks_statistic, 0.1);

  const std::vector<PointXY> clump(2000, PointXY{10.0, 10.0});
  EXPECT_GT(ks_binomial_grid(clump, 512, 400).ks_statistic, 0.9);
}

TEST(KsGrid, TrimsRightAndBottomRemainders) {
  // 33 x 41 on a 16 x 20 grid: 2 x 2 patches, column 32 and row 40 trimmed.
  const std::vector<PointXY> pts = {{32.5, 1.0}, {1.0, 40.5}, {1.0, 1.0}};
  const KsReport r = ks_binomial_grid(pts, 33, 41);
  EXPECT_EQ(r.total_keypoints, 1);
  EXPECT_EQ(r.counts_per_patch[0], 1);
}

TEST(KsGrid, RejectsDegenerateInput) {
  EXPECT_THROW(ks_binomial_grid({}, 512, 400), ConfigError);
  const std::vector<PointXY> one = {{1, 1}};
  EXPECT_THROW(ks_binomial_grid(one, 10, 10), ConfigError);
}
