#include "landchange/binom_stats.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "landchange/error.hpp"

namespace landchange {
namespace {

// Terms this far (in natural log) below the leading term of a monotone tail
// can no longer change the sum at double precision.
constexpr double kTailCutoff = 50.0;

constexpr std::int64_t kFactorialTableSize = 1 << 17;

double log_factorial(std::int64_t n) {
  static const std::vector<double> table = [] {
    std::vector<double> t(kFactorialTableSize);
    for (std::int64_t i = 0; i < kFactorialTableSize; ++i) t[i] = std::lgamma(static_cast<double>(i) + 1.0);
    return t;
  }();
  if (n < kFactorialTableSize) return table[static_cast<std::size_t>(n)];
  return std::lgamma(static_cast<double>(n) + 1.0);
}

struct BinomialLogPmf {
  std::int64_t n;
  double log_p;
  double log_q;
  double log_n_factorial;

  BinomialLogPmf(std::int64_t trials, double p)
      : n(trials), log_p(std::log(p)), log_q(std::log1p(-p)), log_n_factorial(log_factorial(trials)) {}

  double operator()(std::int64_t k) const {
    return log_n_factorial - log_factorial(k) - log_factorial(n - k) + static_cast<double>(k) * log_p +
           static_cast<double>(n - k) * log_q;
  }
};

// log(1 - exp(a)) for a <= 0.
double log1m_exp(double a) {
  if (a == kLogZero) return 0.0;
  if (a > -M_LN2) return std::log(-std::expm1(a));
  return std::log1p(-std::exp(a));
}

// log sum_{i=0}^{x} pmf(i), for 0 <= x <= mode so terms shrink as i decreases.
double lower_tail_direct(const BinomialLogPmf& pmf, std::int64_t x) {
  const double lead = pmf(x);
  double acc = 1.0;
  for (std::int64_t i = x - 1; i >= 0; --i) {
    const double rel = pmf(i) - lead;
    if (rel < -kTailCutoff) break;
    acc += std::exp(rel);
  }
  return lead + std::log(acc);
}

// log sum_{i=x}^{n} pmf(i), for mode <= x <= n so terms shrink as i increases.
double upper_tail_direct(const BinomialLogPmf& pmf, std::int64_t x) {
  const double lead = pmf(x);
  double acc = 1.0;
  for (std::int64_t i = x + 1; i <= pmf.n; ++i) {
    const double rel = pmf(i) - lead;
    if (rel < -kTailCutoff) break;
    acc += std::exp(rel);
  }
  return lead + std::log(acc);
}

void check_params(std::int64_t n, double p) {
  if (n < 0) throw ConfigError("binomial trial count must be non-negative, got " + std::to_string(n));
  if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("binomial success probability must lie in [0,1]");
}

void check_counts(const NeighborhoodCounts& c) {
  if (!c.valid())
    throw ConfigError("inconsistent neighborhood counts (d=" + std::to_string(c.detected) +
                      ", m=" + std::to_string(c.matched) + ", D=" + std::to_string(c.total_detected) +
                      ", M=" + std::to_string(c.total_matched) + ")");
}

}  // namespace

LogProb log_binom_cdf(std::int64_t n, double p, std::int64_t x) {
  check_params(n, p);
  if (x < 0) return kLogZero;
  if (x >= n) return 0.0;
  if (p == 0.0) return 0.0;
  if (p == 1.0) return kLogZero;
  const BinomialLogPmf pmf(n, p);
  const double mean = static_cast<double>(n) * p;
  if (static_cast<double>(x) < mean) return lower_tail_direct(pmf, x);
  return log1m_exp(upper_tail_direct(pmf, x + 1));
}

LogProb log_binom_sf(std::int64_t n, double p, std::int64_t x) {
  check_params(n, p);
  if (x <= 0) return 0.0;
  if (x > n) return kLogZero;
  if (p == 0.0) return kLogZero;
  if (p == 1.0) return 0.0;
  const BinomialLogPmf pmf(n, p);
  const double mean = static_cast<double>(n) * p;
  if (static_cast<double>(x) > mean) return upper_tail_direct(pmf, x);
  return log1m_exp(lower_tail_direct(pmf, x - 1));
}

std::optional<LogProb> test_eq1(const NeighborhoodCounts& c) {
  check_counts(c);
  if (c.total_matched == 0) return std::nullopt;
  const double p = static_cast<double>(c.matched) / static_cast<double>(c.total_matched);
  return log_binom_sf(c.total_detected, p, c.detected);
}

LogProb test_eq2(const NeighborhoodCounts& c) {
  check_counts(c);
  if (c.total_detected == 0) throw ConfigError("test_eq2 requires at least one detected keypoint on the image");
  const double p = static_cast<double>(c.total_matched) / static_cast<double>(c.total_detected);
  return log_binom_cdf(c.detected, p, c.matched);
}

LogProb test_eq3(const NeighborhoodCounts& c) {
  check_counts(c);
  if (c.total_detected == 0) throw ConfigError("test_eq3 requires at least one detected keypoint on the image");
  const double p = static_cast<double>(c.detected) / static_cast<double>(c.total_detected);
  return log_binom_cdf(c.total_matched, p, c.matched);
}

KsReport ks_binomial_grid(std::span<const PointXY> points, int width, int height, int columns, int rows) {
  if (columns < 1 || rows < 1) throw ConfigError("K-S grid needs at least one column and one row");
  if (points.empty()) throw ConfigError("K-S grid needs at least one keypoint");
  const int patch_w = width / columns;
  const int patch_h = height / rows;
  if (patch_w < 1 || patch_h < 1) throw ConfigError("image is smaller than the K-S patch grid");

  KsReport report;
  report.columns = columns;
  report.rows = rows;
  report.counts_per_patch.assign(static_cast<std::size_t>(columns) * rows, 0);
  const double right = static_cast<double>(patch_w) * columns;
  const double bottom = static_cast<double>(patch_h) * rows;
  for (const PointXY& pt : points) {
    if (!(pt.x >= 0.0 && pt.y >= 0.0 && pt.x < right && pt.y < bottom)) continue;
    const int cx = std::min(columns - 1, static_cast<int>(pt.x / patch_w));
    const int cy = std::min(rows - 1, static_cast<int>(pt.y / patch_h));
    ++report.counts_per_patch[static_cast<std::size_t>(cy) * columns + cx];
    ++report.total_keypoints;
  }

  const auto patches = static_cast<std::int64_t>(report.counts_per_patch.size());
  const std::int64_t max_count = *std::max_element(report.counts_per_patch.begin(), report.counts_per_patch.end());
  std::vector<std::int64_t> histogram(static_cast<std::size_t>(max_count) + 1, 0);
  for (const std::int64_t c : report.counts_per_patch) ++histogram[static_cast<std::size_t>(c)];

  const double p = 1.0 / static_cast<double>(patches);
  double cumulative = 0.0;
  double sup = 0.0;
  for (std::int64_t k = 0; k <= max_count; ++k) {
    cumulative += static_cast<double>(histogram[static_cast<std::size_t>(k)]);
    const double empirical = cumulative / static_cast<double>(patches);
    const double model = std::exp(log_binom_cdf(report.total_keypoints, p, k));
    sup = std::max(sup, std::abs(empirical - model));
  }
  report.ks_statistic = std::clamp(sup, 0.0, 1.0);
  return report;
}

}  // namespace landchange
