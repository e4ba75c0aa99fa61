#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

namespace landchange {

/// Natural-log probability. Negative infinity encodes probability zero.
using LogProb = double;

inline constexpr LogProb kLogZero = -std::numeric_limits<double>::infinity();

/// Keypoint counts on a neighborhood (d, m) and on the whole image (D, M).
struct NeighborhoodCounts {
  std::int64_t detected = 0;        // d
  std::int64_t matched = 0;         // m
  std::int64_t total_detected = 0;  // D
  std::int64_t total_matched = 0;   // M

  bool valid() const {
    return matched >= 0 && matched <= detected && detected <= total_detected && matched <= total_matched &&
           total_matched <= total_detected;
  }
};

/// log P(X <= x), X ~ Binomial(n, p).
LogProb log_binom_cdf(std::int64_t n, double p, std::int64_t x);

/// log P(X >= x), X ~ Binomial(n, p), summed over the upper tail directly.
LogProb log_binom_sf(std::int64_t n, double p, std::int64_t x);

/// Probability of d or more detected keypoints when the local success
/// probability is estimated from matches, p = m/M, X ~ B(D, p).
/// Returns nullopt when M = 0 and the model is undefined.
std::optional<LogProb> test_eq1(const NeighborhoodCounts& c);

/// Probability of m or fewer matches among the d neighborhood keypoints when
/// matches are spread uniformly over keypoints, X ~ B(d, M/D).
LogProb test_eq2(const NeighborhoodCounts& c);

/// Probability of m or fewer of the M image matches falling on the
/// neighborhood when they follow the keypoint density, X ~ B(M, d/D).
LogProb test_eq3(const NeighborhoodCounts& c);

struct KsReport {
  int columns = 0;
  int rows = 0;
  std::vector<std::int64_t> counts_per_patch;  // row-major, columns * rows
  double ks_statistic = 0.0;
  std::int64_t total_keypoints = 0;
};

struct PointXY {
  double x = 0.0;
  double y = 0.0;
};

/// Kolmogorov-Smirnov distance between the empirical distribution of
/// keypoints per patch and Binomial(N, 1/#patches), on a columns x rows grid.
/// Pixels that do not fit evenly into the grid are trimmed from the right and
/// bottom edges; keypoints falling there are not counted.
KsReport ks_binomial_grid(std::span<const PointXY> points, int width, int height, int columns = 16, int rows = 20);

}  // namespace landchange
