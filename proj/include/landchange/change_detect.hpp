#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "landchange/binom_stats.hpp"
#include "landchange/feature_io.hpp"
#include "landchange/kaze.hpp"
#include "landchange/matcher.hpp"
#include "landchange/raster.hpp"

namespace landchange {

enum class TestVariant { kEq1, kEq2, kEq3 };

std::string_view to_string(TestVariant v);
TestVariant parse_test_variant(std::string_view s);  // "EQ1" | "EQ2" | "EQ3", case-insensitive

struct DetectConfig {
  DetectorConfig detector;
  MatchConfig match;
  TestVariant test_variant = TestVariant::kEq3;
  LogProb log_epsilon = std::log(1e-4);  // natural log
  double neighborhood_radius = 30.0;
  int window_side = 120;
  double threshold_fraction = 0.1;

  void validate() const;
};

enum class Direction { kForward, kBackward };

struct ChangePoint {
  double x = 0.0;
  double y = 0.0;
  Direction direction = Direction::kForward;
  LogProb log_prob = 0.0;
  std::size_t keypoint = 0;  // index into the feature set of its own image

  bool operator==(const ChangePoint&) const = default;
};

/// Inclusive pixel rectangle.
struct PixelBox {
  int x0 = 0;
  int y0 = 0;
  int x1 = -1;
  int y1 = -1;

  int width() const { return x1 - x0 + 1; }
  int height() const { return y1 - y0 + 1; }
  bool operator==(const PixelBox&) const = default;
};

struct ChangeWindow {
  PixelBox bbox;
  std::vector<std::uint8_t> mask;  // bbox-local, row-major, 1 inside the component
  std::size_t area = 0;
  double peak_score = 0.0;

  bool contains(int x, int y) const;
};

struct ImageStats {
  std::size_t detected = 0;  // D
  std::size_t matched = 0;   // M
};

struct AggregateResult {
  Raster score_map;  // box-summed change-point counts
  std::vector<ChangeWindow> windows;
  double threshold = 0.0;
  int window_side = 0;  // after odd adjustment
};

struct ChangeResult {
  int width = 0;
  int height = 0;
  std::vector<ChangePoint> points;  // forward points first, each block by keypoint index
  Raster score_map;
  std::vector<ChangeWindow> windows;
  double threshold = 0.0;
  int window_side = 0;
  ImageStats first;
  ImageStats second;
  double match_rate = 0.0;
  double proximity_radius = 0.0;
};

/// d/m counts in the closed ball of `radius` around kps[center] (the center
/// itself included), plus image totals.
NeighborhoodCounts neighborhood_counts(std::size_t center, std::span<const Keypoint> kps,
                                       const std::vector<bool>& matched, double radius);

/// Bucketed spatial index answering neighborhood_counts for every keypoint of
/// one image without a full scan per query.
class NeighborhoodIndex {
 public:
  NeighborhoodIndex(std::span<const Keypoint> kps, const std::vector<bool>& matched, double radius);
  NeighborhoodCounts counts(std::size_t center) const;

 private:
  std::span<const Keypoint> kps_;
  const std::vector<bool>* matched_;
  double radius_;
  double cell_;
  double min_x_ = 0.0;
  double min_y_ = 0.0;
  int cols_ = 1;
  int rows_ = 1;
  std::vector<std::size_t> cell_start_;
  std::vector<std::size_t> members_;
  std::int64_t total_matched_ = 0;
};

/// Log-probability of a neighborhood under the chosen test. The undefined EQ1
/// outcome (M = 0) maps to kLogZero, so it is flagged at every threshold.
LogProb score_neighborhood(const NeighborhoodCounts& c, TestVariant v);

/// One candidate per unmatched keypoint, carrying its log-probability, before
/// any threshold is applied. Forward candidates come from image 1, backward
/// ones from image 2.
std::vector<ChangePoint> score_unmatched(const FeatureSet& fs1, const FeatureSet& fs2, const MatchSet& ms,
                                         TestVariant v, double radius);

std::vector<ChangePoint> flag_change_points(const FeatureSet& fs1, const FeatureSet& fs2, const MatchSet& ms,
                                            const DetectConfig& cfg);

/// Keeps candidates with log_prob < log_epsilon.
std::vector<ChangePoint> apply_threshold(std::span<const ChangePoint> candidates, LogProb log_epsilon);

/// Uniform square box sum with zero padding, via a summed-area table.
/// `side` must be odd.
std::vector<std::int64_t> box_sum(std::span<const std::int64_t> grid, int width, int height, int side);

/// Super-threshold 8-connected components of `score`, ordered by first pixel in
/// raster order.
std::vector<ChangeWindow> extract_windows(const Raster& score, double threshold);

AggregateResult aggregate(std::span<const ChangePoint> points, int width, int height, int window_side,
                          double threshold_fraction, std::size_t d1, std::size_t d2);

/// Features and matches of a pair together with every unmatched keypoint's
/// score, so thresholds can be re-applied cheaply.
struct PreparedPair {
  int width = 0;
  int height = 0;
  FeatureSet first;
  FeatureSet second;
  MatchSet matches;
  TestVariant variant = TestVariant::kEq3;
  double neighborhood_radius = 0.0;
  std::vector<ChangePoint> candidates;
};

PreparedPair prepare_pair(const Raster& img1, const Raster& img2, const DetectConfig& cfg);
PreparedPair prepare_from_features(FeatureSet fs1, FeatureSet fs2, const DetectConfig& cfg);

/// Thresholding and aggregation of a prepared pair. Only log_epsilon,
/// window_side and threshold_fraction are taken from `cfg`.
ChangeResult evaluate(const PreparedPair& pp, const DetectConfig& cfg);

ChangeResult detect_change(const Raster& img1, const Raster& img2, const DetectConfig& cfg = {});

}  // namespace landchange
