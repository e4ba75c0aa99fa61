#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "landchange/change_detect.hpp"
#include "landchange/scene.hpp"

namespace landchange {

struct BenchmarkScene {
  std::string id;
  std::filesystem::path path_t0;
  std::filesystem::path path_t1;
  SceneLabel label = SceneLabel::kNoChange;
  std::vector<Polygon> polygons;  // pixel coordinates, empty iff NO_CHANGE

  // Throws FormatError on label/polygon inconsistencies.
  void validate() const;
};

// Manifest: JSON Lines, one object per non-blank line:
//   {"id": "...", "t0": "a.png", "t1": "b.png", "label": "CHANGE",
//    "polygons": [[[x, y], [x, y], [x, y]], ...]}
// Relative image paths are resolved against the manifest's directory.
// Lines whose first non-blank character is '#' are comments.
std::vector<BenchmarkScene> load_manifest(const std::filesystem::path& path);

/// Parses manifest text; relative paths resolve against `base_dir`. Does not
/// touch the filesystem.
std::vector<BenchmarkScene> parse_manifest(std::istream& in, const std::filesystem::path& base_dir);

/// Writes paths relative to the manifest directory when they lie below it.
void write_manifest(const std::vector<BenchmarkScene>& scenes, const std::filesystem::path& path);

struct SceneScore {
  std::string id;
  SceneLabel label = SceneLabel::kNoChange;
  bool detected = false;  // at least one window
  bool hit = false;       // some window pixel lies inside some label polygon
  bool correct = false;
  std::size_t windows = 0;
  double window_area_fraction_sum = 0.0;  // sum over windows of area / image area
};

SceneScore score_scene(const BenchmarkScene& scene, const ChangeResult& result);

struct SweepRow {
  LogProb log_epsilon = 0.0;  // natural log
  double accuracy = 0.0;
  double tpr = 0.0;        // correct CHANGE / CHANGE scenes; NaN when there are none
  double tnr = 0.0;        // correct NO_CHANGE / NO_CHANGE scenes; NaN when there are none
  std::size_t detections = 0;
  std::size_t tp_detections = 0;
  double precision = 0.0;         // tp_detections / detections; NaN when no detections
  double mean_window_frac = 0.0;  // mean window area fraction; NaN when no windows
  std::size_t change_scenes = 0;
  std::size_t no_change_scenes = 0;
  std::size_t correct_change = 0;
  std::size_t correct_no_change = 0;
};

struct SweepReport {
  TestVariant variant = TestVariant::kEq3;
  std::vector<SweepRow> rows;                   // in threshold order as given
  std::vector<std::vector<SceneScore>> scenes;  // per row, ordered by scene id
};

SweepRow summarize(LogProb log_epsilon, std::span<const SceneScore> scores);

/// Loads each pair once, computes features and matches once, then re-runs
/// thresholding and aggregation per threshold.
SweepReport sweep_thresholds(const std::vector<BenchmarkScene>& scenes, const DetectConfig& cfg,
                             std::span<const LogProb> thresholds);

/// Same as sweep_thresholds for pairs that are already prepared; `prepared[i]`
/// belongs to `scenes[i]`.
SweepReport sweep_prepared(std::span<const BenchmarkScene> scenes, std::span<const PreparedPair> prepared,
                           const DetectConfig& cfg, std::span<const LogProb> thresholds);

inline constexpr const char* kSweepCsvHeader =
    "log_epsilon,accuracy,tpr,tnr,detections,tp_detections,precision,mean_window_frac";

/// One row per threshold; log_epsilon written as log10.
void write_sweep_csv(const SweepReport& report, std::ostream& out);

}  // namespace landchange
