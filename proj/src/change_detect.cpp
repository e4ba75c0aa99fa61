#include "landchange/change_detect.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <string>

#include "landchange/error.hpp"

namespace landchange {
namespace {

std::int64_t as_count(std::size_t n) { return static_cast<std::int64_t>(n); }

void append_direction(std::vector<ChangePoint>& out, const FeatureSet& fs, const MatchSet& ms, MatchSide side,
                      Direction dir, TestVariant v, double radius) {
  const std::vector<bool> matched = matched_mask(ms, side);
  const NeighborhoodIndex index(fs.keypoints, matched, radius);
  for (std::size_t i = 0; i < fs.size(); ++i) {
    if (matched[i]) continue;
    const NeighborhoodCounts c = index.counts(i);
    out.push_back({fs.keypoints[i].x, fs.keypoints[i].y, dir, score_neighborhood(c, v), i});
  }
}

}  // namespace

std::string_view to_string(TestVariant v) {
  switch (v) {
    case TestVariant::kEq1:
      return "EQ1";
    case TestVariant::kEq2:
      return "EQ2";
    case TestVariant::kEq3:
      return "EQ3";
  }
  return "?";
}

TestVariant parse_test_variant(std::string_view s) {
  std::string up(s);
  for (char& c : up) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  if (up == "EQ1") return TestVariant::kEq1;
  if (up == "EQ2") return TestVariant::kEq2;
  if (up == "EQ3") return TestVariant::kEq3;
  throw ConfigError("unknown test variant '" + std::string(s) + "' (expected EQ1, EQ2 or EQ3)");
}

void DetectConfig::validate() const {
  detector.validate();
  match.validate();
  if (!(neighborhood_radius > 0.0)) throw ConfigError("neighborhood radius must be positive");
  if (window_side < 1) throw ConfigError("window side must be at least 1");
  if (!(threshold_fraction > 0.0 && threshold_fraction <= 1.0))
    throw ConfigError("threshold fraction must lie in (0, 1]");
  if (std::isnan(log_epsilon)) throw ConfigError("log epsilon is NaN");
}

bool ChangeWindow::contains(int x, int y) const {
  if (x < bbox.x0 || x > bbox.x1 || y < bbox.y0 || y > bbox.y1) return false;
  return mask[static_cast<std::size_t>(y - bbox.y0) * static_cast<std::size_t>(bbox.width()) +
              static_cast<std::size_t>(x - bbox.x0)] != 0;
}

NeighborhoodCounts neighborhood_counts(std::size_t center, std::span<const Keypoint> kps,
                                       const std::vector<bool>& matched, double radius) {
  if (center >= kps.size()) throw ConfigError("neighborhood center is not one of the keypoints");
  if (matched.size() != kps.size()) throw ConfigError("matched flags do not align with keypoints");
  NeighborhoodCounts c;
  c.total_detected = as_count(kps.size());
  const double r2 = radius * radius;
  for (std::size_t i = 0; i < kps.size(); ++i) {
    if (matched[i]) ++c.total_matched;
    const double dx = kps[i].x - kps[center].x;
    const double dy = kps[i].y - kps[center].y;
    if (dx * dx + dy * dy <= r2) {
      ++c.detected;
      if (matched[i]) ++c.matched;
    }
  }
  return c;
}

NeighborhoodIndex::NeighborhoodIndex(std::span<const Keypoint> kps, const std::vector<bool>& matched, double radius)
    : kps_(kps), matched_(&matched), radius_(radius), cell_(radius) {
  if (!(radius > 0.0)) throw ConfigError("neighborhood radius must be positive");
  if (matched.size() != kps.size()) throw ConfigError("matched flags do not align with keypoints");
  total_matched_ = as_count(static_cast<std::size_t>(std::count(matched.begin(), matched.end(), true)));
  if (kps.empty()) {
    cell_start_.assign(2, 0);
    return;
  }
  double max_x = kps[0].x, max_y = kps[0].y;
  min_x_ = kps[0].x;
  min_y_ = kps[0].y;
  for (const Keypoint& k : kps) {
    min_x_ = std::min(min_x_, k.x);
    min_y_ = std::min(min_y_, k.y);
    max_x = std::max(max_x, k.x);
    max_y = std::max(max_y, k.y);
  }
  cols_ = static_cast<int>(std::floor((max_x - min_x_) / cell_)) + 1;
  rows_ = static_cast<int>(std::floor((max_y - min_y_) / cell_)) + 1;
  const std::size_t ncells = static_cast<std::size_t>(cols_) * static_cast<std::size_t>(rows_);
  std::vector<std::size_t> cell_of(kps.size());
  cell_start_.assign(ncells + 1, 0);
  for (std::size_t i = 0; i < kps.size(); ++i) {
    const int cx = static_cast<int>(std::floor((kps[i].x - min_x_) / cell_));
    const int cy = static_cast<int>(std::floor((kps[i].y - min_y_) / cell_));
    cell_of[i] = static_cast<std::size_t>(cy) * static_cast<std::size_t>(cols_) + static_cast<std::size_t>(cx);
    ++cell_start_[cell_of[i] + 1];
  }
  for (std::size_t c = 0; c < ncells; ++c) cell_start_[c + 1] += cell_start_[c];
  members_.resize(kps.size());
  std::vector<std::size_t> fill(cell_start_.begin(), cell_start_.end() - 1);
  for (std::size_t i = 0; i < kps.size(); ++i) members_[fill[cell_of[i]]++] = i;
}

NeighborhoodCounts NeighborhoodIndex::counts(std::size_t center) const {
  if (center >= kps_.size()) throw ConfigError("neighborhood center is not one of the keypoints");
  NeighborhoodCounts c;
  c.total_detected = as_count(kps_.size());
  c.total_matched = total_matched_;
  const Keypoint& k = kps_[center];
  const double r2 = radius_ * radius_;
  const int cx = static_cast<int>(std::floor((k.x - min_x_) / cell_));
  const int cy = static_cast<int>(std::floor((k.y - min_y_) / cell_));
  for (int y = std::max(0, cy - 1); y <= std::min(rows_ - 1, cy + 1); ++y) {
    for (int x = std::max(0, cx - 1); x <= std::min(cols_ - 1, cx + 1); ++x) {
      const std::size_t cell = static_cast<std::size_t>(y) * static_cast<std::size_t>(cols_) + static_cast<std::size_t>(x);
      for (std::size_t m = cell_start_[cell]; m < cell_start_[cell + 1]; ++m) {
        const std::size_t i = members_[m];
        const double dx = kps_[i].x - k.x;
        const double dy = kps_[i].y - k.y;
        if (dx * dx + dy * dy <= r2) {
          ++c.detected;
          if ((*matched_)[i]) ++c.matched;
        }
      }
    }
  }
  return c;
}

LogProb score_neighborhood(const NeighborhoodCounts& c, TestVariant v) {
  switch (v) {
    case TestVariant::kEq1:
      return test_eq1(c).value_or(kLogZero);
    case TestVariant::kEq2:
      return test_eq2(c);
    case TestVariant::kEq3:
      return test_eq3(c);
  }
  throw InvariantError("unhandled test variant");
}

std::vector<ChangePoint> score_unmatched(const FeatureSet& fs1, const FeatureSet& fs2, const MatchSet& ms,
                                         TestVariant v, double radius) {
  if (ms.total_first != fs1.size() || ms.total_second != fs2.size())
    throw ConfigError("match set was not computed from these feature sets");
  std::vector<ChangePoint> out;
  append_direction(out, fs1, ms, MatchSide::kFirst, Direction::kForward, v, radius);
  append_direction(out, fs2, ms, MatchSide::kSecond, Direction::kBackward, v, radius);
  return out;
}

std::vector<ChangePoint> apply_threshold(std::span<const ChangePoint> candidates, LogProb log_epsilon) {
  std::vector<ChangePoint> out;
  for (const ChangePoint& p : candidates)
    if (p.log_prob < log_epsilon) out.push_back(p);
  return out;
}

std::vector<ChangePoint> flag_change_points(const FeatureSet& fs1, const FeatureSet& fs2, const MatchSet& ms,
                                            const DetectConfig& cfg) {
  cfg.validate();
  const auto candidates = score_unmatched(fs1, fs2, ms, cfg.test_variant, cfg.neighborhood_radius);
  return apply_threshold(candidates, cfg.log_epsilon);
}

std::vector<std::int64_t> box_sum(std::span<const std::int64_t> grid, int width, int height, int side) {
  if (width < 0 || height < 0 || grid.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height))
    throw ConfigError("box_sum grid size does not match its dimensions");
  if (side < 1 || side % 2 == 0) throw ConfigError("box_sum side must be odd and positive");
  const std::size_t sw = static_cast<std::size_t>(width) + 1;
  // sat[(y+1)*sw + (x+1)] holds the sum over [0,x] x [0,y].
  std::vector<std::int64_t> sat(sw * (static_cast<std::size_t>(height) + 1), 0);
  for (int y = 0; y < height; ++y) {
    std::int64_t row = 0;
    for (int x = 0; x < width; ++x) {
      row += grid[static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x)];
      sat[(static_cast<std::size_t>(y) + 1) * sw + static_cast<std::size_t>(x) + 1] =
          sat[static_cast<std::size_t>(y) * sw + static_cast<std::size_t>(x) + 1] + row;
    }
  }
  const int h = side / 2;
  std::vector<std::int64_t> out(grid.size(), 0);
  for (int y = 0; y < height; ++y) {
    const auto ya = static_cast<std::size_t>(std::max(0, y - h));
    const auto yb = static_cast<std::size_t>(std::min(height - 1, y + h)) + 1;
    for (int x = 0; x < width; ++x) {
      const auto xa = static_cast<std::size_t>(std::max(0, x - h));
      const auto xb = static_cast<std::size_t>(std::min(width - 1, x + h)) + 1;
      out[static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x)] =
          sat[yb * sw + xb] - sat[ya * sw + xb] - sat[yb * sw + xa] + sat[ya * sw + xa];
    }
  }
  return out;
}

std::vector<ChangeWindow> extract_windows(const Raster& score, double threshold) {
  const int w = score.width();
  const int h = score.height();
  std::vector<int> label(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), -1);
  std::vector<ChangeWindow> windows;
  std::vector<std::pair<int, int>> members;
  std::deque<std::pair<int, int>> queue;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t idx = static_cast<std::size_t>(y) * static_cast<std::size_t>(w) + static_cast<std::size_t>(x);
      if (label[idx] >= 0 || !(score.at(x, y) > threshold)) continue;
      const int id = static_cast<int>(windows.size());
      ChangeWindow win;
      win.bbox = {x, y, x, y};
      members.clear();
      label[idx] = id;
      queue.emplace_back(x, y);
      while (!queue.empty()) {
        const auto [px, py] = queue.front();
        queue.pop_front();
        members.emplace_back(px, py);
        win.bbox.x0 = std::min(win.bbox.x0, px);
        win.bbox.y0 = std::min(win.bbox.y0, py);
        win.bbox.x1 = std::max(win.bbox.x1, px);
        win.bbox.y1 = std::max(win.bbox.y1, py);
        win.peak_score = std::max(win.peak_score, static_cast<double>(score.at(px, py)));
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            const int nx = px + dx;
            const int ny = py + dy;
            if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
            const std::size_t n =
                static_cast<std::size_t>(ny) * static_cast<std::size_t>(w) + static_cast<std::size_t>(nx);
            if (label[n] >= 0 || !(score.at(nx, ny) > threshold)) continue;
            label[n] = id;
            queue.emplace_back(nx, ny);
          }
        }
      }
      win.mask.assign(static_cast<std::size_t>(win.bbox.width()) * static_cast<std::size_t>(win.bbox.height()), 0);
      for (const auto& [px, py] : members)
        win.mask[static_cast<std::size_t>(py - win.bbox.y0) * static_cast<std::size_t>(win.bbox.width()) +
                 static_cast<std::size_t>(px - win.bbox.x0)] = 1;
      win.area = members.size();
      windows.push_back(std::move(win));
    }
  }
  return windows;
}

AggregateResult aggregate(std::span<const ChangePoint> points, int width, int height, int window_side,
                          double threshold_fraction, std::size_t d1, std::size_t d2) {
  if (width < 1 || height < 1) throw ConfigError("aggregation needs a non-empty image");
  if (window_side < 1) throw ConfigError("window side must be at least 1");
  if (!(threshold_fraction > 0.0 && threshold_fraction <= 1.0))
    throw ConfigError("threshold fraction must lie in (0, 1]");
  AggregateResult out;
  out.window_side = window_side % 2 == 0 ? window_side + 1 : window_side;
  out.threshold = threshold_fraction * (static_cast<double>(d1) + static_cast<double>(d2)) / 2.0;

  std::vector<std::int64_t> grid(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), 0);
  for (const ChangePoint& p : points) {
    const int x = std::clamp(static_cast<int>(std::lround(p.x)), 0, width - 1);
    const int y = std::clamp(static_cast<int>(std::lround(p.y)), 0, height - 1);
    ++grid[static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x)];
  }
  const std::vector<std::int64_t> sums = box_sum(grid, width, height, out.window_side);
  out.score_map = Raster(width, height);
  auto px = out.score_map.pixels();
  for (std::size_t i = 0; i < sums.size(); ++i) px[i] = static_cast<float>(sums[i]);
  out.windows = extract_windows(out.score_map, out.threshold);
  return out;
}

PreparedPair prepare_from_features(FeatureSet fs1, FeatureSet fs2, const DetectConfig& cfg) {
  cfg.validate();
  if (fs1.width != fs2.width || fs1.height != fs2.height)
    throw ConfigError("image pair dimensions differ: " + std::to_string(fs1.width) + "x" + std::to_string(fs1.height) +
                      " vs " + std::to_string(fs2.width) + "x" + std::to_string(fs2.height));
  PreparedPair pp;
  pp.width = fs1.width;
  pp.height = fs1.height;
  pp.first = std::move(fs1);
  pp.second = std::move(fs2);
  pp.matches = symmetric_match(pp.first, pp.second, cfg.match);
  pp.variant = cfg.test_variant;
  pp.neighborhood_radius = cfg.neighborhood_radius;
  pp.candidates = score_unmatched(pp.first, pp.second, pp.matches, cfg.test_variant, cfg.neighborhood_radius);
  return pp;
}

PreparedPair prepare_pair(const Raster& img1, const Raster& img2, const DetectConfig& cfg) {
  cfg.validate();
  if (img1.width() != img2.width() || img1.height() != img2.height())
    throw ConfigError("image pair dimensions differ");
  return prepare_from_features(extract_features(img1, cfg.detector), extract_features(img2, cfg.detector), cfg);
}

ChangeResult evaluate(const PreparedPair& pp, const DetectConfig& cfg) {
  if (cfg.test_variant != pp.variant || cfg.neighborhood_radius != pp.neighborhood_radius)
    throw ConfigError("prepared pair was scored with a different test variant or neighborhood radius");
  ChangeResult r;
  r.width = pp.width;
  r.height = pp.height;
  r.points = apply_threshold(pp.candidates, cfg.log_epsilon);
  AggregateResult agg = aggregate(r.points, pp.width, pp.height, cfg.window_side, cfg.threshold_fraction,
                                  pp.first.size(), pp.second.size());
  r.score_map = std::move(agg.score_map);
  r.windows = std::move(agg.windows);
  r.threshold = agg.threshold;
  r.window_side = agg.window_side;
  r.first = {pp.first.size(), pp.matches.matched()};
  r.second = {pp.second.size(), pp.matches.matched()};
  r.match_rate = pp.first.size() + pp.second.size() == 0 ? std::nan("") : match_rate(pp.matches);
  r.proximity_radius = pp.matches.radius_used;
  return r;
}

ChangeResult detect_change(const Raster& img1, const Raster& img2, const DetectConfig& cfg) {
  return evaluate(prepare_pair(img1, img2, cfg), cfg);
}

}  // namespace landchange
