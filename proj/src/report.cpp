#include "landchange/report.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <json.hpp>

namespace landchange {
namespace {

void put(RgbImage& img, int x, int y, const unsigned char (&c)[3]) {
  if (x < 0 || y < 0 || x >= img.width || y >= img.height) return;
  img.set(x, y, c[0], c[1], c[2]);
}

void marker(RgbImage& img, double fx, double fy, const unsigned char (&c)[3]) {
  const int x = static_cast<int>(std::lround(fx));
  const int y = static_cast<int>(std::lround(fy));
  for (int d = -2; d <= 2; ++d) {
    put(img, x + d, y, c);
    put(img, x, y + d, c);
  }
}

}  // namespace

RgbImage render_overlay(const Raster& base, const ChangeResult& result) {
  RgbImage img = RgbImage::from_gray(base);
  for (const ChangeWindow& w : result.windows) {
    for (int y = w.bbox.y0; y <= w.bbox.y1; ++y) {
      for (int x = w.bbox.x0; x <= w.bbox.x1; ++x) {
        if (!w.contains(x, y)) continue;
        const bool edge = !w.contains(x - 1, y) || !w.contains(x + 1, y) || !w.contains(x, y - 1) ||
                          !w.contains(x, y + 1) || x == 0 || y == 0 || x == img.width - 1 || y == img.height - 1;
        if (edge) put(img, x, y, kWindowColor);
      }
    }
  }
  for (const ChangePoint& p : result.points)
    marker(img, p.x, p.y, p.direction == Direction::kForward ? kForwardColor : kBackwardColor);
  return img;
}

Raster normalized_score_map(const ChangeResult& result) {
  Raster out = result.score_map;
  float peak = 0.0f;
  for (const float v : out.pixels()) peak = std::max(peak, v);
  if (peak > 0.0f)
    for (float& v : out.pixels()) v /= peak;
  return out;
}

void write_score_csv(const ChangeResult& result, std::ostream& out) {
  const Raster& s = result.score_map;
  for (int y = 0; y < s.height(); ++y) {
    for (int x = 0; x < s.width(); ++x) {
      if (x > 0) out << ',';
      out << static_cast<long long>(s.at(x, y));
    }
    out << '\n';
  }
}

std::string result_summary_json(const ChangeResult& result, const DetectConfig& cfg) {
  using nlohmann::json;
  std::size_t forward = 0;
  for (const ChangePoint& p : result.points)
    if (p.direction == Direction::kForward) ++forward;
  json j;
  j["width"] = result.width;
  j["height"] = result.height;
  j["test_variant"] = std::string(to_string(cfg.test_variant));
  j["log10_epsilon"] = cfg.log_epsilon / std::log(10.0);
  j["neighborhood_radius"] = cfg.neighborhood_radius;
  j["window_side"] = result.window_side;
  j["threshold_fraction"] = cfg.threshold_fraction;
  j["aggregation_threshold"] = result.threshold;
  j["k"] = cfg.match.k;
  j["proximity_radius"] = result.proximity_radius;
  j["D1"] = result.first.detected;
  j["D2"] = result.second.detected;
  j["M"] = result.first.matched;
  if (std::isnan(result.match_rate))
    j["match_rate"] = nullptr;
  else
    j["match_rate"] = result.match_rate;
  j["forward_points"] = forward;
  j["backward_points"] = result.points.size() - forward;
  json windows = json::array();
  for (const ChangeWindow& w : result.windows) {
    windows.push_back({{"bbox", {w.bbox.x0, w.bbox.y0, w.bbox.x1, w.bbox.y1}},
                       {"area", w.area},
                       {"peak_score", w.peak_score}});
  }
  j["windows"] = std::move(windows);
  j["change_detected"] = !result.windows.empty();
  return j.dump(2);
}

}  // namespace landchange
