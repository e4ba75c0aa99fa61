#include <gtest/gtest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include <json.hpp>

#include "landchange/report.hpp"

using namespace landchange;

namespace {

ChangeResult sample_result() {
  ChangeResult r;
  r.width = 20;
  r.height = 10;
  r.score_map = Raster(20, 10, 0.0f);
  r.score_map.at(5, 5) = 4;
  r.score_map.at(6, 5) = 2;
  ChangeWindow w;
  w.bbox = {4, 3, 8, 7};
  w.mask.assign(25, 1);
  w.area = 25;
  w.peak_score = 4;
  r.windows.push_back(w);
  r.points.push_back({15, 2, Direction::kForward, -20.0, 0});
  r.points.push_back({2, 8, Direction::kBackward, -30.0, 1});
  r.first = {30, 20};
  r.second = {25, 20};
  r.match_rate = 20.0 / 25.0;
  r.threshold = 2.75;
  r.window_side = 121;
  r.proximity_radius = 4;
  return r;
}

std::array<unsigned char, 3> rgb(const RgbImage& img, int x, int y) {
  const std::size_t i = (static_cast<std::size_t>(y) * img.width + x) * 3;
  return {img.data[i], img.data[i + 1], img.data[i + 2]};
}

}  // namespace

TEST(Report, OverlayColours) {
  const RgbImage img = render_overlay(Raster(20, 10, 0.5f), sample_result());
  const std::array<unsigned char, 3> red = {255, 0, 0}, green = {0, 255, 0}, yellow = {255, 220, 0};
  EXPECT_EQ(rgb(img, 15, 2), red);
  EXPECT_EQ(rgb(img, 17, 2), red);
  EXPECT_EQ(rgb(img, 2, 8), green);
  EXPECT_EQ(rgb(img, 4, 5), yellow);  // outline
  EXPECT_EQ(rgb(img, 6, 5)[0], rgb(img, 6, 5)[2]);  // interior stays gray
  EXPECT_EQ(rgb(img, 0, 0)[0], 128);
}

TEST(Report, NormalizedMap) {
  const Raster n = normalized_score_map(sample_result());
  EXPECT_FLOAT_EQ(n.at(5, 5), 1.0f);
  EXPECT_FLOAT_EQ(n.at(6, 5), 0.5f);
  ChangeResult empty = sample_result();
  empty.score_map = Raster(3, 3, 0.0f);
  const Raster zero = normalized_score_map(empty);
  for (const float v : zero.pixels()) EXPECT_EQ(v, 0.0f);
}

TEST(Report, ScoreCsv) {
  std::ostringstream out;
  write_score_csv(sample_result(), out);
  std::istringstream in(out.str());
  std::string line;
  int rows = 0;
  while (std::getline(in, line)) {
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 19);
    if (rows == 5) {
      EXPECT_EQ(line.substr(0, 14), "0,0,0,0,0,4,2,");
    }
    ++rows;
  }
  EXPECT_EQ(rows, 10);
}

TEST(Report, SummaryJson) {
  const auto j = nlohmann::json::parse(result_summary_json(sample_result(), DetectConfig{}));
  EXPECT_EQ(j["test_variant"], "EQ3");
  EXPECT_NEAR(j["log10_epsilon"].get<double>(), -4.0, 1e-12);
  EXPECT_EQ(j["D1"], 30);
  EXPECT_EQ(j["D2"], 25);
  EXPECT_EQ(j["M"], 20);
  EXPECT_DOUBLE_EQ(j["match_rate"].get<double>(), 0.8);
  EXPECT_EQ(j["forward_points"], 1);
  EXPECT_EQ(j["backward_points"], 1);
  EXPECT_EQ(j["windows"][0]["bbox"], nlohmann::json({4, 3, 8, 7}));
  EXPECT_EQ(j["window_side"], 121);
  EXPECT_TRUE(j["change_detected"].get<bool>());

  ChangeResult none = sample_result();
  none.match_rate = std::nan("");
  none.windows.clear();
  const auto k = nlohmann::json::parse(result_summary_json(none, DetectConfig{}));
  EXPECT_TRUE(k["match_rate"].is_null());
  EXPECT_FALSE(k["change_detected"].get<bool>());
}
