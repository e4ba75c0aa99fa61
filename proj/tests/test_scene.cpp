#include <gtest/gtest.h>

#include <numeric>

#include "landchange/error.hpp"
#include "landchange/scene.hpp"

using namespace landchange;

namespace {

std::size_t count(const std::vector<std::uint8_t>& m) { return std::accumulate(m.begin(), m.end(), std::size_t{0}); }

}  // namespace

TEST(Scene, LabelNames) {
  EXPECT_EQ(to_string(SceneLabel::kChange), "CHANGE");
  EXPECT_EQ(to_string(SceneLabel::kNoChange), "NO_CHANGE");
  EXPECT_EQ(parse_scene_label("NO_CHANGE"), SceneLabel::kNoChange);
  EXPECT_THROW(parse_scene_label("change?"), FormatError);
}

TEST(Scene, RectangleCoversExactPixels) {
  const auto m = rasterize_polygon(rectangle_polygon(3, 2, 5, 4), 12, 10);
  EXPECT_EQ(count(m), 20u);
  for (int y = 0; y < 10; ++y)
    for (int x = 0; x < 12; ++x) EXPECT_EQ(m[static_cast<std::size_t>(y) * 12 + x], (x >= 3 && x < 8 && y >= 2 && y < 6) ? 1 : 0);
}

TEST(Scene, RectangleVertexOrderAndArea) {
  const Polygon p = rectangle_polygon(1, 2, 3, 4);
  ASSERT_EQ(p.size(), 4u);
  EXPECT_EQ(p[0], (Vec2{1, 2}));
  EXPECT_EQ(p[2], (Vec2{4, 6}));
  EXPECT_DOUBLE_EQ(std::abs(polygon_area(p)), 12.0);
}

TEST(Scene, ClippedToImage) {
  const auto m = rasterize_polygon(rectangle_polygon(-5, -5, 10, 10), 8, 8);
  EXPECT_EQ(count(m), 25u);
}

TEST(Scene, RightTriangleCentersInside) {
  // Triangle (0,0) (10,0) (0,10): pixel center (x+.5, y+.5) inside iff x + y + 1 < 10.
  const Polygon tri = {{0, 0}, {10, 0}, {0, 10}};
  const auto m = rasterize_polygon(tri, 10, 10);
  std::size_t expect = 0;
  for (int y = 0; y < 10; ++y)
    for (int x = 0; x < 10; ++x) {
      const bool in = x + y + 1 < 10;
      expect += in;
      EXPECT_EQ(m[static_cast<std::size_t>(y) * 10 + x], in ? 1 : 0) << x << "," << y;
    }
  EXPECT_EQ(count(m), expect);
  EXPECT_DOUBLE_EQ(std::abs(polygon_area(tri)), 50.0);
}

TEST(Scene, EvenOddLeavesPentagramCenterEmpty) {
  // A pentagram's inner pentagon is crossed twice, so even-odd leaves it empty.
  const Polygon star = {{50, 5}, {77, 90}, {5, 35}, {95, 35}, {23, 90}};
  const auto m = rasterize_polygon(star, 100, 100);
  EXPECT_EQ(m[50 * 100 + 50], 0);
  EXPECT_EQ(m[20 * 100 + 50], 1);  // a tip
  EXPECT_GT(count(m), 500u);
}

TEST(Scene, DegenerateInputs) {
  EXPECT_EQ(count(rasterize_polygon({{1, 1}, {5, 5}}, 8, 8)), 0u);
  EXPECT_EQ(rasterize_polygon(rectangle_polygon(0, 0, 2, 2), 0, 0).size(), 0u);
}
