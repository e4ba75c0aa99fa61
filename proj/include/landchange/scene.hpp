#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace landchange {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
  bool operator==(const Vec2&) const = default;
};

/// Closed polygon in pixel coordinates; the last vertex connects to the first.
/// Pixel (x, y) covers [x, x+1) x [y, y+1) and is inside when its center is.
using Polygon = std::vector<Vec2>;

enum class SceneLabel { kChange, kNoChange };

std::string_view to_string(SceneLabel l);  // "CHANGE" | "NO_CHANGE"
SceneLabel parse_scene_label(std::string_view s);

/// Even-odd fill of `poly` sampled at pixel centers, width * height bytes.
std::vector<std::uint8_t> rasterize_polygon(const Polygon& poly, int width, int height);

/// Axis-aligned rectangle [x, x+w] x [y, y+h] as a counter-clockwise polygon.
Polygon rectangle_polygon(double x, double y, double w, double h);

/// Shoelace area.
double polygon_area(const Polygon& poly);

}  // namespace landchange
