#include "landchange/scene.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "landchange/error.hpp"

namespace landchange {

std::string_view to_string(SceneLabel l) { return l == SceneLabel::kChange ? "CHANGE" : "NO_CHANGE"; }

SceneLabel parse_scene_label(std::string_view s) {
  if (s == "CHANGE") return SceneLabel::kChange;
  if (s == "NO_CHANGE") return SceneLabel::kNoChange;
  throw FormatError("unknown scene label '" + std::string(s) + "' (expected CHANGE or NO_CHANGE)");
}

std::vector<std::uint8_t> rasterize_polygon(const Polygon& poly, int width, int height) {
  if (width < 0 || height < 0) throw ConfigError("negative raster size");
  std::vector<std::uint8_t> mask(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), 0);
  const std::size_t n = poly.size();
  if (n < 3) return mask;
  std::vector<double> xs;
  for (int y = 0; y < height; ++y) {
    const double cy = y + 0.5;
    xs.clear();
    // Half-open rule on y keeps shared vertices from being counted twice.
    for (std::size_t i = 0; i < n; ++i) {
      const Vec2& a = poly[i];
      const Vec2& b = poly[(i + 1) % n];
      if ((a.y <= cy) == (b.y <= cy)) continue;
      xs.push_back(a.x + (cy - a.y) * (b.x - a.x) / (b.y - a.y));
    }
    std::sort(xs.begin(), xs.end());
    for (std::size_t k = 0; k + 1 < xs.size(); k += 2) {
      // Pixel centers strictly inside [xs[k], xs[k+1]).
      const int x0 = std::max(0, static_cast<int>(std::ceil(xs[k] - 0.5)));
      const int x1 = std::min(width - 1, static_cast<int>(std::ceil(xs[k + 1] - 0.5)) - 1);
      for (int x = x0; x <= x1; ++x)
        mask[static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x)] = 1;
    }
  }
  return mask;
}

Polygon rectangle_polygon(double x, double y, double w, double h) {
  return {{x, y}, {x, y + h}, {x + w, y + h}, {x + w, y}};
}

double polygon_area(const Polygon& poly) {
  double s = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[(i + 1) % poly.size()];
    s += a.x * b.y - b.x * a.y;
  }
  return std::abs(s) / 2.0;
}

}  // namespace landchange
