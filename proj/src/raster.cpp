#include "landchange/raster.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "landchange/error.hpp"

namespace landchange {

Raster::Raster(int width, int height, float fill) : width_(width), height_(height) {
  if (width < 0 || height < 0) throw ConfigError("raster dimensions must be non-negative");
  data_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
}

Raster::Raster(int width, int height, std::vector<float> data)
    : width_(width), height_(height), data_(std::move(data)) {
  if (width < 0 || height < 0) throw ConfigError("raster dimensions must be non-negative");
  if (data_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height))
    throw ConfigError("raster data length does not match width * height");
}

float Raster::clamped(int x, int y) const {
  x = std::clamp(x, 0, width_ - 1);
  y = std::clamp(y, 0, height_ - 1);
  return data_[index(x, y)];
}

double Raster::mean() const {
  if (data_.empty()) return 0.0;
  const double sum = std::accumulate(data_.begin(), data_.end(), 0.0);
  return sum / static_cast<double>(data_.size());
}

RgbImage RgbImage::from_gray(const Raster& r) {
  RgbImage out(r.width(), r.height());
  for (int y = 0; y < r.height(); ++y) {
    for (int x = 0; x < r.width(); ++x) {
      const auto v = static_cast<unsigned char>(std::lround(std::clamp(r.at(x, y), 0.0f, 1.0f) * 255.0f));
      out.set(x, y, v, v, v);
    }
  }
  return out;
}

void RgbImage::set(int x, int y, unsigned char red, unsigned char green, unsigned char blue) {
  if (x < 0 || y < 0 || x >= width || y >= height) return;
  const std::size_t i = (static_cast<std::size_t>(y) * width + x) * 3;
  data[i] = red;
  data[i + 1] = green;
  data[i + 2] = blue;
}

Raster downsample_2x2(const Raster& r) {
  if (r.width() < 2 || r.height() < 2) throw ConfigError("downsample_2x2 needs at least a 2x2 raster");
  const int w = r.width() / 2;
  const int h = r.height() / 2;
  Raster out(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double sum = static_cast<double>(r.at(2 * x, 2 * y)) + r.at(2 * x + 1, 2 * y) +
                         r.at(2 * x, 2 * y + 1) + r.at(2 * x + 1, 2 * y + 1);
      out.at(x, y) = static_cast<float>(sum * 0.25);
    }
  }
  return out;
}

}  // namespace landchange
