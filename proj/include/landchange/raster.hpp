#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

namespace landchange {

/// Row-major single-channel floating point image.
///
/// Values produced by the loaders lie in [0,1]. Intermediate rasters of the
/// scale space (derivatives, detector responses) reuse the type without that
/// range guarantee.
class Raster {
 public:
  Raster() = default;
  Raster(int width, int height, float fill = 0.0f);
  Raster(int width, int height, std::vector<float> data);

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  float& at(int x, int y) { return data_[index(x, y)]; }
  float at(int x, int y) const { return data_[index(x, y)]; }

  // Replicate padding outside the image.
  float clamped(int x, int y) const;

  std::span<float> row(int y) { return {data_.data() + index(0, y), static_cast<std::size_t>(width_)}; }
  std::span<const float> row(int y) const {
    return {data_.data() + index(0, y), static_cast<std::size_t>(width_)};
  }

  std::span<float> pixels() { return data_; }
  std::span<const float> pixels() const { return data_; }

  double mean() const;

  bool operator==(const Raster& other) const = default;

 private:
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<float> data_;
};

struct ImageSize {
  int width = 0;
  int height = 0;
};

/// 8-bit RGB image used for overlays.
struct RgbImage {
  int width = 0;
  int height = 0;
  std::vector<unsigned char> data;  // width * height * 3

  RgbImage() = default;
  RgbImage(int w, int h) : width(w), height(h), data(static_cast<std::size_t>(w) * h * 3, 0) {}
  static RgbImage from_gray(const Raster& r);
  void set(int x, int y, unsigned char red, unsigned char green, unsigned char blue);
};

// BT.601 luma weights for colour input.
inline constexpr double kLumaRed = 0.299;
inline constexpr double kLumaGreen = 0.587;
inline constexpr double kLumaBlue = 0.114;

/// Loads PNG (gray/RGB, with or without alpha, 8 or 16 bit) or binary PGM/PPM
/// into a grayscale raster with intensities in [0,1].
Raster load_image(const std::filesystem::path& path);

/// Reads only the header of a supported image file.
ImageSize probe_image_size(const std::filesystem::path& path);

/// Writes an 8-bit grayscale PNG; intensities are clamped to [0,1].
void save_png(const Raster& r, const std::filesystem::path& path);
void save_png(const RgbImage& img, const std::filesystem::path& path);

/// Averages 2x2 blocks. A trailing odd row/column is dropped.
Raster downsample_2x2(const Raster& r);

}  // namespace landchange
