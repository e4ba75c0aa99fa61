#pragma once

#include <array>
#include <vector>

#include "landchange/raster.hpp"

namespace landchange {

enum class Diffusivity { kPmG1, kPmG2 };

struct DetectorConfig {
  double sensitivity_threshold = 0.0003;  // Hessian-determinant response threshold
  int octaves = 4;
  int sublevels = 4;
  double initial_sigma = 1.6;
  double derivative_sigma = 1.0;  // pre-smoothing for gradients and conductivity
  double contrast_percentile = 0.7;
  int contrast_bins = 300;
  Diffusivity diffusivity = Diffusivity::kPmG2;

  void validate() const;
};

/// One level of the nonlinear scale space. Derivatives are scale normalised
/// (first order by the integer derivative step, second order by its square).
struct ScaleLevel {
  Raster image;
  double sigma = 0.0;
  double evolution_time = 0.0;
  int octave = 0;
  int sublevel = 0;
  int derivative_step = 1;
  Raster lx, ly, lxx, lxy, lyy;
  Raster response;  // lxx * lyy - lxy^2
};

struct ScaleSpace {
  int width = 0;
  int height = 0;
  DetectorConfig config;
  double contrast = 0.0;
  std::vector<ScaleLevel> levels;
};

struct Keypoint {
  double x = 0.0;
  double y = 0.0;
  double sigma = 0.0;
  double orientation = 0.0;  // radians in [0, 2*pi)
  double response = 0.0;
  int level = -1;  // scale-space level the keypoint was found on; -1 for imported points

  // Compares the geometric fields only; `level` is detector bookkeeping.
  bool operator==(const Keypoint& o) const {
    return x == o.x && y == o.y && sigma == o.sigma && orientation == o.orientation && response == o.response;
  }
};

inline constexpr std::size_t kDescriptorLength = 64;
using Descriptor = std::array<float, kDescriptorLength>;

struct Features {
  std::vector<Keypoint> keypoints;
  std::vector<Descriptor> descriptors;  // aligned with keypoints
};

/// Minimum image side accepted by the scale-space builder.
inline constexpr int kMinImageSide = 32;

ScaleSpace build_scale_space(const Raster& img, const DetectorConfig& cfg = {});

/// Scale-space extrema of the Hessian-determinant response, refined to
/// sub-pixel and sub-scale precision. Orientation is left at zero.
std::vector<Keypoint> detect_keypoints(const ScaleSpace& ss);

/// Computes dominant orientation and the 64-element rotated descriptor.
/// Keypoints whose descriptor window leaves the image or whose descriptor is
/// degenerate are removed from `kps` so the two lists stay aligned.
std::vector<Descriptor> compute_descriptors(const ScaleSpace& ss, std::vector<Keypoint>& kps);

Features detect_and_describe(const Raster& img, const DetectorConfig& cfg = {});

// Exposed for tests and diagnostics.
Raster gaussian_blur(const Raster& src, double sigma);
double compute_contrast_factor(const Raster& img, double percentile, double smoothing_sigma, int bins);

}  // namespace landchange
