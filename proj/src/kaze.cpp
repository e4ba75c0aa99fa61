#include "landchange/kaze.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "landchange/error.hpp"

namespace landchange {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Responses below this are never keypoints regardless of the configured threshold.
constexpr double kMinDetectorResponse = 1e-5;

// Weight of the centre tap in the Scharr-style cross smoothing.
constexpr double kScharrWeight = 10.0 / 3.0;

// Half-width of the descriptor sampling pattern in units of the keypoint scale.
constexpr int kDescriptorPatternHalf = 12;

int round_half_up(double v) { return static_cast<int>(std::floor(v + 0.5)); }

std::vector<float> gaussian_kernel(double sigma) {
  const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
  std::vector<float> k(2 * radius + 1);
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    const double v = std::exp(-(i * i) / (2.0 * sigma * sigma));
    k[i + radius] = static_cast<float>(v);
    sum += v;
  }
  for (float& v : k) v = static_cast<float>(v / sum);
  return k;
}

// Scale-normalised first derivative along x (dx = true) or y, using a
// Scharr-like stencil spread over `step` pixels: the difference of samples at
// +/- step, smoothed across the other axis with taps (1, w, 1) at -step, 0, +step.
Raster scharr_derivative(const Raster& src, bool along_x, int step) {
  const int w = src.width();
  const int h = src.height();
  const double norm = 1.0 / (2.0 * step * (kScharrWeight + 2.0));
  Raster diff(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      diff.at(x, y) = along_x ? src.clamped(x + step, y) - src.clamped(x - step, y)
                              : src.clamped(x, y + step) - src.clamped(x, y - step);
    }
  }
  Raster out(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double a = along_x ? diff.clamped(x, y - step) : diff.clamped(x - step, y);
      const double b = diff.at(x, y);
      const double c = along_x ? diff.clamped(x, y + step) : diff.clamped(x + step, y);
      out.at(x, y) = static_cast<float>(norm * (a + kScharrWeight * b + c));
    }
  }
  return out;
}

Raster scaled(Raster r, double factor) {
  for (float& v : r.pixels()) v = static_cast<float>(v * factor);
  return r;
}

Raster conductivity(const Raster& lx, const Raster& ly, double k, Diffusivity kind) {
  Raster g(lx.width(), lx.height());
  const double inv_k2 = 1.0 / (k * k);
  const auto gx = lx.pixels();
  const auto gy = ly.pixels();
  auto out = g.pixels();
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double s = (static_cast<double>(gx[i]) * gx[i] + static_cast<double>(gy[i]) * gy[i]) * inv_k2;
    out[i] = static_cast<float>(kind == Diffusivity::kPmG1 ? std::exp(-s) : 1.0 / (1.0 + s));
  }
  return g;
}

// Solves (I - tau * A) v = u along one line, where A is the 1-D diffusion
// operator with conductivities c and reflecting ends (Thomas algorithm).
void solve_line(std::span<const double> u, std::span<const double> c, double tau, std::span<double> v,
                std::vector<double>& diag, std::vector<double>& upper) {
  const std::size_t n = u.size();
  if (n == 1) {
    v[0] = u[0];
    return;
  }
  diag.resize(n);
  upper.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double left = i > 0 ? c[i - 1] + c[i] : 0.0;
    const double right = i + 1 < n ? c[i] + c[i + 1] : 0.0;
    diag[i] = 1.0 + tau * (left + right);
    upper[i] = -tau * right;  // also the sub-diagonal entry of row i + 1
  }
  // Forward elimination, reusing v for the modified right-hand side.
  double m = diag[0];
  v[0] = u[0] / m;
  std::vector<double>& gamma = diag;  // overwritten in place
  double prev_upper = upper[0];
  for (std::size_t i = 1; i < n; ++i) {
    const double g = prev_upper / m;
    gamma[i - 1] = g;
    m = diag[i] - prev_upper * g;
    v[i] = (u[i] - prev_upper * v[i - 1]) / m;
    prev_upper = upper[i];
  }
  for (std::size_t i = n - 1; i-- > 0;) v[i] -= gamma[i] * v[i + 1];
}

// One semi-implicit additive-operator-splitting step of size tau.
Raster aos_step(const Raster& prev, const Raster& g, double tau) {
  const int w = prev.width();
  const int h = prev.height();
  Raster out(w, h);
  std::vector<double> u, c, v, diag, upper;

  u.resize(w);
  c.resize(w);
  v.resize(w);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      u[x] = prev.at(x, y);
      c[x] = g.at(x, y);
    }
    solve_line(u, c, tau, v, diag, upper);
    for (int x = 0; x < w; ++x) out.at(x, y) = static_cast<float>(0.5 * v[x]);
  }

  u.resize(h);
  c.resize(h);
  v.resize(h);
  for (int x = 0; x < w; ++x) {
    for (int y = 0; y < h; ++y) {
      u[y] = prev.at(x, y);
      c[y] = g.at(x, y);
    }
    solve_line(u, c, tau, v, diag, upper);
    for (int y = 0; y < h; ++y) out.at(x, y) = static_cast<float>(out.at(x, y) + 0.5 * v[y]);
  }
  return out;
}

void compute_level_derivatives(ScaleLevel& level, double derivative_sigma) {
  const Raster smooth = gaussian_blur(level.image, derivative_sigma);
  const int s = level.derivative_step;
  Raster lx = scharr_derivative(smooth, true, s);
  Raster ly = scharr_derivative(smooth, false, s);
  Raster lxx = scharr_derivative(lx, true, s);
  Raster lyy = scharr_derivative(ly, false, s);
  Raster lxy = scharr_derivative(lx, false, s);
  const double s2 = static_cast<double>(s) * s;
  level.lx = scaled(std::move(lx), s);
  level.ly = scaled(std::move(ly), s);
  level.lxx = scaled(std::move(lxx), s2);
  level.lyy = scaled(std::move(lyy), s2);
  level.lxy = scaled(std::move(lxy), s2);

  level.response = Raster(level.image.width(), level.image.height());
  auto det = level.response.pixels();
  const auto xx = level.lxx.pixels();
  const auto yy = level.lyy.pixels();
  const auto xy = level.lxy.pixels();
  for (std::size_t i = 0; i < det.size(); ++i)
    det[i] = static_cast<float>(static_cast<double>(xx[i]) * yy[i] - static_cast<double>(xy[i]) * xy[i]);
}

bool is_neighborhood_max(const Raster& r, int x, int y, float value, bool skip_center) {
  for (int dy = -1; dy <= 1; ++dy) {
    for (int dx = -1; dx <= 1; ++dx) {
      if (skip_center && dx == 0 && dy == 0) continue;
      if (r.at(x + dx, y + dy) > value) return false;
    }
  }
  return true;
}

struct Candidate {
  int x = 0;
  int y = 0;
  int level = 0;
  float response = 0.0f;
};

std::vector<Candidate> find_extrema(const ScaleSpace& ss) {
  std::vector<Candidate> all;
  const double threshold = ss.config.sensitivity_threshold;
  for (std::size_t li = 1; li + 1 < ss.levels.size(); ++li) {
    const Raster& det = ss.levels[li].response;
    const Raster& below = ss.levels[li - 1].response;
    const Raster& above = ss.levels[li + 1].response;
    for (int y = 1; y < ss.height - 1; ++y) {
      for (int x = 1; x < ss.width - 1; ++x) {
        const float v = det.at(x, y);
        if (!(v > threshold && v >= kMinDetectorResponse)) continue;
        if (v < det.at(x - 1, y)) continue;
        if (!is_neighborhood_max(det, x, y, v, true)) continue;
        if (!is_neighborhood_max(below, x, y, v, false)) continue;
        if (!is_neighborhood_max(above, x, y, v, false)) continue;
        all.push_back({x, y, static_cast<int>(li), v});
      }
    }
  }
  return all;
}

// Collapses extrema found at the same place on neighbouring levels, keeping
// the stronger response. The suppression radius is the derivative step of the
// candidate's level.
std::vector<Candidate> suppress_repeated(const ScaleSpace& ss, const std::vector<Candidate>& candidates) {
  std::vector<Candidate> kept;
  for (const Candidate& c : candidates) {
    const double radius = ss.levels[c.level].derivative_step;
    const double r2 = radius * radius;
    bool is_extremum = true;
    std::size_t repeated = kept.size();
    for (std::size_t k = 0; k < kept.size(); ++k) {
      const Candidate& o = kept[k];
      if (std::abs(o.level - c.level) > 1) continue;
      const double dx = c.x - o.x;
      const double dy = c.y - o.y;
      if (dx * dx + dy * dy < r2) {
        if (c.response > o.response) {
          repeated = k;
        } else {
          is_extremum = false;
        }
        break;
      }
    }
    if (!is_extremum) continue;
    if (repeated < kept.size()) {
      kept[repeated] = c;
    } else {
      kept.push_back(c);
    }
  }
  return kept;
}

// Solves the 3x3 system a * x = b by Gaussian elimination with partial pivoting.
bool solve3(std::array<std::array<double, 3>, 3> a, std::array<double, 3> b, std::array<double, 3>& x) {
  for (int col = 0; col < 3; ++col) {
    int pivot = col;
    for (int r = col + 1; r < 3; ++r)
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    if (std::abs(a[pivot][col]) < 1e-300) return false;
    std::swap(a[col], a[pivot]);
    std::swap(b[col], b[pivot]);
    for (int r = col + 1; r < 3; ++r) {
      const double f = a[r][col] / a[col][col];
      for (int k = col; k < 3; ++k) a[r][k] -= f * a[col][k];
      b[r] -= f * b[col];
    }
  }
  for (int r = 2; r >= 0; --r) {
    double s = b[r];
    for (int k = r + 1; k < 3; ++k) s -= a[r][k] * x[k];
    x[r] = s / a[r][r];
  }
  return std::isfinite(x[0]) && std::isfinite(x[1]) && std::isfinite(x[2]);
}

double gaussian_weight(double dx, double dy, double sigma) { return std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma)); }

double bilinear(const Raster& r, double x, double y) {
  const int x0 = static_cast<int>(std::floor(x));
  const int y0 = static_cast<int>(std::floor(y));
  const double fx = x - x0;
  const double fy = y - y0;
  const double v00 = r.clamped(x0, y0);
  const double v10 = r.clamped(x0 + 1, y0);
  const double v01 = r.clamped(x0, y0 + 1);
  const double v11 = r.clamped(x0 + 1, y0 + 1);
  return (1.0 - fx) * (1.0 - fy) * v00 + fx * (1.0 - fy) * v10 + (1.0 - fx) * fy * v01 + fx * fy * v11;
}

double normalize_angle(double a) {
  a = std::fmod(a, kTwoPi);
  if (a < 0.0) a += kTwoPi;
  return a;
}

int keypoint_scale(const Keypoint& kp) { return std::max(1, round_half_up(kp.sigma)); }

double dominant_orientation(const ScaleLevel& level, const Keypoint& kp) {
  const int s = keypoint_scale(kp);
  std::vector<double> res_x, res_y, angles;
  res_x.reserve(109);
  res_y.reserve(109);
  angles.reserve(109);
  const int w = level.image.width();
  const int h = level.image.height();
  for (int i = -6; i <= 6; ++i) {
    for (int j = -6; j <= 6; ++j) {
      if (i * i + j * j >= 36) continue;
      const int iy = round_half_up(kp.y + j * s);
      const int ix = round_half_up(kp.x + i * s);
      double gx = 0.0;
      double gy = 0.0;
      if (iy >= 0 && iy < h && ix >= 0 && ix < w) {
        const double weight = gaussian_weight(iy - kp.y, ix - kp.x, 2.5 * s);
        gx = weight * level.lx.at(ix, iy);
        gy = weight * level.ly.at(ix, iy);
      }
      res_x.push_back(gx);
      res_y.push_back(gy);
      angles.push_back(normalize_angle(std::atan2(gy, gx)));
    }
  }

  // Slide a pi/3 sector around the keypoint and take the strongest sum.
  double best = 0.0;
  double orientation = 0.0;
  for (double a1 = 0.0; a1 < kTwoPi; a1 += 0.15) {
    const double a2 = a1 + std::numbers::pi / 3.0 > kTwoPi ? a1 - 5.0 * std::numbers::pi / 3.0
                                                           : a1 + std::numbers::pi / 3.0;
    double sum_x = 0.0;
    double sum_y = 0.0;
    for (std::size_t k = 0; k < angles.size(); ++k) {
      const double ang = angles[k];
      const bool inside = a1 < a2 ? (a1 < ang && ang < a2) : ((ang > 0.0 && ang < a2) || (ang > a1 && ang < kTwoPi));
      if (inside) {
        sum_x += res_x[k];
        sum_y += res_y[k];
      }
    }
    const double mag = sum_x * sum_x + sum_y * sum_y;
    if (mag > best) {
      best = mag;
      orientation = normalize_angle(std::atan2(sum_y, sum_x));
    }
  }
  return orientation;
}

// Modified-SURF descriptor: 4x4 overlapping subregions of 9x9 samples on the
// rotated grid, each contributing (sum dx, sum dy, sum |dx|, sum |dy|).
bool msurf_descriptor(const ScaleLevel& level, const Keypoint& kp, Descriptor& desc) {
  constexpr int kSampleStep = 5;
  const int scale = keypoint_scale(kp);
  const double co = std::cos(kp.orientation);
  const double si = std::sin(kp.orientation);
  std::array<double, kDescriptorLength> acc{};
  std::size_t count = 0;
  double len = 0.0;
  double cx = -0.5;
  for (int i = -8; i < kDescriptorPatternHalf; i += 9) {
    i -= 4;
    cx += 1.0;
    double cy = -0.5;
    for (int j = -8; j < kDescriptorPatternHalf; j += 9) {
      j -= 4;
      cy += 1.0;
      double dx = 0.0, dy = 0.0, mdx = 0.0, mdy = 0.0;
      const int ky = i + kSampleStep;
      const int kx = j + kSampleStep;
      const double xs = kp.x + (-kx * scale * si + ky * scale * co);
      const double ys = kp.y + (kx * scale * co + ky * scale * si);
      for (int k = i; k < i + 9; ++k) {
        for (int l = j; l < j + 9; ++l) {
          const double sample_y = kp.y + (l * scale * co + k * scale * si);
          const double sample_x = kp.x + (-l * scale * si + k * scale * co);
          const double g1 = gaussian_weight(xs - sample_x, ys - sample_y, 2.5 * scale);
          const double rx = bilinear(level.lx, sample_x, sample_y);
          const double ry = bilinear(level.ly, sample_x, sample_y);
          const double rry = g1 * (rx * co + ry * si);
          const double rrx = g1 * (-rx * si + ry * co);
          dx += rrx;
          dy += rry;
          mdx += std::abs(rrx);
          mdy += std::abs(rry);
        }
      }
      const double g2 = gaussian_weight(cx - 2.0, cy - 2.0, 1.5);
      acc[count++] = dx * g2;
      acc[count++] = dy * g2;
      acc[count++] = mdx * g2;
      acc[count++] = mdy * g2;
      len += (dx * dx + dy * dy + mdx * mdx + mdy * mdy) * g2 * g2;
    }
  }
  len = std::sqrt(len);
  if (!(len >= 1e-12)) return false;
  for (std::size_t k = 0; k < kDescriptorLength; ++k) desc[k] = static_cast<float>(acc[k] / len);
  return true;
}

}  // namespace

void DetectorConfig::validate() const {
  if (!(sensitivity_threshold > 0.0)) throw ConfigError("detector sensitivity threshold must be positive");
  if (octaves < 1) throw ConfigError("detector needs at least one octave");
  if (sublevels < 1) throw ConfigError("detector needs at least one sublevel per octave");
  if (!(initial_sigma > 0.0)) throw ConfigError("initial sigma must be positive");
  if (!(derivative_sigma > 0.0)) throw ConfigError("derivative smoothing sigma must be positive");
  if (!(contrast_percentile > 0.0 && contrast_percentile < 1.0))
    throw ConfigError("contrast percentile must lie in (0,1)");
  if (contrast_bins < 1) throw ConfigError("contrast histogram needs at least one bin");
}

Raster gaussian_blur(const Raster& src, double sigma) {
  const std::vector<float> k = gaussian_kernel(sigma);
  const int radius = static_cast<int>(k.size() / 2);
  const int w = src.width();
  const int h = src.height();
  Raster tmp(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double s = 0.0;
      for (int i = -radius; i <= radius; ++i) s += k[i + radius] * src.clamped(x + i, y);
      tmp.at(x, y) = static_cast<float>(s);
    }
  }
  Raster out(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double s = 0.0;
      for (int i = -radius; i <= radius; ++i) s += k[i + radius] * tmp.clamped(x, y + i);
      out.at(x, y) = static_cast<float>(s);
    }
  }
  return out;
}

double compute_contrast_factor(const Raster& img, double percentile, double smoothing_sigma, int bins) {
  const Raster smooth = gaussian_blur(img, smoothing_sigma);
  const Raster lx = scharr_derivative(smooth, true, 1);
  const Raster ly = scharr_derivative(smooth, false, 1);
  std::vector<double> magnitudes;
  magnitudes.reserve(img.size());
  double hmax = 0.0;
  for (int y = 1; y < img.height() - 1; ++y) {
    for (int x = 1; x < img.width() - 1; ++x) {
      const double m = std::hypot(lx.at(x, y), ly.at(x, y));
      magnitudes.push_back(m);
      hmax = std::max(hmax, m);
    }
  }
  // Flat image: any positive contrast gives identical (identity) diffusion.
  constexpr double kFallback = 0.03;
  if (hmax <= 0.0) return kFallback;

  std::vector<std::size_t> hist(static_cast<std::size_t>(bins), 0);
  std::size_t points = 0;
  for (const double m : magnitudes) {
    if (m == 0.0) continue;
    auto b = static_cast<std::size_t>(std::floor(bins * (m / hmax)));
    if (b >= hist.size()) b = hist.size() - 1;
    ++hist[b];
    ++points;
  }
  const double target = static_cast<double>(points) * percentile;
  std::size_t seen = 0;
  int k = 0;
  for (; k < bins && static_cast<double>(seen) < target; ++k) seen += hist[static_cast<std::size_t>(k)];
  if (static_cast<double>(seen) < target) return kFallback;
  return hmax * (static_cast<double>(k) / bins);
}

ScaleSpace build_scale_space(const Raster& img, const DetectorConfig& cfg) {
  cfg.validate();
  if (img.width() < kMinImageSide || img.height() < kMinImageSide)
    throw ConfigError("image must be at least " + std::to_string(kMinImageSide) + "x" + std::to_string(kMinImageSide) +
                      " for the scale space");

  ScaleSpace ss;
  ss.width = img.width();
  ss.height = img.height();
  ss.config = cfg;
  ss.contrast = compute_contrast_factor(img, cfg.contrast_percentile, cfg.derivative_sigma, cfg.contrast_bins);

  const int total = cfg.octaves * cfg.sublevels;
  // The coarsest derivative step must fit the image so stencils stay meaningful.
  const double max_sigma = cfg.initial_sigma * std::pow(2.0, static_cast<double>(total - 1) / cfg.sublevels);
  if (round_half_up(max_sigma) >= std::min(img.width(), img.height()))
    throw ConfigError("image too small for the requested number of scale levels");

  ss.levels.reserve(static_cast<std::size_t>(total));
  for (int o = 0; o < cfg.octaves; ++o) {
    for (int j = 0; j < cfg.sublevels; ++j) {
      ScaleLevel level;
      level.sigma = cfg.initial_sigma * std::pow(2.0, static_cast<double>(j) / cfg.sublevels + o);
      level.evolution_time = 0.5 * level.sigma * level.sigma;
      level.octave = o;
      level.sublevel = j;
      level.derivative_step = std::max(1, round_half_up(level.sigma));
      ss.levels.push_back(std::move(level));
    }
  }

  ss.levels[0].image = gaussian_blur(img, cfg.initial_sigma);
  for (std::size_t i = 1; i < ss.levels.size(); ++i) {
    const Raster& prev = ss.levels[i - 1].image;
    const Raster smooth = gaussian_blur(prev, cfg.derivative_sigma);
    const Raster gx = scharr_derivative(smooth, true, 1);
    const Raster gy = scharr_derivative(smooth, false, 1);
    const Raster g = conductivity(gx, gy, ss.contrast, cfg.diffusivity);
    const double tau = ss.levels[i].evolution_time - ss.levels[i - 1].evolution_time;
    ss.levels[i].image = aos_step(prev, g, tau);
  }
  for (ScaleLevel& level : ss.levels) compute_level_derivatives(level, cfg.derivative_sigma);
  return ss;
}

std::vector<Keypoint> detect_keypoints(const ScaleSpace& ss) {
  const std::vector<Candidate> candidates = suppress_repeated(ss, find_extrema(ss));
  const DetectorConfig& cfg = ss.config;
  std::vector<Keypoint> out;
  out.reserve(candidates.size());
  for (const Candidate& c : candidates) {
    const Raster& cur = ss.levels[c.level].response;
    const Raster& lo = ss.levels[c.level - 1].response;
    const Raster& hi = ss.levels[c.level + 1].response;
    const int x = c.x;
    const int y = c.y;
    const double v = cur.at(x, y);
    const double dx = 0.5 * (cur.at(x + 1, y) - cur.at(x - 1, y));
    const double dy = 0.5 * (cur.at(x, y + 1) - cur.at(x, y - 1));
    const double ds = 0.5 * (hi.at(x, y) - lo.at(x, y));
    const double dxx = cur.at(x + 1, y) + cur.at(x - 1, y) - 2.0 * v;
    const double dyy = cur.at(x, y + 1) + cur.at(x, y - 1) - 2.0 * v;
    const double dss = hi.at(x, y) + lo.at(x, y) - 2.0 * v;
    const double dxy = 0.25 * (cur.at(x + 1, y + 1) + cur.at(x - 1, y - 1) - cur.at(x + 1, y - 1) - cur.at(x - 1, y + 1));
    const double dxs = 0.25 * (hi.at(x + 1, y) + lo.at(x - 1, y) - hi.at(x - 1, y) - lo.at(x + 1, y));
    const double dys = 0.25 * (hi.at(x, y + 1) + lo.at(x, y - 1) - hi.at(x, y - 1) - lo.at(x, y + 1));

    std::array<double, 3> offset{};
    if (!solve3({{{dxx, dxy, dxs}, {dxy, dyy, dys}, {dxs, dys, dss}}}, {-dx, -dy, -ds}, offset)) continue;
    if (std::abs(offset[0]) > 1.0 || std::abs(offset[1]) > 1.0 || std::abs(offset[2]) > 1.0) continue;

    Keypoint kp;
    kp.x = std::clamp(x + offset[0], 0.0, static_cast<double>(ss.width) - 1.0);
    kp.y = std::clamp(y + offset[1], 0.0, static_cast<double>(ss.height) - 1.0);
    kp.sigma = cfg.initial_sigma * std::pow(2.0, (c.level + offset[2]) / cfg.sublevels);
    kp.response = std::abs(c.response);
    kp.level = c.level;
    out.push_back(kp);
  }
  return out;
}

std::vector<Descriptor> compute_descriptors(const ScaleSpace& ss, std::vector<Keypoint>& kps) {
  std::vector<Keypoint> kept;
  std::vector<Descriptor> descriptors;
  kept.reserve(kps.size());
  descriptors.reserve(kps.size());
  for (Keypoint kp : kps) {
    if (kp.level < 0 || kp.level >= static_cast<int>(ss.levels.size()))
      throw ConfigError("keypoint does not belong to this scale space");
    const double radius = static_cast<double>(kDescriptorPatternHalf) * keypoint_scale(kp);
    if (kp.x - radius < 0.0 || kp.y - radius < 0.0 || kp.x + radius > ss.width - 1.0 || kp.y + radius > ss.height - 1.0)
      continue;
    const ScaleLevel& level = ss.levels[static_cast<std::size_t>(kp.level)];
    kp.orientation = dominant_orientation(level, kp);
    Descriptor d{};
    if (!msurf_descriptor(level, kp, d)) continue;
    kept.push_back(kp);
    descriptors.push_back(d);
  }
  kps = std::move(kept);
  return descriptors;
}

Features detect_and_describe(const Raster& img, const DetectorConfig& cfg) {
  const ScaleSpace ss = build_scale_space(img, cfg);
  Features f;
  f.keypoints = detect_keypoints(ss);
  f.descriptors = compute_descriptors(ss, f.keypoints);
  return f;
}

}  // namespace landchange
