#include "landchange/synthgen.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "landchange/benchmark.hpp"
#include "landchange/error.hpp"

namespace landchange {
namespace {

constexpr int kSupersample = 4;

// Sub-stream identifiers for mix_seed.
constexpr std::uint64_t kStreamWorld = 1;
constexpr std::uint64_t kStreamNoiseT0 = 2;
constexpr std::uint64_t kStreamNoiseT1 = 3;
constexpr std::uint64_t kStreamDevelopment = 16;

struct Octave {
  double period = 1.0;
  double amplitude = 0.0;
  double origin = 0.0;
  int cols = 0;
  int rows = 0;
  std::vector<double> lattice;

  double at(double u, double v) const {
    const double gu = (u - origin) / period;
    const double gv = (v - origin) / period;
    const int iu = std::clamp(static_cast<int>(std::floor(gu)), 0, cols - 2);
    const int iv = std::clamp(static_cast<int>(std::floor(gv)), 0, rows - 2);
    const double fu = std::clamp(gu - iu, 0.0, 1.0);
    const double fv = std::clamp(gv - iv, 0.0, 1.0);
    const double su = fu * fu * (3.0 - 2.0 * fu);
    const double sv = fv * fv * (3.0 - 2.0 * fv);
    const auto l = [&](int x, int y) { return lattice[static_cast<std::size_t>(y) * cols + x]; };
    const double top = l(iu, iv) + su * (l(iu + 1, iv) - l(iu, iv));
    const double bot = l(iu, iv + 1) + su * (l(iu + 1, iv + 1) - l(iu, iv + 1));
    return amplitude * (top + sv * (bot - top));
  }
};

enum class ShapeKind { kRect, kSegment };
enum class PaintMode { kReplace, kAdd };

struct Shape {
  ShapeKind kind = ShapeKind::kRect;
  PaintMode mode = PaintMode::kReplace;
  double value = 0.0;
  // Rotated rectangle: center, half extents, angle.
  double cx = 0.0, cy = 0.0, hw = 0.0, hh = 0.0, angle = 0.0;
  // Segment: endpoints and half width.
  double ax = 0.0, ay = 0.0, bx = 0.0, by = 0.0, half_width = 0.0;

  void bounds(double& u0, double& v0, double& u1, double& v1) const {
    if (kind == ShapeKind::kRect) {
      const double c = std::abs(std::cos(angle)), s = std::abs(std::sin(angle));
      const double ex = hw * c + hh * s, ey = hw * s + hh * c;
      u0 = cx - ex, u1 = cx + ex, v0 = cy - ey, v1 = cy + ey;
    } else {
      u0 = std::min(ax, bx) - half_width, u1 = std::max(ax, bx) + half_width;
      v0 = std::min(ay, by) - half_width, v1 = std::max(ay, by) + half_width;
    }
  }

  bool contains(double u, double v) const {
    if (kind == ShapeKind::kRect) {
      const double c = std::cos(angle), s = std::sin(angle);
      const double du = u - cx, dv = v - cy;
      return std::abs(c * du + s * dv) <= hw && std::abs(-s * du + c * dv) <= hh;
    }
    const double dx = bx - ax, dy = by - ay;
    const double len2 = dx * dx + dy * dy;
    double t = len2 > 0.0 ? ((u - ax) * dx + (v - ay) * dy) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    const double px = ax + t * dx - u, py = ay + t * dy - v;
    return px * px + py * py <= half_width * half_width;
  }
};

struct Clip {
  double u0, v0, u1, v1;
};

struct Development {
  ChangeOp op;
  std::vector<Shape> shapes;  // the lot first, then streets and houses
};

struct World {
  double base = 0.0;
  std::vector<Octave> octaves;
  std::vector<Shape> shapes;
  std::vector<Development> developments;
};

Octave make_octave(SynthRng& rng, double period, double amplitude, int width, int height) {
  Octave o;
  o.period = period;
  o.amplitude = amplitude;
  o.origin = -2.0 * period;
  o.cols = static_cast<int>(std::ceil((width + 4.0 * period) / period)) + 2;
  o.rows = static_cast<int>(std::ceil((height + 4.0 * period) / period)) + 2;
  o.lattice.resize(static_cast<std::size_t>(o.cols) * o.rows);
  for (double& v : o.lattice) v = rng.uniform(-1.0, 1.0);
  return o;
}

Shape make_rect(double cx, double cy, double hw, double hh, double angle, double value,
                PaintMode mode = PaintMode::kReplace) {
  Shape s;
  s.kind = ShapeKind::kRect;
  s.mode = mode;
  s.cx = cx, s.cy = cy, s.hw = hw, s.hh = hh, s.angle = angle, s.value = value;
  return s;
}

Shape make_segment(double ax, double ay, double bx, double by, double half_width, double value) {
  Shape s;
  s.kind = ShapeKind::kSegment;
  s.ax = ax, s.ay = ay, s.bx = bx, s.by = by, s.half_width = half_width, s.value = value;
  return s;
}

double roof_value(SynthRng& rng) { return rng.uniform() < 0.7 ? rng.uniform(0.68, 0.92) : rng.uniform(0.06, 0.18); }

bool overlaps_change(const SceneSpec& spec, double cx, double cy, double radius, double margin) {
  for (const ChangeOp& op : spec.changes) {
    if (cx + radius + margin > op.x && cx - radius - margin < op.x + op.width && cy + radius + margin > op.y &&
        cy - radius - margin < op.y + op.height)
      return true;
  }
  return false;
}

Development make_development(const SceneSpec& spec, const ChangeOp& op, SynthRng& rng) {
  Development dev;
  dev.op = op;
  const double lot = rng.uniform(0.44, 0.54);
  dev.shapes.push_back(make_rect(op.x + op.width / 2.0, op.y + op.height / 2.0, op.width / 2.0, op.height / 2.0, 0.0,
                                 lot));
  const double pitch = spec.development_pitch;
  const double margin = 0.5 * pitch;
  const int cols = std::max(1, static_cast<int>(std::floor((op.width - 2.0 * margin) / pitch)) + 1);
  const int rows = std::max(1, static_cast<int>(std::floor((op.height - 2.0 * margin) / pitch)) + 1);
  const double x0 = op.x + (op.width - (cols - 1) * pitch) / 2.0;
  const double y0 = op.y + (op.height - (rows - 1) * pitch) / 2.0;
  const double street = rng.uniform(0.64, 0.74);
  // A street between every third row of houses.
  for (int r = 2; r < rows - 1; r += 3) {
    const double y = y0 + (r + 0.5) * pitch;
    dev.shapes.push_back(make_segment(op.x + 2.0, y, op.x + op.width - 2.0, y, 1.5, street));
  }
  const double tilt = rng.uniform(-0.3, 0.3);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      if (rng.uniform() < 0.1) continue;  // empty plot
      const double cx = x0 + c * pitch + rng.uniform(-1.0, 1.0);
      const double cy = y0 + r * pitch + rng.uniform(-1.0, 1.0);
      const double hw = rng.uniform(0.22, 0.34) * pitch;
      const double hh = rng.uniform(0.18, 0.3) * pitch;
      dev.shapes.push_back(make_rect(cx, cy, hw, hh, tilt + rng.uniform(-0.1, 0.1), roof_value(rng)));
    }
  }
  return dev;
}

World make_world(const SceneSpec& spec) {
  SynthRng rng(mix_seed(spec.seed, kStreamWorld));
  World w;
  const int W = spec.width, H = spec.height;
  w.base = rng.uniform(0.3, 0.4);
  w.octaves.push_back(make_octave(rng, 160.0, 0.06, W, H));
  w.octaves.push_back(make_octave(rng, 64.0, 0.03, W, H));
  w.octaves.push_back(make_octave(rng, 24.0, 0.01, W, H));

  // Fields: large patches that shift the background level.
  const int fields = rng.uniform_int(4, 7);
  for (int i = 0; i < fields; ++i) {
    const double hw = rng.uniform(40.0, 110.0), hh = rng.uniform(40.0, 110.0);
    const double delta = (rng.uniform() < 0.5 ? -1.0 : 1.0) * rng.uniform(0.03, 0.08);
    w.shapes.push_back(make_rect(rng.uniform(0.0, W), rng.uniform(0.0, H), hw, hh, 0.0, delta, PaintMode::kAdd));
  }

  // Roads: straight lines crossing the whole frame.
  const int roads = rng.uniform_int(2, 4);
  const double reach = 2.0 * std::hypot(W, H);
  for (int i = 0; i < roads; ++i) {
    const double px = rng.uniform(0.1 * W, 0.9 * W), py = rng.uniform(0.1 * H, 0.9 * H);
    const double a = rng.uniform(0.0, std::numbers::pi);
    const double dx = std::cos(a) * reach, dy = std::sin(a) * reach;
    w.shapes.push_back(make_segment(px - dx, py - dy, px + dx, py + dy, rng.uniform(2.0, 3.5), rng.uniform(0.6, 0.72)));
  }

  // Isolated buildings, kept off the change rectangles and off each other.
  const int buildings = static_cast<int>(std::lround(spec.structure_density * W * H / 1e6));
  std::vector<std::array<double, 3>> placed;
  for (int i = 0; i < buildings; ++i) {
    for (int attempt = 0; attempt < 50; ++attempt) {
      const double hw = rng.uniform(3.0, 8.0), hh = rng.uniform(3.0, 8.0);
      const double r = std::hypot(hw, hh);
      const double cx = rng.uniform(r + 4.0, W - r - 4.0), cy = rng.uniform(r + 4.0, H - r - 4.0);
      const double angle = rng.uniform(0.0, std::numbers::pi);
      const double value = roof_value(rng);
      if (overlaps_change(spec, cx, cy, r, 4.0)) continue;
      bool clear = true;
      for (const auto& p : placed)
        if (std::hypot(cx - p[0], cy - p[1]) < r + p[2] + 3.0) clear = false;
      if (!clear) continue;
      placed.push_back({cx, cy, r});
      w.shapes.push_back(make_rect(cx, cy, hw, hh, angle, value));
      break;
    }
  }

  for (std::size_t k = 0; k < spec.changes.size(); ++k) {
    SynthRng dev_rng(mix_seed(spec.seed, kStreamDevelopment + k));
    w.developments.push_back(make_development(spec, spec.changes[k], dev_rng));
  }
  return w;
}

// Supersampled canvas over the scene window starting at (du, dv).
class Canvas {
 public:
  Canvas(int width, int height, double du, double dv)
      : width_(width), height_(height), du_(du), dv_(dv), sw_(width * kSupersample), sh_(height * kSupersample),
        samples_(static_cast<std::size_t>(sw_) * sh_) {}

  double u(int i) const { return du_ + (i + 0.5) / kSupersample; }
  double v(int j) const { return dv_ + (j + 0.5) / kSupersample; }

  void fill_background(const World& w) {
    for (int j = 0; j < sh_; ++j) {
      for (int i = 0; i < sw_; ++i) {
        double val = w.base;
        for (const Octave& o : w.octaves) val += o.at(u(i), v(j));
        samples_[static_cast<std::size_t>(j) * sw_ + i] = val;
      }
    }
  }

  void paint(const Shape& s, const Clip* clip = nullptr) {
    double u0, v0, u1, v1;
    s.bounds(u0, v0, u1, v1);
    if (clip != nullptr) {
      u0 = std::max(u0, clip->u0), v0 = std::max(v0, clip->v0);
      u1 = std::min(u1, clip->u1), v1 = std::min(v1, clip->v1);
    }
    const int i0 = std::max(0, static_cast<int>(std::floor((u0 - du_) * kSupersample)));
    const int i1 = std::min(sw_ - 1, static_cast<int>(std::ceil((u1 - du_) * kSupersample)));
    const int j0 = std::max(0, static_cast<int>(std::floor((v0 - dv_) * kSupersample)));
    const int j1 = std::min(sh_ - 1, static_cast<int>(std::ceil((v1 - dv_) * kSupersample)));
    for (int j = j0; j <= j1; ++j) {
      const double vv = v(j);
      if (clip != nullptr && (vv < clip->v0 || vv >= clip->v1)) continue;
      for (int i = i0; i <= i1; ++i) {
        const double uu = u(i);
        if (clip != nullptr && (uu < clip->u0 || uu >= clip->u1)) continue;
        if (!s.contains(uu, vv)) continue;
        double& px = samples_[static_cast<std::size_t>(j) * sw_ + i];
        px = s.mode == PaintMode::kAdd ? px + s.value : s.value;
      }
    }
  }

  Raster resolve() const {
    Raster out(width_, height_);
    constexpr double kNorm = 1.0 / (kSupersample * kSupersample);
    for (int y = 0; y < height_; ++y) {
      for (int x = 0; x < width_; ++x) {
        double acc = 0.0;
        for (int j = 0; j < kSupersample; ++j)
          for (int i = 0; i < kSupersample; ++i)
            acc += samples_[static_cast<std::size_t>(y * kSupersample + j) * sw_ + x * kSupersample + i];
        out.at(x, y) = static_cast<float>(acc * kNorm);
      }
    }
    return out;
  }

 private:
  int width_, height_;
  double du_, dv_;
  int sw_, sh_;
  std::vector<double> samples_;
};

Raster render(const World& w, const SceneSpec& spec, bool second, double du, double dv) {
  Canvas canvas(spec.width, spec.height, du, dv);
  canvas.fill_background(w);
  for (const Shape& s : w.shapes) canvas.paint(s);
  for (const Development& d : w.developments) {
    const bool present = (d.op.kind == ChangeKind::kInsert) == second;
    if (!present) continue;
    const Clip clip{static_cast<double>(d.op.x), static_cast<double>(d.op.y), static_cast<double>(d.op.x + d.op.width),
                    static_cast<double>(d.op.y + d.op.height)};
    for (const Shape& s : d.shapes) canvas.paint(s, &clip);
  }
  return canvas.resolve();
}

void apply_photometric(Raster& img, double gain, double bias, double noise_sigma, std::uint64_t noise_seed) {
  SynthRng rng(noise_seed);
  for (float& p : img.pixels()) {
    double v = gain * p + bias;
    if (noise_sigma > 0.0) v += noise_sigma * rng.normal();
    p = static_cast<float>(std::clamp(v, 0.0, 1.0));
  }
}

}  // namespace

double SynthRng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double SynthRng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

int SynthRng::uniform_int(int lo, int hi) {
  const auto span = static_cast<std::uint64_t>(static_cast<std::int64_t>(hi) - lo + 1);
  return lo + static_cast<int>(engine_() % span);
}

double SynthRng::normal() {
  const double u1 = 1.0 - uniform();  // (0, 1]
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

Polygon ChangeOp::polygon() const { return rectangle_polygon(x, y, width, height); }

void SceneSpec::validate() const {
  if (width < 32 || height < 32) throw ConfigError("scene must be at least 32x32 pixels");
  if (!(structure_density >= 0.0)) throw ConfigError("structure density must be non-negative");
  if (!(development_pitch >= 4.0)) throw ConfigError("development pitch must be at least 4 pixels");
  if (!(photometric.noise_sigma >= 0.0)) throw ConfigError("noise sigma must be non-negative");
  if (!std::isfinite(photometric.gain) || !std::isfinite(photometric.bias)) throw ConfigError("non-finite photometry");
  if (!std::isfinite(offset_x) || !std::isfinite(offset_y)) throw ConfigError("non-finite registration offset");
  for (std::size_t i = 0; i < changes.size(); ++i) {
    const ChangeOp& a = changes[i];
    if (a.width < 1 || a.height < 1 || a.x < 0 || a.y < 0 || a.x + a.width > width || a.y + a.height > height)
      throw ConfigError("change rectangle " + std::to_string(i) + " lies outside the scene");
    for (std::size_t j = 0; j < i; ++j) {
      const ChangeOp& b = changes[j];
      if (a.x < b.x + b.width && b.x < a.x + a.width && a.y < b.y + b.height && b.y < a.y + a.height)
        throw ConfigError("change rectangles " + std::to_string(j) + " and " + std::to_string(i) + " overlap");
    }
  }
}

double SceneSpec::change_area_fraction() const {
  double area = 0.0;
  for (const ChangeOp& op : changes) area += static_cast<double>(op.width) * op.height;
  return area / (static_cast<double>(width) * height);
}

ScenePair gen_scene_pair(const SceneSpec& spec) {
  spec.validate();
  const World world = make_world(spec);
  ScenePair pair;
  pair.t0 = render(world, spec, false, 0.0, 0.0);
  pair.t1 = render(world, spec, true, spec.offset_x, spec.offset_y);
  const Photometric& ph = spec.photometric;
  apply_photometric(pair.t0, 1.0, 0.0, ph.noise_sigma, mix_seed(spec.seed, kStreamNoiseT0));
  apply_photometric(pair.t1, ph.gain, ph.bias, ph.noise_sigma, mix_seed(spec.seed, kStreamNoiseT1));
  for (const ChangeOp& op : spec.changes) pair.polygons.push_back(op.polygon());
  pair.label = spec.label();
  return pair;
}

SceneSpec suburban_preset(std::uint64_t seed) {
  SceneSpec s;
  s.id = "suburban_" + std::to_string(seed);
  s.seed = seed;
  return s;
}

std::vector<SuiteEntry> gen_acceptance_suite(std::uint64_t root_seed) {
  // Change fractions average about 7%, spanning 1.6% to 31%.
  constexpr double kFractions[] = {0.016, 0.025, 0.03, 0.035, 0.04, 0.05, 0.06, 0.07, 0.08, 0.31};
  constexpr int kScenesPerClass = 10;
  std::vector<SuiteEntry> suite;
  for (int i = 0; i < 2 * kScenesPerClass; ++i) {
    const bool change = i < kScenesPerClass;
    const int k = change ? i : i - kScenesPerClass;
    SceneSpec s = suburban_preset(mix_seed(root_seed, static_cast<std::uint64_t>(i)));
    s.id = std::string(change ? "change_" : "nochange_") + (k < 10 ? "0" : "") + std::to_string(k);
    SynthRng rng(mix_seed(s.seed, 0));
    s.photometric.gain = rng.uniform(0.9, 1.1);
    s.photometric.bias = rng.uniform(-0.03, 0.03);
    s.photometric.noise_sigma = 0.01;
    const double shift = rng.uniform(0.0, 2.0), dir = rng.uniform(0.0, 2.0 * std::numbers::pi);
    s.offset_x = shift * std::cos(dir);
    s.offset_y = shift * std::sin(dir);
    SuiteEntry e;
    if (change) {
      const double area = kFractions[k] * s.width * s.height;
      const double aspect = rng.uniform(0.75, 1.33);
      constexpr int kBorder = 24;
      ChangeOp op;
      op.kind = (k == 3 || k == 7) ? ChangeKind::kRemove : ChangeKind::kInsert;
      op.width = std::min(s.width - 2 * kBorder, static_cast<int>(std::lround(std::sqrt(area * aspect))));
      op.height = std::min(s.height - 2 * kBorder, static_cast<int>(std::lround(area / op.width)));
      op.x = rng.uniform_int(kBorder, s.width - kBorder - op.width);
      op.y = rng.uniform_int(kBorder, s.height - kBorder - op.height);
      s.changes.push_back(op);
      e.expected = SceneLabel::kChange;
      e.must_pass = k != 0;
    }
    e.spec = std::move(s);
    suite.push_back(std::move(e));
  }
  return suite;
}

std::vector<SuiteEntry> gen_no_change_corpus(std::uint64_t root_seed, int count) {
  if (count < 0) throw ConfigError("corpus size must be non-negative");
  std::vector<SuiteEntry> out;
  for (int i = 0; i < count; ++i) {
    SuiteEntry e;
    e.spec = suburban_preset(mix_seed(root_seed, 1000 + static_cast<std::uint64_t>(i)));
    e.spec.id = "corpus_" + std::string(i < 10 ? "0" : "") + std::to_string(i);
    e.spec.photometric = {1.1, 0.0, 0.01};
    e.spec.offset_x = 1.5;
    e.spec.offset_y = -0.8;
    out.push_back(std::move(e));
  }
  return out;
}

std::filesystem::path write_suite(const std::vector<SuiteEntry>& suite, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
  std::vector<BenchmarkScene> scenes;
  for (const SuiteEntry& e : suite) {
    const ScenePair pair = gen_scene_pair(e.spec);
    BenchmarkScene bs;
    bs.id = e.spec.id;
    bs.path_t0 = dir / (e.spec.id + "_t0.png");
    bs.path_t1 = dir / (e.spec.id + "_t1.png");
    bs.label = pair.label;
    bs.polygons = pair.polygons;
    save_png(pair.t0, bs.path_t0);
    save_png(pair.t1, bs.path_t1);
    scenes.push_back(std::move(bs));
  }
  const std::filesystem::path manifest = dir / "manifest.jsonl";
  write_manifest(scenes, manifest);
  return manifest;
}

}  // namespace landchange
