#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "landchange/raster.hpp"
#include "landchange/scene.hpp"

namespace landchange {

/// The generator behind every synthetic routine: std::mt19937_64, with
/// uniform and normal variates derived from its raw output so results do not
/// depend on the standard library's distribution classes.
class SynthRng {
 public:
  explicit SynthRng(std::uint64_t seed) : engine_(seed) {}
  std::uint64_t next() { return engine_(); }
  double uniform();                      // [0, 1), 53 random bits
  double uniform(double lo, double hi);  // [lo, hi)
  int uniform_int(int lo, int hi);       // [lo, hi]
  double normal();                       // Box-Muller, one variate per call

 private:
  std::mt19937_64 engine_;
};

/// splitmix64 finalizer, used to derive independent sub-stream seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

enum class ChangeKind {
  kInsert,  // development present only in t1
  kRemove,  // development present only in t0
};

/// A rectangular development that appears or disappears between the dates.
struct ChangeOp {
  ChangeKind kind = ChangeKind::kInsert;
  int x = 0;
  int y = 0;
  int width = 0;
  int height = 0;

  Polygon polygon() const;
  bool operator==(const ChangeOp&) const = default;
};

struct Photometric {
  double gain = 1.0;
  double bias = 0.0;
  double noise_sigma = 0.0;  // also the noise level of t0

  bool operator==(const Photometric&) const = default;
};

struct SceneSpec {
  std::string id;
  std::uint64_t seed = 0;
  int width = 512;
  int height = 400;
  double structure_density = 500.0;  // isolated buildings per megapixel
  double development_pitch = 13.0;   // house spacing inside a change op, pixels
  Photometric photometric;           // applied to t1
  double offset_x = 0.0;             // t1 pixel (x, y) shows the t0 scene point (x + dx, y + dy)
  double offset_y = 0.0;
  std::vector<ChangeOp> changes;

  void validate() const;
  SceneLabel label() const { return changes.empty() ? SceneLabel::kNoChange : SceneLabel::kChange; }
  double change_area_fraction() const;
  bool operator==(const SceneSpec&) const = default;
};

struct ScenePair {
  Raster t0;
  Raster t1;
  std::vector<Polygon> polygons;
  SceneLabel label = SceneLabel::kNoChange;
};

ScenePair gen_scene_pair(const SceneSpec& spec);

/// Unchanged scene with identity photometry; callers adjust the fields.
SceneSpec suburban_preset(std::uint64_t seed);

struct SuiteEntry {
  SceneSpec spec;
  SceneLabel expected = SceneLabel::kNoChange;
  bool must_pass = true;  // false only for the smallest development
};

inline constexpr std::uint64_t kDefaultSuiteSeed = 20190417;

/// Ten CHANGE scenes with change fractions from 1.6% to 31% and ten
/// NO_CHANGE scenes with photometric jitter and registration offsets.
std::vector<SuiteEntry> gen_acceptance_suite(std::uint64_t root_seed = kDefaultSuiteSeed);

/// `count` unchanged suburban scenes with gain 1.1, registration offset
/// (1.5, -0.8) and noise 0.01, seeded from `root_seed`.
std::vector<SuiteEntry> gen_no_change_corpus(std::uint64_t root_seed, int count);

/// Renders every entry to `<dir>/<id>_t0.png`, `<dir>/<id>_t1.png` and writes
/// `<dir>/manifest.jsonl`. Returns the manifest path.
std::filesystem::path write_suite(const std::vector<SuiteEntry>& suite, const std::filesystem::path& dir);

}  // namespace landchange
