#include "landchange/benchmark.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "landchange/error.hpp"

namespace landchange {
namespace {

using nlohmann::json;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string where(std::size_t line) { return "manifest line " + std::to_string(line) + ": "; }

Polygon parse_polygon(const json& j, std::size_t line) {
  if (!j.is_array()) throw FormatError(where(line) + "polygon must be an array of [x, y] vertices");
  Polygon poly;
  for (const json& v : j) {
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
      throw FormatError(where(line) + "polygon vertex must be a numeric [x, y] pair");
    poly.push_back({v[0].get<double>(), v[1].get<double>()});
    if (!std::isfinite(poly.back().x) || !std::isfinite(poly.back().y))
      throw FormatError(where(line) + "polygon vertex is not finite");
  }
  if (poly.size() < 3) throw FormatError(where(line) + "polygon needs at least 3 vertices");
  return poly;
}

std::string required_string(const json& rec, const char* key, std::size_t line) {
  const auto it = rec.find(key);
  if (it == rec.end() || !it->is_string()) throw FormatError(where(line) + "missing string field '" + key + "'");
  return it->get<std::string>();
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  const std::filesystem::path path(p);
  return path.is_absolute() ? path : base / path;
}

std::string relative_if_below(const std::filesystem::path& p, const std::filesystem::path& base) {
  const auto abs_p = std::filesystem::absolute(p).lexically_normal();
  const auto abs_b = std::filesystem::absolute(base).lexically_normal();
  const auto rel = abs_p.lexically_relative(abs_b);
  if (!rel.empty() && *rel.begin() != "..") return rel.generic_string();
  return abs_p.generic_string();
}

double ratio_or_nan(std::size_t num, std::size_t den) {
  return den == 0 ? kNaN : static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

void BenchmarkScene::validate() const {
  if (id.empty()) throw FormatError("scene id must not be empty");
  if (label == SceneLabel::kChange && polygons.empty())
    throw FormatError("scene '" + id + "' is labeled CHANGE but has no polygons");
  if (label == SceneLabel::kNoChange && !polygons.empty())
    throw FormatError("scene '" + id + "' is labeled NO_CHANGE but has polygons");
  for (const Polygon& p : polygons)
    if (p.size() < 3) throw FormatError("scene '" + id + "' has a polygon with fewer than 3 vertices");
}

std::vector<BenchmarkScene> parse_manifest(std::istream& in, const std::filesystem::path& base_dir) {
  std::vector<BenchmarkScene> scenes;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    const auto first = text.find_first_not_of(" \t\r");
    if (first == std::string::npos || text[first] == '#') continue;
    json rec;
    try {
      rec = json::parse(text);
    } catch (const json::parse_error& e) {
      throw FormatError(where(line) + "invalid JSON: " + e.what());
    }
    if (!rec.is_object()) throw FormatError(where(line) + "record must be a JSON object");
    BenchmarkScene s;
    s.id = required_string(rec, "id", line);
    s.path_t0 = resolve(base_dir, required_string(rec, "t0", line));
    s.path_t1 = resolve(base_dir, required_string(rec, "t1", line));
    s.label = parse_scene_label(required_string(rec, "label", line));
    if (const auto it = rec.find("polygons"); it != rec.end()) {
      if (!it->is_array()) throw FormatError(where(line) + "'polygons' must be an array");
      for (const json& p : *it) s.polygons.push_back(parse_polygon(p, line));
    }
    try {
      s.validate();
    } catch (const FormatError& e) {
      throw FormatError(where(line) + e.what());
    }
    for (const BenchmarkScene& other : scenes)
      if (other.id == s.id) throw FormatError(where(line) + "duplicate scene id '" + s.id + "'");
    scenes.push_back(std::move(s));
  }
  return scenes;
}

std::vector<BenchmarkScene> load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest: " + path.string());
  std::vector<BenchmarkScene> scenes = parse_manifest(in, path.parent_path());
  for (const BenchmarkScene& s : scenes) {
    const ImageSize a = probe_image_size(s.path_t0);
    const ImageSize b = probe_image_size(s.path_t1);
    if (a.width != b.width || a.height != b.height)
      throw FormatError("scene '" + s.id + "': image sizes differ");
    for (const Polygon& p : s.polygons)
      for (const Vec2& v : p)
        if (v.x < 0.0 || v.y < 0.0 || v.x > a.width || v.y > a.height)
          throw FormatError("scene '" + s.id + "': polygon vertex outside the image bounds");
  }
  return scenes;
}

void write_manifest(const std::vector<BenchmarkScene>& scenes, const std::filesystem::path& path) {
  const std::filesystem::path base = path.parent_path().empty() ? std::filesystem::path(".") : path.parent_path();
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open manifest for writing: " + path.string());
  for (const BenchmarkScene& s : scenes) {
    s.validate();
    json rec;
    rec["id"] = s.id;
    rec["t0"] = relative_if_below(s.path_t0, base);
    rec["t1"] = relative_if_below(s.path_t1, base);
    rec["label"] = std::string(to_string(s.label));
    json polys = json::array();
    for (const Polygon& p : s.polygons) {
      json verts = json::array();
      for (const Vec2& v : p) verts.push_back({v.x, v.y});
      polys.push_back(std::move(verts));
    }
    rec["polygons"] = std::move(polys);
    out << rec.dump() << '\n';
  }
  if (!out) throw IoError("failed writing manifest: " + path.string());
}

SceneScore score_scene(const BenchmarkScene& scene, const ChangeResult& result) {
  SceneScore sc;
  sc.id = scene.id;
  sc.label = scene.label;
  sc.windows = result.windows.size();
  sc.detected = !result.windows.empty();
  const double image_area = static_cast<double>(result.width) * result.height;
  for (const ChangeWindow& w : result.windows) sc.window_area_fraction_sum += static_cast<double>(w.area) / image_area;

  if (sc.detected && !scene.polygons.empty()) {
    std::vector<std::uint8_t> truth(static_cast<std::size_t>(result.width) * result.height, 0);
    for (const Polygon& p : scene.polygons) {
      const auto m = rasterize_polygon(p, result.width, result.height);
      for (std::size_t i = 0; i < m.size(); ++i) truth[i] |= m[i];
    }
    for (const ChangeWindow& w : result.windows) {
      for (int y = w.bbox.y0; y <= w.bbox.y1 && !sc.hit; ++y)
        for (int x = w.bbox.x0; x <= w.bbox.x1 && !sc.hit; ++x)
          if (w.contains(x, y) && truth[static_cast<std::size_t>(y) * result.width + x]) sc.hit = true;
      if (sc.hit) break;
    }
  }
  sc.correct = scene.label == SceneLabel::kChange ? sc.hit : !sc.detected;
  return sc;
}

SweepRow summarize(LogProb log_epsilon, std::span<const SceneScore> scores) {
  SweepRow row;
  row.log_epsilon = log_epsilon;
  std::size_t windows = 0;
  double frac_sum = 0.0;
  for (const SceneScore& s : scores) {
    if (s.label == SceneLabel::kChange) {
      ++row.change_scenes;
      if (s.correct) ++row.correct_change;
    } else {
      ++row.no_change_scenes;
      if (s.correct) ++row.correct_no_change;
    }
    if (s.detected) ++row.detections;
    if (s.detected && s.hit) ++row.tp_detections;
    windows += s.windows;
    frac_sum += s.window_area_fraction_sum;
  }
  row.accuracy = ratio_or_nan(row.correct_change + row.correct_no_change, scores.size());
  row.tpr = ratio_or_nan(row.correct_change, row.change_scenes);
  row.tnr = ratio_or_nan(row.correct_no_change, row.no_change_scenes);
  row.precision = ratio_or_nan(row.tp_detections, row.detections);
  row.mean_window_frac = windows == 0 ? kNaN : frac_sum / static_cast<double>(windows);
  return row;
}

SweepReport sweep_prepared(std::span<const BenchmarkScene> scenes, std::span<const PreparedPair> prepared,
                           const DetectConfig& cfg, std::span<const LogProb> thresholds) {
  if (scenes.empty()) throw ConfigError("sweep needs at least one scene");
  if (thresholds.empty()) throw ConfigError("sweep needs at least one threshold");
  if (scenes.size() != prepared.size()) throw ConfigError("every scene needs exactly one prepared pair");
  std::vector<std::size_t> order(scenes.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scenes[a].id < scenes[b].id; });

  SweepReport report;
  report.variant = cfg.test_variant;
  for (const LogProb t : thresholds) {
    DetectConfig c = cfg;
    c.log_epsilon = t;
    std::vector<SceneScore> scores;
    for (const std::size_t i : order) scores.push_back(score_scene(scenes[i], evaluate(prepared[i], c)));
    report.rows.push_back(summarize(t, scores));
    report.scenes.push_back(std::move(scores));
  }
  return report;
}

SweepReport sweep_thresholds(const std::vector<BenchmarkScene>& scenes, const DetectConfig& cfg,
                             std::span<const LogProb> thresholds) {
  if (scenes.empty()) throw ConfigError("sweep needs at least one scene");
  if (thresholds.empty()) throw ConfigError("sweep needs at least one threshold");
  cfg.validate();
  std::vector<PreparedPair> prepared;
  prepared.reserve(scenes.size());
  for (const BenchmarkScene& s : scenes)
    prepared.push_back(prepare_pair(load_image(s.path_t0), load_image(s.path_t1), cfg));
  return sweep_prepared(scenes, prepared, cfg, thresholds);
}

void write_sweep_csv(const SweepReport& report, std::ostream& out) {
  out << kSweepCsvHeader << '\n';
  const auto num = [&](double v) {
    if (std::isnan(v)) {
      out << "NaN";
    } else {
      std::ostringstream s;
      s << std::setprecision(10) << v;
      out << s.str();
    }
  };
  for (const SweepRow& r : report.rows) {
    num(r.log_epsilon / std::log(10.0));
    out << ',';
    num(r.accuracy);
    out << ',';
    num(r.tpr);
    out << ',';
    num(r.tnr);
    out << ',' << r.detections << ',' << r.tp_detections << ',';
    num(r.precision);
    out << ',';
    num(r.mean_window_frac);
    out << '\n';
  }
}

}  // namespace landchange
