// Command-line front end: detect | features | match-stats | sweep | bench | synth.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "landchange/benchmark.hpp"
#include "landchange/change_detect.hpp"
#include "landchange/error.hpp"
#include "landchange/feature_io.hpp"
#include "landchange/report.hpp"
#include "landchange/synthgen.hpp"

namespace fs = std::filesystem;
using namespace landchange;

namespace {

enum ExitCode { kOk = 0, kUsage = 1, kIo = 2, kInternal = 3 };

const double kLn10 = std::log(10.0);

// Options shared by every subcommand that runs the pipeline. Defaults come
// from DetectConfig.
struct RunConfig {
  DetectConfig detect;
  double log10_epsilon = -4.0;
  std::string variant = "EQ3";

  void add_to(CLI::App* app, bool with_epsilon) {
    app->add_option("--kaze-threshold", detect.detector.sensitivity_threshold, "Detector response threshold")
        ->capture_default_str();
    app->add_option("--octaves", detect.detector.octaves, "Scale-space octaves")->capture_default_str();
    app->add_option("--sublevels", detect.detector.sublevels, "Sublevels per octave")->capture_default_str();
    app->add_option("-k,--k", detect.match.k, "Nearest descriptors examined per keypoint")->capture_default_str();
    app->add_option("--proximity", detect.match.proximity_radius, "Match proximity radius (px)")
        ->capture_default_str();
    app->add_flag("--dynamic-offset", detect.match.dynamic_offset,
                  "Estimate the proximity radius from the offset histogram");
    app->add_option("--variant", variant, "Neighborhood test: EQ1, EQ2 or EQ3")->capture_default_str();
    app->add_option("--radius", detect.neighborhood_radius, "Neighborhood radius (px)")->capture_default_str();
    app->add_option("--window", detect.window_side, "Aggregation window side (px)")->capture_default_str();
    app->add_option("--fraction", detect.threshold_fraction, "Window threshold as a fraction of mean keypoint count")
        ->capture_default_str();
    if (with_epsilon)
      app->add_option("--log-eps", log10_epsilon, "log10 of the probability threshold")->capture_default_str();
  }

  DetectConfig resolve() const {
    DetectConfig c = detect;
    c.test_variant = parse_test_variant(variant);
    c.log_epsilon = log10_epsilon * kLn10;
    c.validate();
    return c;
  }
};

void require_file(const fs::path& p) {
  if (!fs::is_regular_file(p)) throw IoError("no such file: " + p.string());
}

void ensure_dir(const fs::path& p) {
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec) throw IoError("cannot create directory " + p.string() + ": " + ec.message());
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream out(p, std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + p.string());
  return out;
}

std::vector<LogProb> parse_thresholds(const std::string& list) {
  std::vector<LogProb> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      throw ConfigError("bad threshold '" + item + "'");
    }
    if (used != item.size()) throw ConfigError("bad threshold '" + item + "'");
    out.push_back(v * kLn10);
  }
  if (out.empty()) throw ConfigError("threshold list is empty");
  return out;
}

// ---- detect ---------------------------------------------------------------

struct DetectArgs {
  RunConfig run;
  std::string image1, image2;
  std::string features1, features2;
  std::string out_dir = ".";
  std::string prefix = "change";
};

int cmd_detect(const DetectArgs& a) {
  const DetectConfig cfg = a.run.resolve();
  require_file(a.image1);
  require_file(a.image2);
  if (a.features1.empty() != a.features2.empty()) throw ConfigError("--features1 and --features2 go together");
  if (!a.features1.empty()) {
    require_file(a.features1);
    require_file(a.features2);
  }
  ensure_dir(a.out_dir);

  const Raster img1 = load_image(a.image1);
  const Raster img2 = load_image(a.image2);
  const PreparedPair pp = a.features1.empty()
                              ? prepare_pair(img1, img2, cfg)
                              : prepare_from_features(read_features(a.features1), read_features(a.features2), cfg);
  const ChangeResult result = evaluate(pp, cfg);

  const fs::path dir(a.out_dir);
  save_png(render_overlay(img1, result), dir / (a.prefix + "_overlay.png"));
  save_png(normalized_score_map(result), dir / (a.prefix + "_score.png"));
  {
    std::ofstream csv = open_out(dir / (a.prefix + "_score.csv"));
    write_score_csv(result, csv);
  }
  const std::string summary = result_summary_json(result, cfg);
  {
    std::ofstream js = open_out(dir / (a.prefix + "_summary.json"));
    js << summary << '\n';
  }
  std::cout << summary << '\n';
  if (result.windows.empty()) std::cerr << "no change\n";
  return kOk;
}

// ---- features -------------------------------------------------------------

struct FeaturesArgs {
  RunConfig run;
  std::string image;
  std::string output;
  std::string info;
};

int cmd_features(const FeaturesArgs& a) {
  if (!a.info.empty()) {
    require_file(a.info);
    const FeatureSet fs = read_features(a.info);
    std::cout << "detector=" << fs.detector_name << " width=" << fs.width << " height=" << fs.height
              << " keypoints=" << fs.size() << " descriptor_length=" << fs.descriptor_length << '\n';
    return kOk;
  }
  if (a.image.empty() || a.output.empty()) throw ConfigError("features needs an image and -o/--output");
  const DetectConfig cfg = a.run.resolve();
  require_file(a.image);
  const FeatureSet fs = extract_features(load_image(a.image), cfg.detector);
  write_features(fs, a.output);
  std::cout << "wrote " << fs.size() << " keypoints to " << a.output << '\n';
  return kOk;
}

// ---- match-stats ----------------------------------------------------------

struct MatchStatsArgs {
  RunConfig run;
  std::vector<std::string> pair;
  std::vector<std::string> features;
  std::string manifest;
  std::string output;
};

struct PairStats {
  std::string id;
  std::size_t d1, d2, m;
  double rate;
};

PairStats stats_for(const std::string& id, const FeatureSet& f1, const FeatureSet& f2, const MatchConfig& mc) {
  const MatchSet ms = symmetric_match(f1, f2, mc);
  return {id, ms.total_first, ms.total_second, ms.matched(), match_rate(ms)};
}

int cmd_match_stats(const MatchStatsArgs& a) {
  const DetectConfig cfg = a.run.resolve();
  const int sources = static_cast<int>(!a.pair.empty()) + static_cast<int>(!a.features.empty()) +
                      static_cast<int>(!a.manifest.empty());
  if (sources != 1) throw ConfigError("match-stats needs exactly one of --pair, --features or --manifest");

  std::vector<PairStats> rows;
  if (!a.pair.empty()) {
    for (const auto& p : a.pair) require_file(p);
    rows.push_back(stats_for("pair", extract_features(load_image(a.pair[0]), cfg.detector),
                             extract_features(load_image(a.pair[1]), cfg.detector), cfg.match));
  } else if (!a.features.empty()) {
    for (const auto& p : a.features) require_file(p);
    rows.push_back(stats_for("features", read_features(a.features[0]), read_features(a.features[1]), cfg.match));
  } else {
    require_file(a.manifest);
    for (const BenchmarkScene& s : load_manifest(a.manifest))
      rows.push_back(stats_for(s.id, extract_features(load_image(s.path_t0), cfg.detector),
                               extract_features(load_image(s.path_t1), cfg.detector), cfg.match));
  }

  std::ofstream file;
  if (!a.output.empty()) file = open_out(a.output);
  std::ostream& out = a.output.empty() ? std::cout : file;
  out << "id,D1,D2,M,match_rate\n" << std::setprecision(10);
  double sum = 0.0;
  for (const PairStats& r : rows) {
    out << r.id << ',' << r.d1 << ',' << r.d2 << ',' << r.m << ',' << r.rate << '\n';
    sum += r.rate;
  }
  out << "mean,,,," << sum / static_cast<double>(rows.size()) << '\n';
  return kOk;
}

// ---- sweep / bench --------------------------------------------------------

struct SweepArgs {
  RunConfig run;
  std::string manifest;
  std::string thresholds;
  std::string output;
  std::string per_scene;
};

int run_sweep(const SweepArgs& a, const std::string& default_thresholds, bool print_summary) {
  const DetectConfig cfg = a.run.resolve();
  const std::vector<LogProb> thresholds = parse_thresholds(a.thresholds.empty() ? default_thresholds : a.thresholds);
  require_file(a.manifest);
  const std::vector<BenchmarkScene> scenes = load_manifest(a.manifest);
  if (scenes.empty()) throw ConfigError("manifest lists no scenes");
  const SweepReport report = sweep_thresholds(scenes, cfg, thresholds);

  if (a.output.empty()) {
    write_sweep_csv(report, std::cout);
  } else {
    std::ofstream out = open_out(a.output);
    write_sweep_csv(report, out);
  }
  if (!a.per_scene.empty()) {
    std::ofstream out = open_out(a.per_scene);
    out << "log_epsilon,id,label,detected,hit,correct,windows\n" << std::setprecision(10);
    for (std::size_t r = 0; r < report.rows.size(); ++r)
      for (const SceneScore& s : report.scenes[r])
        out << report.rows[r].log_epsilon / kLn10 << ',' << s.id << ',' << to_string(s.label) << ',' << s.detected
            << ',' << s.hit << ',' << s.correct << ',' << s.windows << '\n';
  }
  if (print_summary) {
    std::size_t best = 0;
    for (std::size_t r = 1; r < report.rows.size(); ++r)
      if (report.rows[r].accuracy > report.rows[best].accuracy) best = r;
    const SweepRow& b = report.rows[best];
    std::cerr << "scenes=" << scenes.size() << " variant=" << to_string(report.variant)
              << " peak_accuracy=" << b.accuracy << " at log10_eps=" << b.log_epsilon / kLn10 << '\n';
  }
  return kOk;
}

// ---- synth ----------------------------------------------------------------

struct SynthArgs {
  std::uint64_t seed = kDefaultSuiteSeed;
  std::string out_dir;
  int corpus = 0;
};

int cmd_synth(const SynthArgs& a) {
  if (a.out_dir.empty()) throw ConfigError("synth needs --out-dir");
  const auto suite = a.corpus > 0 ? gen_no_change_corpus(a.seed, a.corpus) : gen_acceptance_suite(a.seed);
  const fs::path manifest = write_suite(suite, a.out_dir);
  std::cout << "wrote " << suite.size() << " scenes, manifest " << manifest.string() << '\n';
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Change detection between co-registered image pairs from unmatched local features"};
  app.require_subcommand(1);

  DetectArgs detect;
  auto* c_detect = app.add_subcommand("detect", "Detect change windows on an image pair");
  c_detect->add_option("image1", detect.image1, "Earlier image")->required();
  c_detect->add_option("image2", detect.image2, "Later image")->required();
  c_detect->add_option("--features1", detect.features1, "Imported FEATSET1 file for image1");
  c_detect->add_option("--features2", detect.features2, "Imported FEATSET1 file for image2");
  c_detect->add_option("-o,--out-dir", detect.out_dir, "Output directory")->capture_default_str();
  c_detect->add_option("--prefix", detect.prefix, "Output file prefix")->capture_default_str();
  detect.run.add_to(c_detect, true);

  FeaturesArgs features;
  auto* c_features = app.add_subcommand("features", "Extract features to a FEATSET1 file or inspect one");
  c_features->add_option("image", features.image, "Input image");
  c_features->add_option("-o,--output", features.output, "FEATSET1 output path");
  c_features->add_option("--info", features.info, "Print the header of a FEATSET1 file");
  features.run.add_to(c_features, false);

  MatchStatsArgs mstats;
  auto* c_mstats = app.add_subcommand("match-stats", "Per-pair keypoint and match counts");
  c_mstats->add_option("--pair", mstats.pair, "Two image paths")->expected(2);
  c_mstats->add_option("--features", mstats.features, "Two FEATSET1 paths")->expected(2);
  c_mstats->add_option("--manifest", mstats.manifest, "Scene manifest (JSON Lines)");
  c_mstats->add_option("--out", mstats.output, "CSV output path (default stdout)");
  mstats.run.add_to(c_mstats, false);

  SweepArgs sweep;
  auto* c_sweep = app.add_subcommand("sweep", "Threshold sweep over a manifest, CSV output");
  c_sweep->add_option("manifest", sweep.manifest, "Scene manifest (JSON Lines)")->required();
  c_sweep->add_option("--log-eps", sweep.thresholds, "Comma-separated log10 thresholds")
      ->default_str("-2,-3,...,-10");
  c_sweep->add_option("--out", sweep.output, "CSV output path (default stdout)");
  c_sweep->add_option("--per-scene", sweep.per_scene, "Per-scene outcome CSV");
  sweep.run.add_to(c_sweep, false);

  SweepArgs bench;
  auto* c_bench = app.add_subcommand("bench", "Benchmark run over the default threshold range with a summary");
  c_bench->add_option("manifest", bench.manifest, "Scene manifest (JSON Lines)")->required();
  c_bench->add_option("--log-eps", bench.thresholds, "Comma-separated log10 thresholds")->default_str("-4,...,-8");
  c_bench->add_option("--out", bench.output, "CSV output path (default stdout)");
  c_bench->add_option("--per-scene", bench.per_scene, "Per-scene outcome CSV");
  bench.run.add_to(c_bench, false);

  SynthArgs synth;
  auto* c_synth = app.add_subcommand("synth", "Write the synthetic acceptance suite (images + manifest)");
  c_synth->add_option("--seed", synth.seed, "Root seed")->capture_default_str();
  c_synth->add_option("-o,--out-dir", synth.out_dir, "Output directory")->required();
  c_synth->add_option("--corpus", synth.corpus, "Write N unchanged scenes instead of the acceptance suite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*c_detect) return cmd_detect(detect);
    if (*c_features) return cmd_features(features);
    if (*c_mstats) return cmd_match_stats(mstats);
    if (*c_sweep) return run_sweep(sweep, "-2,-3,-4,-5,-6,-7,-8,-9,-10", false);
    if (*c_bench) return run_sweep(bench, "-4,-5,-6,-7,-8", true);
    if (*c_synth) return cmd_synth(synth);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIo;
  } catch (const InvariantError& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kInternal;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kInternal;
  }
  return kUsage;
}
