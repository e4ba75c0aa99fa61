#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "landchange/feature_io.hpp"
#include "landchange/synthgen.hpp"
#include "test_util.hpp"

using namespace landchange;

namespace {

int run(const std::string& args, const std::filesystem::path& log = {}) {
  std::string cmd = std::string(LANDCHANGE_CLI_PATH) + " " + args;
  cmd += log.empty() ? " > /dev/null 2>&1" : " > '" + log.string() + "' 2>/dev/null";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string q(const std::filesystem::path& p) { return "'" + p.string() + "'"; }

}  // namespace

TEST(Cli, ExitCodes) {
  testutil::TempDir dir;
  EXPECT_EQ(run("--help"), 0);
  EXPECT_EQ(run("detect"), 1);
  EXPECT_EQ(run("no-such-command"), 1);
  EXPECT_EQ(run("detect /nonexistent/a.png /nonexistent/b.png -o " + q(dir.path())), 2);
  EXPECT_EQ(run("detect a.png b.png --radius -1"), 1);
  EXPECT_EQ(run("detect a.png b.png --variant EQ9"), 1);
  std::ofstream(dir / "junk.png") << "not an image";
  EXPECT_EQ(run("features " + q(dir / "junk.png") + " -o " + q(dir / "f.bin")), 2);
}

TEST(Cli, DetectIdenticalPair) {
  testutil::TempDir dir;
  SceneSpec s = suburban_preset(21);
  s.width = 256;
  s.height = 200;
  save_png(gen_scene_pair(s).t0, dir / "a.png");
  ASSERT_EQ(run("detect " + q(dir / "a.png") + " " + q(dir / "a.png") + " -o " + q(dir.path()) + " --prefix r"), 0);
  const auto j = nlohmann::json::parse(slurp(dir / "r_summary.json"));
  EXPECT_DOUBLE_EQ(j["match_rate"].get<double>(), 1.0);
  EXPECT_TRUE(j["windows"].empty());
  EXPECT_FALSE(j["change_detected"].get<bool>());
  EXPECT_TRUE(std::filesystem::exists(dir / "r_overlay.png"));
  EXPECT_TRUE(std::filesystem::exists(dir / "r_score.png"));
  EXPECT_TRUE(std::filesystem::exists(dir / "r_score.csv"));
}

TEST(Cli, CorpusMatchStatsReproducible) {
  testutil::TempDir dir;
  ASSERT_EQ(run("synth --corpus 2 --seed 5 -o " + q(dir / "c")), 0);
  const auto m = dir / "c" / "manifest.jsonl";
  ASSERT_EQ(run("match-stats --manifest " + q(m) + " --out " + q(dir / "s1.csv")), 0);
  ASSERT_EQ(run("match-stats --manifest " + q(m) + " --out " + q(dir / "s2.csv")), 0);
  const std::string a = slurp(dir / "s1.csv");
  EXPECT_EQ(a, slurp(dir / "s2.csv"));
  EXPECT_EQ(a.rfind("id,D1,D2,M,match_rate\n", 0), 0u);
  EXPECT_NE(a.find("\ncorpus_01,"), std::string::npos);
  EXPECT_NE(a.find("\nmean,,,,"), std::string::npos);

  // A sweep at one threshold agrees with detect on each scene.
  ASSERT_EQ(run("sweep " + q(m) + " --log-eps -4 --per-scene " + q(dir / "per.csv") + " --out " + q(dir / "sw.csv")), 0);
  const std::string sweep = slurp(dir / "sw.csv");
  EXPECT_EQ(sweep.rfind("log_epsilon,accuracy", 0), 0u);
  int detected = 0;
  for (const char* id : {"corpus_00", "corpus_01"}) {
    const auto t0 = dir / "c" / (std::string(id) + "_t0.png"), t1 = dir / "c" / (std::string(id) + "_t1.png");
    ASSERT_EQ(run("detect " + q(t0) + " " + q(t1) + " --log-eps -4 -o " + q(dir.path()) + " --prefix " + id), 0);
    detected += nlohmann::json::parse(slurp(dir / (std::string(id) + "_summary.json")))["change_detected"].get<bool>();
  }
  std::istringstream rows(sweep);
  std::string header, row;
  std::getline(rows, header);
  std::getline(rows, row);
  std::vector<std::string> cells;
  std::stringstream cs(row);
  for (std::string c; std::getline(cs, c, ',');) cells.push_back(c);
  ASSERT_GE(cells.size(), 5u);
  EXPECT_EQ(cells[0], "-4");
  EXPECT_EQ(std::stoi(cells[4]), detected);
  EXPECT_DOUBLE_EQ(std::stod(cells[1]), (2 - detected) / 2.0);
}

TEST(Cli, ImportedFeaturesOfOtherLength) {
  testutil::TempDir dir;
  FeatureSet fs;
  fs.width = 100;
  fs.height = 100;
  fs.detector_name = "external";
  fs.descriptor_length = 128;
  SynthRng rng(8);
  for (int i = 0; i < 40; ++i) {
    fs.keypoints.push_back({rng.uniform(0, 100), rng.uniform(0, 100), 2.0, 0.0, 1.0});
    for (int c = 0; c < 128; ++c) fs.descriptors.push_back(static_cast<float>(rng.uniform()));
  }
  write_features(fs, dir / "a.feat");
  ASSERT_EQ(run("match-stats --features " + q(dir / "a.feat") + " " + q(dir / "a.feat"), dir / "out.csv"), 0);
  const std::string out = slurp(dir / "out.csv");
  EXPECT_NE(out.find(",40,40,40,1"), std::string::npos) << out;
  ASSERT_EQ(run("features --info " + q(dir / "a.feat"), dir / "info.txt"), 0);
  EXPECT_NE(slurp(dir / "info.txt").find("detector=external"), std::string::npos);
}
