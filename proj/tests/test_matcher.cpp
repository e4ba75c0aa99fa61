#include <gtest/gtest.h>

#include <set>

#include "landchange/error.hpp"
#include "landchange/matcher.hpp"
#include "landchange/synthgen.hpp"
#include "oracles.hpp"

using namespace landchange;

namespace {

FeatureSet make_set(const std::vector<Keypoint>& kps, const std::vector<std::vector<float>>& desc) {
  FeatureSet fs;
  fs.width = 512;
  fs.height = 400;
  fs.keypoints = kps;
  fs.descriptor_length = desc.empty() ? 4 : desc[0].size();
  for (const auto& d : desc) fs.descriptors.insert(fs.descriptors.end(), d.begin(), d.end());
  return fs;
}

FeatureSet random_set(std::size_t n, std::size_t length, SynthRng& rng, bool quantized = false) {
  FeatureSet fs;
  fs.width = 512;
  fs.height = 400;
  fs.descriptor_length = length;
  for (std::size_t i = 0; i < n; ++i) {
    fs.keypoints.push_back({rng.uniform(0, 512), rng.uniform(0, 400), 2.0, 0.0, 1.0});
    for (std::size_t c = 0; c < length; ++c)
      fs.descriptors.push_back(quantized ? static_cast<float>(rng.uniform_int(0, 2)) : static_cast<float>(rng.uniform()));
  }
  return fs;
}

Keypoint at(double x, double y) { return {x, y, 2.0, 0.0, 1.0}; }

}  // namespace

TEST(Knn, EqualsFullSortOracle) {
  SynthRng rng(1);
  for (int trial = 0; trial < 40; ++trial) {
    const bool ties = trial % 4 == 0;
    const FeatureSet q = random_set(static_cast<std::size_t>(rng.uniform_int(1, 40)), 8, rng, ties);
    const FeatureSet t = random_set(static_cast<std::size_t>(rng.uniform_int(1, 40)), 8, rng, ties);
    const int k = rng.uniform_int(1, 8);
    EXPECT_EQ(knn_candidates(q, t, k), oracle::knn_full_sort(q, t, k)) << "trial " << trial;
  }
}

TEST(Knn, TiesBreakTowardLowerIndex) {
  const FeatureSet q = make_set({at(0, 0)}, {{1, 0, 0, 0}});
  const FeatureSet t = make_set({at(0, 0), at(1, 1), at(2, 2), at(3, 3)},
                                {{0, 0, 0, 9}, {1, 0, 0, 1}, {0, 0, 0, 7}, {1, 0, 0, 1}});
  const auto lists = knn_candidates(q, t, 3);
  ASSERT_EQ(lists[0].size(), 3u);
  EXPECT_EQ(lists[0][0].index, 1u);
  EXPECT_EQ(lists[0][1].index, 3u);
  EXPECT_DOUBLE_EQ(lists[0][0].distance, 1.0);
  EXPECT_EQ(lists[0][2].index, 2u);
}

TEST(Knn, KLargerThanTarget) {
  SynthRng rng(2);
  const FeatureSet q = random_set(3, 4, rng);
  const FeatureSet t = random_set(2, 4, rng);
  for (const auto& l : knn_candidates(q, t, 5)) EXPECT_EQ(l.size(), 2u);
  EXPECT_THROW(knn_candidates(q, t, 0), ConfigError);
}

TEST(Knn, DescriptorLengthMismatch) {
  SynthRng rng(3);
  EXPECT_THROW(knn_candidates(random_set(2, 4, rng), random_set(2, 8, rng), 1), ConfigError);
}

TEST(Proximity, RadiusIsInclusive) {
  const std::vector<Keypoint> q = {at(0, 0)};
  const std::vector<Keypoint> t = {at(3, 4), at(3, 4.0001)};
  const CandidateLists lists = {{{1, 0.1}, {0, 0.2}}};
  const auto sel = proximity_filter(lists, q, t, 5.0);
  ASSERT_TRUE(sel[0].has_value());
  EXPECT_EQ(sel[0]->index, 0u);
  const auto none = proximity_filter(lists, q, t, 4.99);
  EXPECT_FALSE(none[0].has_value());
}

TEST(SymmetricMatch, IdenticalSetsMatchCompletely) {
  SynthRng rng(4);
  const FeatureSet fs = random_set(80, 16, rng);
  const MatchSet ms = symmetric_match(fs, fs);
  EXPECT_EQ(ms.matched(), 80u);
  EXPECT_DOUBLE_EQ(match_rate(ms), 1.0);
  for (std::size_t i = 0; i < ms.pairs.size(); ++i) {
    EXPECT_EQ(ms.pairs[i].first, i);
    EXPECT_EQ(ms.pairs[i].second, i);
    EXPECT_EQ(ms.pairs[i].pixel_offset, 0.0);
  }
}

TEST(SymmetricMatch, PairsAreMutualSelections) {
  SynthRng rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    FeatureSet a = random_set(120, 8, rng);
    FeatureSet b = random_set(100, 8, rng);
    MatchConfig cfg;
    cfg.proximity_radius = 60.0;
    const MatchSet ms = symmetric_match(a, b, cfg);
    const auto fwd = proximity_filter(knn_candidates(a, b, cfg.k), a.keypoints, b.keypoints, cfg.proximity_radius);
    const auto bwd = proximity_filter(knn_candidates(b, a, cfg.k), b.keypoints, a.keypoints, cfg.proximity_radius);
    std::size_t mutual = 0;
    for (std::size_t i = 0; i < fwd.size(); ++i)
      if (fwd[i] && bwd[fwd[i]->index] && bwd[fwd[i]->index]->index == i) ++mutual;
    EXPECT_EQ(ms.matched(), mutual);
    EXPECT_LE(ms.matched(), std::min(a.size(), b.size()));
    std::set<std::size_t> seconds;
    for (const MatchPair& p : ms.pairs) {
      EXPECT_LE(p.pixel_offset, cfg.proximity_radius);
      EXPECT_TRUE(seconds.insert(p.second).second);
    }
    EXPECT_EQ(ms.forward_proposals, ms.matched() + ms.cross_check_rejections);
  }
}

TEST(SymmetricMatch, LargerKNeverLosesPairs) {
  SynthRng rng(6);
  for (int trial = 0; trial < 10; ++trial) {
    const FeatureSet a = random_set(150, 8, rng);
    const FeatureSet b = random_set(150, 8, rng);
    MatchConfig k1;
    k1.k = 1;
    k1.proximity_radius = 40.0;
    MatchConfig k5 = k1;
    k5.k = 5;
    const MatchSet m1 = symmetric_match(a, b, k1);
    const MatchSet m5 = symmetric_match(a, b, k5);
    std::set<std::pair<std::size_t, std::size_t>> s5;
    for (const MatchPair& p : m5.pairs) s5.insert({p.first, p.second});
    for (const MatchPair& p : m1.pairs) EXPECT_TRUE(s5.count({p.first, p.second}));
  }
}

TEST(SymmetricMatch, DeeperSearchRecoversDisplacedNearest) {
  // The nearest descriptor of a[0] is far away in pixels; the second nearest
  // is next to it.
  const FeatureSet a = make_set({at(10, 10)}, {{0, 0, 0, 0}});
  const FeatureSet b = make_set({at(200, 200), at(11, 10)}, {{0.1f, 0, 0, 0}, {0.2f, 0, 0, 0}});
  MatchConfig k1;
  k1.k = 1;
  EXPECT_EQ(symmetric_match(a, b, k1).matched(), 0u);
  const MatchSet m5 = symmetric_match(a, b);
  ASSERT_EQ(m5.matched(), 1u);
  EXPECT_EQ(m5.pairs[0].second, 1u);
  EXPECT_EQ(m5.rank1_passes, 0u);
}

TEST(SymmetricMatch, CrossCheckRejectsSharedTarget) {
  const FeatureSet a = make_set({at(10, 10), at(12, 10)}, {{0, 0, 0, 0}, {0.05f, 0, 0, 0}});
  const FeatureSet b = make_set({at(11, 10)}, {{0.01f, 0, 0, 0}});
  const MatchSet ms = symmetric_match(a, b);
  ASSERT_EQ(ms.matched(), 1u);
  EXPECT_EQ(ms.pairs[0].first, 0u);
  EXPECT_EQ(ms.cross_check_rejections, 1u);
  EXPECT_EQ(matched_mask(ms, MatchSide::kFirst), (std::vector<bool>{true, false}));
  EXPECT_EQ(matched_mask(ms, MatchSide::kSecond), (std::vector<bool>{true}));
  EXPECT_DOUBLE_EQ(match_rate(ms), 2.0 / 3.0);
}

TEST(SymmetricMatch, ConfigValidation) {
  MatchConfig c;
  c.k = 0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  c.proximity_radius = 0.0;
  EXPECT_THROW(c.validate(), ConfigError);
  EXPECT_THROW(match_rate(MatchSet{}), ConfigError);
}

TEST(OffsetCutoff, FindsEdgeOfOffsetPeak) {
  SynthRng rng(7);
  FeatureSet a = random_set(200, 16, rng);
  FeatureSet b = a;
  // Same descriptors, displaced by 5.5 px (bin 5), so bin 6 holds nothing.
  for (Keypoint& k : b.keypoints) k.x += 5.5;
  EXPECT_DOUBLE_EQ(estimate_offset_cutoff(a, b), 6.0);
  for (Keypoint& k : b.keypoints) k.x += 40.0;
  EXPECT_DOUBLE_EQ(estimate_offset_cutoff(a, b), 16.0);  // clamped
  MatchConfig dyn;
  dyn.dynamic_offset = true;
  EXPECT_DOUBLE_EQ(symmetric_match(a, b, dyn).radius_used, 16.0);
}

TEST(OffsetCutoff, NeedsEnoughProposals) {
  SynthRng rng(8);
  const FeatureSet a = random_set(20, 8, rng);
  EXPECT_THROW(estimate_offset_cutoff(a, a), ConfigError);
}
