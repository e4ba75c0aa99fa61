#include "landchange/matcher.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "landchange/error.hpp"

namespace landchange {
namespace {

double squared_distance(std::span<const float> a, std::span<const float> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = static_cast<double>(a[i]) - static_cast<double>(b[i]);
    s += d * d;
  }
  return s;
}

struct Ranked {
  double sq = 0.0;
  std::size_t index = 0;
  bool operator<(const Ranked& o) const { return sq < o.sq || (sq == o.sq && index < o.index); }
};

std::vector<std::optional<MatchCandidate>> select_direction(const FeatureSet& query, const FeatureSet& target,
                                                            const MatchConfig& cfg, double radius,
                                                            std::size_t* rank1_passes) {
  const CandidateLists lists = knn_candidates(query, target, cfg.k);
  if (rank1_passes != nullptr) {
    *rank1_passes = 0;
    for (std::size_t q = 0; q < lists.size(); ++q) {
      if (!lists[q].empty() && pixel_distance(query.keypoints[q], target.keypoints[lists[q].front().index]) <= radius)
        ++*rank1_passes;
    }
  }
  return proximity_filter(lists, query.keypoints, target.keypoints, radius);
}

}  // namespace

void MatchConfig::validate() const {
  if (k < 1) throw ConfigError("k must be at least 1");
  if (!(proximity_radius > 0.0)) throw ConfigError("proximity radius must be positive");
}

double pixel_distance(const Keypoint& a, const Keypoint& b) { return std::hypot(a.x - b.x, a.y - b.y); }

CandidateLists knn_candidates(const FeatureSet& query, const FeatureSet& target, int k) {
  if (k < 1) throw ConfigError("k must be at least 1");
  query.validate();
  target.validate();
  if (query.descriptor_length != target.descriptor_length)
    throw ConfigError("descriptor length mismatch: " + std::to_string(query.descriptor_length) + " vs " +
                      std::to_string(target.descriptor_length));

  const std::size_t keep = std::min<std::size_t>(static_cast<std::size_t>(k), target.size());
  CandidateLists out(query.size());
  std::vector<Ranked> best;
  best.reserve(keep + 1);
  for (std::size_t q = 0; q < query.size(); ++q) {
    const auto qd = query.descriptor(q);
    best.clear();
    // Bounded insertion list: `best` stays sorted and holds at most `keep` entries.
    for (std::size_t t = 0; t < target.size(); ++t) {
      const Ranked r{squared_distance(qd, target.descriptor(t)), t};
      if (best.size() == keep && !(r < best.back())) continue;
      auto pos = std::upper_bound(best.begin(), best.end(), r);
      best.insert(pos, r);
      if (best.size() > keep) best.pop_back();
    }
    auto& list = out[q];
    list.reserve(best.size());
    for (const Ranked& r : best) list.push_back({r.index, std::sqrt(r.sq)});
  }
  return out;
}

std::vector<std::optional<MatchCandidate>> proximity_filter(const CandidateLists& candidates,
                                                            std::span<const Keypoint> query_kps,
                                                            std::span<const Keypoint> target_kps, double radius) {
  if (candidates.size() != query_kps.size()) throw ConfigError("candidate lists do not match the query keypoints");
  std::vector<std::optional<MatchCandidate>> out(candidates.size());
  for (std::size_t q = 0; q < candidates.size(); ++q) {
    for (const MatchCandidate& c : candidates[q]) {
      if (c.index >= target_kps.size()) throw ConfigError("candidate index outside the target keypoints");
      if (pixel_distance(query_kps[q], target_kps[c.index]) <= radius) {
        out[q] = c;
        break;
      }
    }
  }
  return out;
}

MatchSet symmetric_match(const FeatureSet& fs1, const FeatureSet& fs2, const MatchConfig& cfg) {
  cfg.validate();
  MatchSet ms;
  ms.total_first = fs1.size();
  ms.total_second = fs2.size();
  ms.radius_used = cfg.dynamic_offset ? estimate_offset_cutoff(fs1, fs2) : cfg.proximity_radius;

  const auto forward = select_direction(fs1, fs2, cfg, ms.radius_used, &ms.rank1_passes);
  const auto backward = select_direction(fs2, fs1, cfg, ms.radius_used, nullptr);
  for (std::size_t i = 0; i < forward.size(); ++i) {
    if (!forward[i]) continue;
    ++ms.forward_proposals;
    const std::size_t j = forward[i]->index;
    if (backward[j] && backward[j]->index == i) {
      ms.pairs.push_back({i, j, forward[i]->distance, pixel_distance(fs1.keypoints[i], fs2.keypoints[j])});
    } else {
      ++ms.cross_check_rejections;
    }
  }
  return ms;
}

double match_rate(const MatchSet& ms) {
  const std::size_t total = ms.total_first + ms.total_second;
  if (total == 0) throw ConfigError("match rate is undefined when both feature sets are empty");
  return 2.0 * static_cast<double>(ms.matched()) / static_cast<double>(total);
}

double estimate_offset_cutoff(const FeatureSet& fs1, const FeatureSet& fs2) {
  constexpr int kBins = 64;
  constexpr double kPeakFraction = 0.1;
  constexpr double kMinCutoff = 2.0;
  constexpr double kMaxCutoff = 16.0;

  // Both directions are pooled so the cutoff does not depend on pair order.
  std::array<std::size_t, kBins> hist{};
  std::size_t proposals = 0;
  const auto accumulate = [&](const FeatureSet& query, const FeatureSet& target) {
    const CandidateLists nearest = knn_candidates(query, target, 1);
    for (std::size_t q = 0; q < nearest.size(); ++q) {
      if (nearest[q].empty()) continue;
      ++proposals;
      const double offset = pixel_distance(query.keypoints[q], target.keypoints[nearest[q].front().index]);
      const auto bin = static_cast<std::size_t>(std::floor(offset));
      if (bin < hist.size()) ++hist[bin];
    }
  };
  accumulate(fs1, fs2);
  accumulate(fs2, fs1);
  if (proposals < kMinOffsetProposals)
    throw ConfigError("offset estimation needs at least " + std::to_string(kMinOffsetProposals) +
                      " descriptor proposals, got " + std::to_string(proposals));

  const auto peak_it = std::max_element(hist.begin(), hist.end());
  const auto peak = static_cast<std::size_t>(peak_it - hist.begin());
  const double floor_count = kPeakFraction * static_cast<double>(*peak_it);
  double cutoff = kMaxCutoff;
  for (std::size_t b = peak + 1; b < hist.size(); ++b) {
    if (static_cast<double>(hist[b]) < floor_count) {
      cutoff = static_cast<double>(b);
      break;
    }
  }
  return std::clamp(cutoff, kMinCutoff, kMaxCutoff);
}

std::vector<bool> matched_mask(const MatchSet& ms, MatchSide side) {
  std::vector<bool> mask(side == MatchSide::kFirst ? ms.total_first : ms.total_second, false);
  for (const MatchPair& p : ms.pairs) mask[side == MatchSide::kFirst ? p.first : p.second] = true;
  return mask;
}

}  // namespace landchange
