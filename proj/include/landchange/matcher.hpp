#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "landchange/feature_io.hpp"

namespace landchange {

struct MatchConfig {
  int k = 5;
  double proximity_radius = 4.0;  // pixels; offsets strictly greater than this fail
  bool dynamic_offset = false;    // replace the radius by estimate_offset_cutoff()

  void validate() const;
};

struct MatchCandidate {
  std::size_t index = 0;  // into the target set
  double distance = 0.0;  // Euclidean descriptor distance

  bool operator==(const MatchCandidate&) const = default;
};

using CandidateLists = std::vector<std::vector<MatchCandidate>>;

struct MatchPair {
  std::size_t first = 0;   // index into image 1 keypoints
  std::size_t second = 0;  // index into image 2 keypoints
  double descriptor_distance = 0.0;
  double pixel_offset = 0.0;

  bool operator==(const MatchPair&) const = default;
};

struct MatchSet {
  std::vector<MatchPair> pairs;  // sorted by `first`
  std::size_t total_first = 0;   // D1
  std::size_t total_second = 0;  // D2
  double radius_used = 0.0;

  // Image 1 keypoints whose forward search produced a proximity-passing
  // proposal, and how many of those the cross-check rejected.
  std::size_t forward_proposals = 0;
  std::size_t cross_check_rejections = 0;
  // Image 1 keypoints whose nearest descriptor already passed the proximity test.
  std::size_t rank1_passes = 0;

  std::size_t matched() const { return pairs.size(); }  // M
};

/// Exact k nearest neighbours of every query descriptor among the target
/// descriptors, ascending by distance, ties broken by lower target index.
CandidateLists knn_candidates(const FeatureSet& query, const FeatureSet& target, int k);

/// Best-ranked candidate per query whose pixel offset does not exceed `radius`.
std::vector<std::optional<MatchCandidate>> proximity_filter(const CandidateLists& candidates,
                                                            std::span<const Keypoint> query_kps,
                                                            std::span<const Keypoint> target_kps, double radius);

/// kNN search plus proximity test in both directions, keeping mutually
/// selected pairs.
MatchSet symmetric_match(const FeatureSet& fs1, const FeatureSet& fs2, const MatchConfig& cfg = {});

/// 2M / (D1 + D2).
double match_rate(const MatchSet& ms);

/// Proximity cutoff derived from the histogram of nearest-descriptor pixel
/// offsets (both directions pooled): the first 1-px bin edge past the modal bin whose count drops below
/// 10% of the peak, clamped to [2, 16] px. Needs at least 50 proposals.
double estimate_offset_cutoff(const FeatureSet& fs1, const FeatureSet& fs2);

inline constexpr std::size_t kMinOffsetProposals = 50;

enum class MatchSide { kFirst, kSecond };

/// Per-keypoint matched flags of one side of a match set.
std::vector<bool> matched_mask(const MatchSet& ms, MatchSide side);

double pixel_distance(const Keypoint& a, const Keypoint& b);

}  // namespace landchange
