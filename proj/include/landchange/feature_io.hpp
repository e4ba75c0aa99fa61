#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "landchange/kaze.hpp"

namespace landchange {

/// Keypoints plus descriptors of arbitrary uniform length, independent of the
/// detector that produced them.
struct FeatureSet {
  int width = 0;
  int height = 0;
  std::string detector_name;
  std::vector<Keypoint> keypoints;
  std::size_t descriptor_length = kDescriptorLength;
  std::vector<float> descriptors;  // keypoints.size() * descriptor_length, row-major

  std::size_t size() const { return keypoints.size(); }
  std::span<const float> descriptor(std::size_t i) const {
    return {descriptors.data() + i * descriptor_length, descriptor_length};
  }

  // Throws FormatError when keypoints and descriptor storage disagree.
  void validate() const;

  bool operator==(const FeatureSet&) const = default;
};

FeatureSet make_feature_set(const Features& f, int width, int height, std::string detector_name = "KAZE");

/// Runs the detector on `img` and packages the result.
FeatureSet extract_features(const Raster& img, const DetectorConfig& cfg = {});

// FEATSET1 layout (little-endian):
//   "FEATSET1", u32 width, u32 height, u32 name_len, name bytes (UTF-8),
//   u32 count N, u32 descriptor length L,
//   N x (f64 x, y, sigma, orientation, response), N x L f32 descriptor values.
void write_features(const FeatureSet& fs, const std::filesystem::path& path);
FeatureSet read_features(const std::filesystem::path& path);

std::vector<unsigned char> encode_features(const FeatureSet& fs);
FeatureSet decode_features(std::span<const unsigned char> bytes);

}  // namespace landchange
