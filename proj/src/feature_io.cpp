#include "landchange/feature_io.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>

#include "landchange/error.hpp"

namespace landchange {
namespace {

constexpr char kMagic[8] = {'F', 'E', 'A', 'T', 'S', 'E', 'T', '1'};

static_assert(std::endian::native == std::endian::little, "FEATSET1 codec assumes a little-endian host");

class Writer {
 public:
  void bytes(const void* p, std::size_t n) {
    const auto* b = static_cast<const unsigned char*>(p);
    out_.insert(out_.end(), b, b + n);
  }
  void u32(std::uint32_t v) { bytes(&v, sizeof(v)); }
  void f64(double v) { bytes(&v, sizeof(v)); }
  void f32(float v) { bytes(&v, sizeof(v)); }
  std::vector<unsigned char> take() { return std::move(out_); }

 private:
  std::vector<unsigned char> out_;
};

class Reader {
 public:
  explicit Reader(std::span<const unsigned char> in) : in_(in) {}
  void bytes(void* p, std::size_t n) {
    if (n > in_.size() - pos_) throw FormatError("FEATSET1 data truncated");
    std::memcpy(p, in_.data() + pos_, n);
    pos_ += n;
  }
  std::uint32_t u32() {
    std::uint32_t v = 0;
    bytes(&v, sizeof(v));
    return v;
  }
  double f64() {
    double v = 0;
    bytes(&v, sizeof(v));
    return v;
  }
  float f32() {
    float v = 0;
    bytes(&v, sizeof(v));
    return v;
  }
  std::size_t remaining() const { return in_.size() - pos_; }

 private:
  std::span<const unsigned char> in_;
  std::size_t pos_ = 0;
};

double finite_or_throw(double v) {
  if (!std::isfinite(v)) throw FormatError("FEATSET1 contains a non-finite value");
  return v;
}

}  // namespace

void FeatureSet::validate() const {
  if (descriptor_length < 1) throw FormatError("descriptor length must be at least 1");
  if (descriptors.size() != keypoints.size() * descriptor_length)
    throw FormatError("descriptor storage does not match keypoint count");
}

FeatureSet make_feature_set(const Features& f, int width, int height, std::string detector_name) {
  if (f.keypoints.size() != f.descriptors.size())
    throw InvariantError("keypoint and descriptor lists are not aligned");
  FeatureSet fs;
  fs.width = width;
  fs.height = height;
  fs.detector_name = std::move(detector_name);
  fs.keypoints = f.keypoints;
  fs.descriptor_length = kDescriptorLength;
  fs.descriptors.reserve(f.descriptors.size() * kDescriptorLength);
  for (const Descriptor& d : f.descriptors) fs.descriptors.insert(fs.descriptors.end(), d.begin(), d.end());
  return fs;
}

FeatureSet extract_features(const Raster& img, const DetectorConfig& cfg) {
  return make_feature_set(detect_and_describe(img, cfg), img.width(), img.height(), "KAZE");
}

std::vector<unsigned char> encode_features(const FeatureSet& fs) {
  fs.validate();
  Writer w;
  w.bytes(kMagic, sizeof(kMagic));
  w.u32(static_cast<std::uint32_t>(fs.width));
  w.u32(static_cast<std::uint32_t>(fs.height));
  w.u32(static_cast<std::uint32_t>(fs.detector_name.size()));
  w.bytes(fs.detector_name.data(), fs.detector_name.size());
  w.u32(static_cast<std::uint32_t>(fs.keypoints.size()));
  w.u32(static_cast<std::uint32_t>(fs.descriptor_length));
  for (const Keypoint& kp : fs.keypoints) {
    w.f64(kp.x);
    w.f64(kp.y);
    w.f64(kp.sigma);
    w.f64(kp.orientation);
    w.f64(kp.response);
  }
  for (const float v : fs.descriptors) w.f32(v);
  return w.take();
}

FeatureSet decode_features(std::span<const unsigned char> bytes) {
  Reader r(bytes);
  char magic[8] = {};
  r.bytes(magic, sizeof(magic));
  if (std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) throw FormatError("not a FEATSET1 file (bad magic)");
  FeatureSet fs;
  fs.width = static_cast<int>(r.u32());
  fs.height = static_cast<int>(r.u32());
  const std::uint32_t name_len = r.u32();
  if (name_len > r.remaining()) throw FormatError("FEATSET1 detector name overruns the file");
  fs.detector_name.resize(name_len);
  r.bytes(fs.detector_name.data(), name_len);
  const std::uint32_t count = r.u32();
  const std::uint32_t length = r.u32();
  if (length < 1) throw FormatError("FEATSET1 descriptor length must be at least 1");
  const std::uint64_t expected = static_cast<std::uint64_t>(count) * (5 * sizeof(double) + length * sizeof(float));
  if (expected != r.remaining()) throw FormatError("FEATSET1 record section length does not match the header");
  fs.descriptor_length = length;
  fs.keypoints.resize(count);
  for (Keypoint& kp : fs.keypoints) {
    kp.x = finite_or_throw(r.f64());
    kp.y = finite_or_throw(r.f64());
    kp.sigma = finite_or_throw(r.f64());
    kp.orientation = finite_or_throw(r.f64());
    kp.response = finite_or_throw(r.f64());
  }
  fs.descriptors.resize(static_cast<std::size_t>(count) * length);
  for (float& v : fs.descriptors) v = static_cast<float>(finite_or_throw(r.f32()));
  return fs;
}

void write_features(const FeatureSet& fs, const std::filesystem::path& path) {
  const std::vector<unsigned char> bytes = encode_features(fs);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open feature file for writing: " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("failed writing feature file: " + path.string());
}

FeatureSet read_features(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open feature file: " + path.string());
  const std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_features(bytes);
}

}  // namespace landchange
