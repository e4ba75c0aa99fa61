#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "landchange/error.hpp"
#include "landchange/raster.hpp"

namespace landchange {
namespace {

enum class FileKind { kPng, kPnm, kUnknown };

FileKind sniff(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open image file: " + path.string());
  unsigned char magic[8] = {};
  in.read(reinterpret_cast<char*>(magic), sizeof(magic));
  const auto got = in.gcount();
  if (got >= 8 && png_sig_cmp(magic, 0, 8) == 0) return FileKind::kPng;
  if (got >= 2 && magic[0] == 'P' && (magic[1] == '5' || magic[1] == '6')) return FileKind::kPnm;
  return FileKind::kUnknown;
}

float luma(double r, double g, double b, double maxval) {
  return static_cast<float>((kLumaRed * r + kLumaGreen * g + kLumaBlue * b) / maxval);
}

struct PnmHeader {
  int channels = 0;
  int width = 0;
  int height = 0;
  int maxval = 0;
};

std::string next_token(std::istream& in) {
  std::string tok;
  int c = in.get();
  while (c != EOF) {
    if (c == '#') {
      while (c != EOF && c != '\n') c = in.get();
    } else if (std::isspace(c)) {
      if (!tok.empty()) return tok;
    } else {
      tok.push_back(static_cast<char>(c));
    }
    c = in.get();
  }
  return tok;
}

PnmHeader read_pnm_header(std::istream& in, const std::filesystem::path& path) {
  PnmHeader h;
  const std::string magic = next_token(in);
  if (magic == "P5") {
    h.channels = 1;
  } else if (magic == "P6") {
    h.channels = 3;
  } else {
    throw FormatError("unsupported PNM variant in " + path.string());
  }
  try {
    h.width = std::stoi(next_token(in));
    h.height = std::stoi(next_token(in));
    h.maxval = std::stoi(next_token(in));
  } catch (const std::exception&) {
    throw FormatError("malformed PNM header in " + path.string());
  }
  if (h.maxval <= 0 || h.maxval > 65535) throw FormatError("invalid PNM maxval in " + path.string());
  return h;
}

Raster load_pnm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open image file: " + path.string());
  const PnmHeader h = read_pnm_header(in, path);
  if (h.width <= 0 || h.height <= 0) throw FormatError("zero-dimension image: " + path.string());
  const int bytes = h.maxval > 255 ? 2 : 1;
  const std::size_t count = static_cast<std::size_t>(h.width) * h.height * h.channels;
  std::vector<unsigned char> buf(count * bytes);
  in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  if (static_cast<std::size_t>(in.gcount()) != buf.size()) throw FormatError("truncated PNM data in " + path.string());

  auto sample = [&](std::size_t i) -> double {
    if (bytes == 1) return buf[i];
    return static_cast<double>((buf[2 * i] << 8) | buf[2 * i + 1]);
  };
  const double maxval = h.maxval;
  Raster out(h.width, h.height);
  for (int y = 0; y < h.height; ++y) {
    for (int x = 0; x < h.width; ++x) {
      const std::size_t p = (static_cast<std::size_t>(y) * h.width + x) * h.channels;
      if (h.channels == 1) {
        out.at(x, y) = static_cast<float>(std::min(sample(p), maxval) / maxval);
      } else {
        out.at(x, y) = std::clamp(luma(sample(p), sample(p + 1), sample(p + 2), maxval), 0.0f, 1.0f);
      }
    }
  }
  return out;
}

Raster load_png(const std::filesystem::path& path) {
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&image, path.c_str()))
    throw FormatError("cannot decode PNG " + path.string() + ": " + image.message);
  if (image.width == 0 || image.height == 0) {
    png_image_free(&image);
    throw FormatError("zero-dimension image: " + path.string());
  }
  const bool color = (image.format & PNG_FORMAT_FLAG_COLOR) != 0;
  image.format = color ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  std::vector<png_byte> buf(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, buf.data(), 0, nullptr)) {
    const std::string msg = image.message;
    png_image_free(&image);
    throw FormatError("cannot decode PNG " + path.string() + ": " + msg);
  }
  const int w = static_cast<int>(image.width);
  const int h = static_cast<int>(image.height);
  Raster out(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t p = static_cast<std::size_t>(y) * w + x;
      if (color) {
        out.at(x, y) = std::clamp(luma(buf[3 * p], buf[3 * p + 1], buf[3 * p + 2], 255.0), 0.0f, 1.0f);
      } else {
        out.at(x, y) = static_cast<float>(buf[p] / 255.0);
      }
    }
  }
  return out;
}

}  // namespace

Raster load_image(const std::filesystem::path& path) {
  switch (sniff(path)) {
    case FileKind::kPng:
      return load_png(path);
    case FileKind::kPnm:
      return load_pnm(path);
    case FileKind::kUnknown:
      break;
  }
  throw FormatError("unsupported image format: " + path.string());
}

ImageSize probe_image_size(const std::filesystem::path& path) {
  switch (sniff(path)) {
    case FileKind::kPng: {
      png_image image;
      std::memset(&image, 0, sizeof(image));
      image.version = PNG_IMAGE_VERSION;
      if (!png_image_begin_read_from_file(&image, path.c_str()))
        throw FormatError("cannot decode PNG " + path.string() + ": " + image.message);
      const ImageSize size{static_cast<int>(image.width), static_cast<int>(image.height)};
      png_image_free(&image);
      return size;
    }
    case FileKind::kPnm: {
      std::ifstream in(path, std::ios::binary);
      const PnmHeader h = read_pnm_header(in, path);
      return {h.width, h.height};
    }
    case FileKind::kUnknown:
      break;
  }
  throw FormatError("unsupported image format: " + path.string());
}

void save_png(const Raster& r, const std::filesystem::path& path) {
  if (r.empty()) throw ConfigError("cannot save an empty raster");
  std::vector<png_byte> buf(r.size());
  const auto px = r.pixels();
  std::transform(px.begin(), px.end(), buf.begin(), [](float v) {
    return static_cast<png_byte>(std::lround(std::clamp(v, 0.0f, 1.0f) * 255.0f));
  });
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(r.width());
  image.height = static_cast<png_uint_32>(r.height());
  image.format = PNG_FORMAT_GRAY;
  if (!png_image_write_to_file(&image, path.c_str(), 0, buf.data(), 0, nullptr))
    throw IoError("cannot write PNG " + path.string() + ": " + image.message);
}

void save_png(const RgbImage& img, const std::filesystem::path& path) {
  if (img.width <= 0 || img.height <= 0) throw ConfigError("cannot save an empty image");
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(img.width);
  image.height = static_cast<png_uint_32>(img.height);
  image.format = PNG_FORMAT_RGB;
  if (!png_image_write_to_file(&image, path.c_str(), 0, img.data.data(), 0, nullptr))
    throw IoError("cannot write PNG " + path.string() + ": " + image.message);
}

}  // namespace landchange
