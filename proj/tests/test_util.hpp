#pragma once

#include <atomic>
#include <filesystem>
#include <string>
#include <unistd.h>

#include "landchange/raster.hpp"

namespace testutil {

// Scratch directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("landchange_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline landchange::Raster filled_square(int size, int x0, int y0, int side, float bg, float fg) {
  landchange::Raster r(size, size, bg);
  for (int y = y0; y < y0 + side; ++y)
    for (int x = x0; x < x0 + side; ++x) r.at(x, y) = fg;
  return r;
}

}  // namespace testutil
