#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "landchange/change_detect.hpp"
#include "landchange/raster.hpp"

namespace landchange {

// Overlay colours: forward points red, backward points green, window
// outlines yellow.
inline constexpr unsigned char kForwardColor[3] = {255, 0, 0};
inline constexpr unsigned char kBackwardColor[3] = {0, 255, 0};
inline constexpr unsigned char kWindowColor[3] = {255, 220, 0};

/// Grayscale `base` with window outlines and change-point markers drawn on top.
RgbImage render_overlay(const Raster& base, const ChangeResult& result);

/// Score map scaled to [0, 1] by its maximum (all zero when empty).
Raster normalized_score_map(const ChangeResult& result);

/// Score map as CSV: one image row per line, comma-separated counts.
void write_score_csv(const ChangeResult& result, std::ostream& out);

/// Machine-readable summary of a detection run.
std::string result_summary_json(const ChangeResult& result, const DetectConfig& cfg);

}  // namespace landchange
