#pragma once

#include <filesystem>

#include "rcaus/beamform.hpp"

namespace rcaus {

/// 8-bit binary graymap (P5) of 20 log10(value / max), mapping [-db_range, 0] dB
/// to [0, 255]. Rows are written top to bottom in image row order.
void write_pgm(const std::filesystem::path& path, const Image2D& image, double db_range);

/// Linear image values, one image row per line, comma separated.
void write_image_csv(const std::filesystem::path& path, const Image2D& image);

}  // namespace rcaus
