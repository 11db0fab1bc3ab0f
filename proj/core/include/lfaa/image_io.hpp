#pragma once

#include <string>

#include "lfaa/grid.hpp"

namespace lfaa {

// Grayscale image I/O. Grid2D rows are scanlines top-down, values in [0, 1].

// 8- or 16-bit grayscale PNG. Values are clamped to [0, 1] on write.
void write_png_gray(const std::string& path, const Grid2D& img, int bit_depth = 16);
Grid2D read_png_gray(const std::string& path);

// Grayscale PFM ("Pf"), float32, little-endian, scanlines bottom-up.
void write_pfm(const std::string& path, const Grid2D& img);
Grid2D read_pfm(const std::string& path);

} // namespace lfaa
