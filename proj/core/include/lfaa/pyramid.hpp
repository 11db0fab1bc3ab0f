#pragma once

#include <vector>

#include "lfaa/grid.hpp"

namespace lfaa {

// Keys cubic convolution kernel, a = -0.5.
double cubic_kernel(double x);

// Cubic resampling along u with pixel-center alignment:
// src = (dst + 0.5) * scale - 0.5. When scale > 1 the kernel is stretched by
// the scale (prefilter-by-stretch). Edge replication at the borders.
Grid2D resample_cols(const Grid2D& x, int out_cols, double scale);
Grid2D resample_rows(const Grid2D& x, int out_rows, double scale);

// Spatial width divided by `factor` (ceiling); angular dimension untouched.
Grid2D downscale_spatial(const Grid2D& x, int factor);
Tensor3 downscale_spatial(const Tensor3& x, int factor);

Grid2D upscale_spatial(const Grid2D& x, int factor);
Tensor3 upscale_spatial(const Tensor3& x, int factor);

struct PyramidLevels {
    std::vector<int> factors;     // strictly decreasing, ends at 1
    Grid2D base;                  // coarsest level, downscale(x, factors[0])
    std::vector<Grid2D> residuals; // residuals[j] lives at the factors[j+1] grid
};

PyramidLevels laplacian_decompose(const Grid2D& x, std::vector<int> factors = {4, 2, 1});
Grid2D laplacian_reconstruct(const PyramidLevels& p);

// Keeps rows s == offset (mod rate).
Grid2D downsample_angular_nearest(const Grid2D& x, int rate, int offset);

// S rows -> alpha_s*S - (alpha_s - 1) rows, interpolating cubic along s.
// Original rows are reproduced exactly at indices s*alpha_s.
Grid2D upsample_angular_cubic(const Grid2D& x, int alpha_s);

} // namespace lfaa
