#pragma once

#include <string>

#include "lfaa/light_field.hpp"

namespace lfaa {

// LF container: a directory with manifest.json
//   {views_s, views_t, width, height, bit_depth, disparity_min, disparity_max,
//    files: [...] }  (files row-major in (t, s), one grayscale view each)
// plus the per-view images (8/16-bit PNG or float32 PFM).
// bit_depth 32 selects PFM views.

struct ContainerWriteOptions {
    int bit_depth = 16; // 8, 16 (PNG) or 32 (PFM)
};

void write_light_field(const std::string& dir, const LightField4D& lf,
                       const ContainerWriteOptions& opts = {});
LightField4D read_light_field(const std::string& dir);

} // namespace lfaa
