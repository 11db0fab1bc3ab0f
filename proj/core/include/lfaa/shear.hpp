#pragma once

#include "lfaa/epi.hpp"
#include "lfaa/grid.hpp"

namespace lfaa {

struct ShearSpec {
    double alpha_h = 0.0;
    bool centered = true; // always true here; kept for the record
};

// out(u,s,c) = x(u + (s - center)*alpha_h, s, c), bilinear along u,
// zero outside [0, U-1]. Default center is S/2 (exact real, no rounding).
Tensor3 shear_tensor(const Tensor3& x, double alpha_h);
Tensor3 shear_tensor(const Tensor3& x, double alpha_h, double center);

Epi shear_epi(const Epi& epi, double alpha_h);

// Inverse shear for an angularly upsampled tensor: amount -alpha_h/alpha_s,
// centered so that row r of the fine grid lands where angular position
// r/alpha_s of the source grid was sheared from. The fine row count S' must
// satisfy S' = alpha_s*S - (alpha_s - 1) for an integer S.
Tensor3 unshear_for_upsampled(const Tensor3& x, double alpha_h, int alpha_s);
Epi unshear_for_upsampled(const Epi& epi, double alpha_h, int alpha_s);

} // namespace lfaa
