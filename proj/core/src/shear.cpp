#include "lfaa/shear.hpp"

#include <cmath>

namespace lfaa {

Tensor3 shear_tensor(const Tensor3& x, double alpha_h) {
    return shear_tensor(x, alpha_h, 0.5 * x.rows());
}

Tensor3 shear_tensor(const Tensor3& x, double alpha_h, double center) {
    if (!std::isfinite(alpha_h)) throw ValidationError("shear_tensor: alpha_h not finite");
    const int S = x.rows(), U = x.cols(), C = x.channels();
    Tensor3 out(S, U, C);
    for (int s = 0; s < S; ++s) {
        const double off = (s - center) * alpha_h;
        for (int u = 0; u < U; ++u) {
            const double src = u + off;
            const double fl = std::floor(src);
            const int i0 = static_cast<int>(fl);
            const double w1 = src - fl;
            const double w0 = 1.0 - w1;
            const bool in0 = i0 >= 0 && i0 < U;
            const bool in1 = i0 + 1 >= 0 && i0 + 1 < U;
            for (int c = 0; c < C; ++c) {
                double v = 0.0;
                if (in0) v += w0 * x(s, i0, c);
                if (in1) v += w1 * x(s, i0 + 1, c);
                out(s, u, c) = v;
            }
        }
    }
    return out;
}

Epi shear_epi(const Epi& epi, double alpha_h) {
    Epi out(shear_tensor(Tensor3::from_grid(epi.samples), alpha_h).channel(0),
            epi.provenance);
    return out;
}

Tensor3 unshear_for_upsampled(const Tensor3& x, double alpha_h, int alpha_s) {
    if (alpha_s < 1) throw ValidationError("unshear_for_upsampled: alpha_s must be >= 1");
    const int s_fine = x.rows();
    if ((s_fine + alpha_s - 1) % alpha_s != 0)
        throw ValidationError("unshear_for_upsampled: row count is not alpha_s*S - (alpha_s - 1)");
    const int s_in = (s_fine + alpha_s - 1) / alpha_s;
    // Center alpha_s*S/2 so the fine grid inverts the coarse-grid shear exactly
    // (the naive S'/2 center leaves a constant residual translation).
    return shear_tensor(x, -alpha_h / alpha_s, 0.5 * alpha_s * s_in);
}

Epi unshear_for_upsampled(const Epi& epi, double alpha_h, int alpha_s) {
    return Epi(
        unshear_for_upsampled(Tensor3::from_grid(epi.samples), alpha_h, alpha_s).channel(0),
        epi.provenance);
}

} // namespace lfaa
