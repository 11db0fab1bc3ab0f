#include "lfaa/light_field.hpp"

#include <string>

namespace lfaa {

Epi extract_epi_horizontal(const LightField4D& lf, int v_star, int t_star) {
    if (v_star < 0 || v_star >= lf.height())
        throw ValidationError("extract_epi_horizontal: v_star out of range");
    if (t_star < 0 || t_star >= lf.views_t())
        throw ValidationError("extract_epi_horizontal: t_star out of range");

    Epi epi(lf.views_s(), lf.width(), {EpiKind::Horizontal, v_star, t_star});
    for (int s = 0; s < lf.views_s(); ++s)
        for (int u = 0; u < lf.width(); ++u) epi(s, u) = lf.at(u, v_star, s, t_star);
    return epi;
}

Epi extract_epi_vertical(const LightField4D& lf, int u_star, int s_star) {
    if (u_star < 0 || u_star >= lf.width())
        throw ValidationError("extract_epi_vertical: u_star out of range");
    if (s_star < 0 || s_star >= lf.views_s())
        throw ValidationError("extract_epi_vertical: s_star out of range");

    Epi epi(lf.views_t(), lf.height(), {EpiKind::Vertical, u_star, s_star});
    for (int t = 0; t < lf.views_t(); ++t)
        for (int v = 0; v < lf.height(); ++v) epi(t, v) = lf.at(u_star, v, s_star, t);
    return epi;
}

void insert_epi(LightField4D& lf, const Epi& epi) {
    const auto& p = epi.provenance;
    if (p.kind == EpiKind::Horizontal) {
        if (p.fixed_a < 0 || p.fixed_a >= lf.height() || p.fixed_b < 0 ||
            p.fixed_b >= lf.views_t())
            throw ValidationError("insert_epi: slice coordinates out of range");
        if (epi.angular() != lf.views_s() || epi.spatial() != lf.width())
            throw ValidationError("insert_epi: dimension mismatch for horizontal slice");
        for (int s = 0; s < lf.views_s(); ++s)
            for (int u = 0; u < lf.width(); ++u)
                lf.at(u, p.fixed_a, s, p.fixed_b) = epi(s, u);
    } else if (p.kind == EpiKind::Vertical) {
        if (p.fixed_a < 0 || p.fixed_a >= lf.width() || p.fixed_b < 0 ||
            p.fixed_b >= lf.views_s())
            throw ValidationError("insert_epi: slice coordinates out of range");
        if (epi.angular() != lf.views_t() || epi.spatial() != lf.height())
            throw ValidationError("insert_epi: dimension mismatch for vertical slice");
        for (int t = 0; t < lf.views_t(); ++t)
            for (int v = 0; v < lf.height(); ++v)
                lf.at(p.fixed_a, v, p.fixed_b, t) = epi(t, v);
    } else {
        throw ValidationError("insert_epi: provenance does not address an LF slice");
    }
}

LightField4D reconstruct_4d(const LightField4D& sparse, const EpiReconstructor& epi_fn,
                            int alpha_s) {
    if (alpha_s < 1) throw ValidationError("reconstruct_4d: alpha_s must be >= 1");
    if (alpha_s == 1) return sparse;
    if (sparse.views_s() < 2 || sparse.views_t() < 2)
        throw ValidationError("reconstruct_4d: need >= 2 views per angular axis");

    const int s_out = alpha_s * sparse.views_s() - (alpha_s - 1);
    const int t_out = alpha_s * sparse.views_t() - (alpha_s - 1);

    // Step 1: high s-resolution from horizontal EPIs.
    LightField4D mid(sparse.width(), sparse.height(), s_out, sparse.views_t());
    for (int t = 0; t < sparse.views_t(); ++t) {
        for (int v = 0; v < sparse.height(); ++v) {
            Epi hr;
            try {
                hr = epi_fn(extract_epi_horizontal(sparse, v, t));
            } catch (const std::exception& e) {
                throw NumericalError("reconstruct_4d: EPI reconstruction failed at (v*=" +
                                     std::to_string(v) + ", t*=" + std::to_string(t) +
                                     "): " + e.what());
            }
            if (hr.angular() != s_out || hr.spatial() != sparse.width())
                throw ValidationError("reconstruct_4d: epi_fn produced wrong shape at (v*=" +
                                      std::to_string(v) + ", t*=" + std::to_string(t) + ")");
            hr.provenance = {EpiKind::Horizontal, v, t};
            insert_epi(mid, hr);
        }
    }

    // Step 2: high t-resolution from vertical EPIs of the intermediate LF.
    LightField4D out(sparse.width(), sparse.height(), s_out, t_out);
    for (int s = 0; s < s_out; ++s) {
        for (int u = 0; u < sparse.width(); ++u) {
            Epi hr;
            try {
                hr = epi_fn(extract_epi_vertical(mid, u, s));
            } catch (const std::exception& e) {
                throw NumericalError("reconstruct_4d: EPI reconstruction failed at (u*=" +
                                     std::to_string(u) + ", s*=" + std::to_string(s) +
                                     "): " + e.what());
            }
            if (hr.angular() != t_out || hr.spatial() != sparse.height())
                throw ValidationError("reconstruct_4d: epi_fn produced wrong shape at (u*=" +
                                      std::to_string(u) + ", s*=" + std::to_string(s) + ")");
            hr.provenance = {EpiKind::Vertical, u, s};
            insert_epi(out, hr);
        }
    }

    // Input views pass through untouched.
    for (int t = 0; t < sparse.views_t(); ++t)
        for (int s = 0; s < sparse.views_s(); ++s)
            for (int v = 0; v < sparse.height(); ++v)
                for (int u = 0; u < sparse.width(); ++u)
                    out.at(u, v, s * alpha_s, t * alpha_s) = sparse.at(u, v, s, t);

    out.disparity_hint() = sparse.disparity_hint();
    return out;
}

} // namespace lfaa
