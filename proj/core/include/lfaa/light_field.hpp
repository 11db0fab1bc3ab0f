#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "lfaa/epi.hpp"
#include "lfaa/grid.hpp"

namespace lfaa {

// Disparity interval in pixels per unit view step.
struct DisparityRange {
    double d_min = 0.0;
    double d_max = 0.0;

    DisparityRange() = default;
    DisparityRange(double dmin, double dmax) : d_min(dmin), d_max(dmax) {
        if (!(dmin <= dmax)) throw ValidationError("DisparityRange: d_min > d_max");
    }
    double d_opt() const { return 0.5 * (d_min + d_max); }
    double width() const { return d_max - d_min; }
};

// 4D luminance grid L(u,v,s,t) in [0,1].
// Memory order (t, s, v, u) outermost-to-innermost, so a horizontal EPI row
// is a contiguous gather.
class LightField4D {
public:
    LightField4D() = default;
    LightField4D(int width, int height, int views_s, int views_t, double fill = 0.0)
        : width_(width), height_(height), views_s_(views_s), views_t_(views_t),
          v_(static_cast<size_t>(width) * height * views_s * views_t, fill) {
        if (width < 1 || height < 1 || views_s < 1 || views_t < 1)
            throw ValidationError("LightField4D: all dimensions must be >= 1");
    }

    int width() const { return width_; }
    int height() const { return height_; }
    int views_s() const { return views_s_; }
    int views_t() const { return views_t_; }

    double& at(int u, int v, int s, int t) { return v_[index(u, v, s, t)]; }
    double at(int u, int v, int s, int t) const { return v_[index(u, v, s, t)]; }

    std::optional<DisparityRange>& disparity_hint() { return disparity_hint_; }
    const std::optional<DisparityRange>& disparity_hint() const { return disparity_hint_; }

    const std::vector<double>& raw() const { return v_; }
    bool operator==(const LightField4D& o) const {
        return width_ == o.width_ && height_ == o.height_ && views_s_ == o.views_s_ &&
               views_t_ == o.views_t_ && v_ == o.v_;
    }

private:
    size_t index(int u, int v, int s, int t) const {
        return ((static_cast<size_t>(t) * views_s_ + s) * height_ + v) * width_ + u;
    }

    int width_ = 0, height_ = 0, views_s_ = 0, views_t_ = 0;
    std::vector<double> v_;
    std::optional<DisparityRange> disparity_hint_;
};

// E_{v*,t*}(u,s): angular = views_s, spatial = width.
Epi extract_epi_horizontal(const LightField4D& lf, int v_star, int t_star);

// E_{u*,s*}(v,t): angular = views_t, spatial = height.
Epi extract_epi_vertical(const LightField4D& lf, int u_star, int s_star);

// Writes an extracted slice back; provenance addresses the slice.
void insert_epi(LightField4D& lf, const Epi& epi);

using EpiReconstructor = std::function<Epi(const Epi&)>;

// Two-step 4D reconstruction: upsample s via horizontal EPIs, then t via
// vertical EPIs of the intermediate result. epi_fn must map S views to
// alpha_s*S - (alpha_s - 1). Input views are copied through unmodified.
LightField4D reconstruct_4d(const LightField4D& sparse, const EpiReconstructor& epi_fn,
                            int alpha_s);

} // namespace lfaa
