#pragma once

#include "lfaa/grid.hpp"

namespace lfaa {

// Where an EPI slice came from.
enum class EpiKind { Horizontal, Vertical, Synthetic, Pseudo };

struct EpiProvenance {
    EpiKind kind = EpiKind::Synthetic;
    // Horizontal: fixed (v*, t*). Vertical: fixed (u*, s*).
    int fixed_a = 0;
    int fixed_b = 0;
};

// 2D slice E(u,s): `angular()` views (rows) by `spatial()` pixels (cols).
struct Epi {
    Grid2D samples;
    EpiProvenance provenance;

    Epi() = default;
    Epi(int angular, int spatial, EpiProvenance prov = {})
        : samples(angular, spatial), provenance(prov) {}
    explicit Epi(Grid2D g, EpiProvenance prov = {})
        : samples(std::move(g)), provenance(prov) {}

    int angular() const { return samples.rows(); }
    int spatial() const { return samples.cols(); }

    double& operator()(int s, int u) { return samples(s, u); }
    double operator()(int s, int u) const { return samples(s, u); }
};

} // namespace lfaa
