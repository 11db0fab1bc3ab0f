#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lfaa/epi.hpp"

namespace lfaa {

struct ReconConfig {
    enum class Fusion { select_best_patch, global_best };

    std::vector<double> shears = {-9, -6, -3, 0, 3, 6, 9}; // sorted, non-empty
    int alpha_s = 3;                                       // >= 2
    double gamma = 10.0;
    std::vector<int> factors = {4, 2, 1};
    Fusion fusion = Fusion::select_best_patch;
    int patch = 16; // fusion patch size along u, >= 8
};

void validate(const ReconConfig& cfg);

struct SingleShearResult {
    Epi epi;              // alpha_s*S - (alpha_s - 1) rows
    double alpha_h = 0.0;
    double sigma = 0.0;   // designed shape parameter at the coarsest level
    bool sigma_capped = false; // unfilterable alias; proceeded with a capped sigma
};

// shear -> Laplacian decompose -> per-level prefilter -> cubic angular
// upsample -> recombine -> unshear. Input rows are copied through at s*alpha_s.
SingleShearResult reconstruct_single_shear(const Epi& epi, double alpha_h,
                                           const ReconConfig& cfg);

// Per-u-patch error: L1 between downsample_angular_nearest(candidate) and the
// input, plus 0.1 x mean |second difference along s|. When alpha_h is given,
// adds a model term: each intermediate row must match the nearest input row
// translated along the shear hypothesis (disparity -alpha_h). Ghosted rows
// from a wrong hypothesis disagree with that translation, so the term ranks
// shears even where the plain data term is zero.
std::vector<double> consistency_error(const Epi& candidate, const Epi& input,
                                      int alpha_s, int patch,
                                      std::optional<double> alpha_h = std::nullopt);

struct MultiShearResult {
    Epi epi;
    std::vector<double> selected_shears; // per patch
    std::vector<std::string> warnings;
};

// Runs every candidate shear, selects per patch (or globally) by
// consistency_error with each candidate's own shear hypothesis enabled.
// Cross-fades patch seams over 8 px; ties break toward smaller |alpha_h|.
MultiShearResult reconstruct_multi(const Epi& epi, const ReconConfig& cfg);

} // namespace lfaa
