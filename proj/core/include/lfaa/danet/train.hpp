#pragma once

#include <cstdint>
#include <vector>

#include "lfaa/danet/graph.hpp"
#include "lfaa/synth.hpp"

namespace lfaa::danet {

struct TrainConfig {
    // Prefilter slots learn 4x slower so the Gaussian ladder stays stable.
    double lr_prefilter = 2.5e-4;
    double lr_rest = 1.0e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    int batch = 2;
    int steps = 100;
    uint64_t seed = 1;
    double leaky = 0.2;
    std::vector<double> lambda_feat; // retained; perceptual term not implemented
};

void validate(const TrainConfig& cfg);

struct TrainResult {
    NetworkParams params;
    std::vector<double> loss_trace; // mean batch L1 per step
};

// ADAM with split learning rates on (input, label) patch pairs. Deterministic
// given seed. Throws NumericalError on divergence (non-finite loss), naming
// the step.
TrainResult train(const Graph& g, NetworkParams start, const TrainConfig& cfg,
                  const std::vector<PatchPair>& dataset);

} // namespace lfaa::danet
