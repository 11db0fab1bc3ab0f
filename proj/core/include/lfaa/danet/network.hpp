#pragma once

#include <vector>

#include "lfaa/danet/graph.hpp"
#include "lfaa/epi.hpp"

namespace lfaa::danet {

// Reconstruction net: sheared 1-channel EPI in, 27-channel upsampled feature
// map out (angular extent alpha_s*S - (alpha_s - 1)). alpha_s in {3, 4}.
Graph build_reconstruction_net(int alpha_s);

// Fusion net: 27*num_shears channels in, 1 channel out, same spatial dims
// (width divisible by 4).
Graph build_fusion_net(int num_shears);

struct Da2nConfig {
    int alpha_s = 3;
    std::vector<double> shears = {-9, -6, -3, 0, 3, 6, 9};
    double leaky = 0.2;
};

// Full network: per shear, shear -> reconstruction net (shared weights) ->
// unshear by -alpha_h/alpha_s; concat across shears; fusion net.
Graph build_da2n(const Da2nConfig& cfg);

// Single-channel inference wrapper (eval mode).
Epi danet_reconstruct(const Graph& g, NetworkParams& params, const Epi& input);

} // namespace lfaa::danet
