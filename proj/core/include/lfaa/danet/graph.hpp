#pragma once

#include <string>
#include <vector>

#include "lfaa/grid.hpp"

namespace lfaa::danet {

enum class LayerKind {
    Input,
    Conv2d,
    Deconv2d,
    Prefilter1d,
    Shear,
    Concat,
    Subtract,
    LeakyRelu,
    Norm
};

const char* kind_name(LayerKind k);

// One node of the computational graph. Kernel/stride extents are
// (spatial u, angular s) to match the tables' [k_u, k_s] convention.
struct LayerSpec {
    std::string name;
    LayerKind kind = LayerKind::Input;
    int k_u = 1, k_s = 1;
    int str_u = 1, str_s = 1;
    int ch_in = 1, ch_out = 1;
    std::vector<int> inputs; // upstream node indices

    int slot = -1; // parameter slot (shared across branches), -1 if none

    // Deconv2d: output spatial dims copy those of `match_node`'s activation;
    // if angular_expand > 0, out_s = angular_expand*S_graph_in - (angular_expand-1).
    int match_node = -1;
    int angular_expand = 0;

    // Shear: amount alpha; if unshear_alpha_s > 0 the center is
    // 0.5*alpha_s*S_in with S_in = (rows + alpha_s - 1)/alpha_s.
    double alpha = 0.0;
    int unshear_alpha_s = 0;

    double slope = 0.2; // LeakyRelu
};

struct ParamSlot {
    std::string name;
    size_t w_size = 0;
    size_t b_size = 0;
    bool prefilter = false; // uses the prefilter learning rate
    bool norm = false;      // carries running statistics
    int channels = 0;       // for norm slots

    // Prefilter initialization (Gaussian ladder 0..sigma_max).
    int pf_length = 0;
    int pf_channels = 0;
    double pf_sigma_max = 0.0;
};

struct Graph {
    std::vector<LayerSpec> nodes; // topologically ordered
    std::vector<ParamSlot> slots;
    int input = -1;
    int output = -1;

    int add(LayerSpec spec); // validates wiring, returns node index
    int add_slot(ParamSlot slot);
};

// All parameter tensors, indexed by slot. Norm slots keep gain in w, shift in
// b, plus running mean/variance updated in training mode (momentum 0.9).
struct NetworkParams {
    std::vector<std::vector<double>> w, b;
    std::vector<std::vector<double>> running_mean, running_var;

    size_t count() const;
    bool finite() const;
};

NetworkParams init_params(const Graph& g, uint64_t seed);

// Normalized Gaussian taps per channel, sigma(c) = sigma_max*c/(channels-1)
// (impulse at c = 0), each kernel of odd `length` summing to 1.
std::vector<std::vector<double>> init_prefilter_layer(double sigma_max, int channels,
                                                      int length);

struct ForwardCache {
    std::vector<Tensor3> acts;   // per node
    std::vector<Tensor3> pre;    // pre-normalization input for Norm nodes
    bool training = false;
};

// Runs the graph; throws NumericalError naming the first layer that produces
// a non-finite activation. In training mode Norm nodes use batch statistics
// and update the running ones.
Tensor3 forward(const Graph& g, NetworkParams& params, const Tensor3& input,
                bool training = false, ForwardCache* cache = nullptr);

struct Gradients {
    std::vector<std::vector<double>> w, b;
    void init_like(const NetworkParams& p);
    void accumulate(const Gradients& o);
};

// Reverse-mode gradients of every parameter given d(loss)/d(output).
// Returns d(loss)/d(input).
Tensor3 backward(const Graph& g, const NetworkParams& params, const ForwardCache& cache,
                 const Tensor3& d_output, Gradients& grads);

double loss_l1(const Tensor3& pred, const Tensor3& label);
Tensor3 loss_l1_grad(const Tensor3& pred, const Tensor3& label);

} // namespace lfaa::danet
