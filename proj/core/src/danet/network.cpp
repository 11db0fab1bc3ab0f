#include "lfaa/danet/network.hpp"

#include <string>

namespace lfaa::danet {

namespace {

// Slot ids for one reconstruction net instance; created once, reused by every
// shear branch (the weights are shared).
struct ReconSlots {
    int conv1_1, conv1_2, conv1_3;
    int deconv2_1, deconv2_2;
    int conv2_1, conv2_2, conv2_3;
    int conv3_1, conv3_2, conv3_3;
    int deconv4_1, deconv4_2;
    int conv4, conv4_norm;
    int deconv5;
};

int conv_slot(Graph& g, const std::string& name, int k_u, int k_s, int ci, int co) {
    ParamSlot s;
    s.name = name;
    s.w_size = static_cast<size_t>(co) * k_s * k_u * ci;
    s.b_size = co;
    return g.add_slot(s);
}

int prefilter_slot(Graph& g, const std::string& name, int length, int ci) {
    ParamSlot s;
    s.name = name;
    s.w_size = static_cast<size_t>(2 * ci) * length;
    s.b_size = 0;
    s.prefilter = true;
    s.pf_length = length;
    s.pf_channels = 2 * ci;
    s.pf_sigma_max = length / 8.0; // +-4 sigma fits the kernel
    return g.add_slot(s);
}

int norm_slot(Graph& g, const std::string& name, int channels) {
    ParamSlot s;
    s.name = name;
    s.w_size = channels;
    s.b_size = channels;
    s.norm = true;
    s.channels = channels;
    return g.add_slot(s);
}

ReconSlots make_recon_slots(Graph& g) {
    ReconSlots s;
    s.conv1_1 = conv_slot(g, "conv1_1", 5, 5, 1, 10);
    s.conv1_2 = conv_slot(g, "conv1_2", 5, 5, 1, 10);
    s.conv1_3 = conv_slot(g, "conv1_3", 5, 5, 1, 10);
    s.deconv2_1 = conv_slot(g, "deconv2_1", 3, 3, 10, 10);
    s.deconv2_2 = conv_slot(g, "deconv2_2", 5, 5, 10, 10);
    s.conv2_1 = prefilter_slot(g, "conv2_1", 5, 10);
    s.conv2_2 = prefilter_slot(g, "conv2_2", 11, 10);
    s.conv2_3 = prefilter_slot(g, "conv2_3", 21, 10);
    s.conv3_1 = conv_slot(g, "conv3_1", 3, 3, 20, 27);
    s.conv3_2 = conv_slot(g, "conv3_2", 3, 3, 20, 27);
    s.conv3_3 = conv_slot(g, "conv3_3", 3, 3, 20, 27);
    s.deconv4_1 = conv_slot(g, "deconv4_1", 5, 5, 27, 27);
    s.deconv4_2 = conv_slot(g, "deconv4_2", 5, 5, 27, 27);
    s.conv4 = conv_slot(g, "conv4", 3, 3, 81, 81);
    s.conv4_norm = norm_slot(g, "conv4:norm", 81);
    s.deconv5 = conv_slot(g, "deconv5", 9, 9, 81, 27);
    return s;
}

struct B {
    Graph* g;
    std::string suffix;
    double leaky;

    int act(int in, const std::string& name) {
        LayerSpec a;
        a.name = name + ":act" + suffix;
        a.kind = LayerKind::LeakyRelu;
        a.slope = leaky;
        a.inputs = {in};
        return g->add(a);
    }

    int conv(const std::string& name, int slot, int in, int k_u, int k_s, int str_u,
             int str_s, int ci, int co) {
        LayerSpec n;
        n.name = name + suffix;
        n.kind = LayerKind::Conv2d;
        n.k_u = k_u;
        n.k_s = k_s;
        n.str_u = str_u;
        n.str_s = str_s;
        n.ch_in = ci;
        n.ch_out = co;
        n.slot = slot;
        n.inputs = {in};
        return g->add(n);
    }

    int deconv(const std::string& name, int slot, int in, int k_u, int k_s, int str_u,
               int str_s, int ci, int co, int match, int angular_expand = 0) {
        LayerSpec n;
        n.name = name + suffix;
        n.kind = LayerKind::Deconv2d;
        n.k_u = k_u;
        n.k_s = k_s;
        n.str_u = str_u;
        n.str_s = str_s;
        n.ch_in = ci;
        n.ch_out = co;
        n.slot = slot;
        n.match_node = match;
        n.angular_expand = angular_expand;
        n.inputs = {in};
        return g->add(n);
    }

    int prefilter(const std::string& name, int slot, int in, int length, int ci) {
        LayerSpec n;
        n.name = name + suffix;
        n.kind = LayerKind::Prefilter1d;
        n.k_u = length;
        n.ch_in = ci;
        n.ch_out = 2 * ci;
        n.slot = slot;
        n.inputs = {in};
        return g->add(n);
    }

    int subtract(const std::string& name, int a_node, int b_node) {
        LayerSpec n;
        n.name = name + suffix;
        n.kind = LayerKind::Subtract;
        n.inputs = {a_node, b_node};
        return g->add(n);
    }

    int concat(const std::string& name, std::vector<int> ins) {
        LayerSpec n;
        n.name = name + suffix;
        n.kind = LayerKind::Concat;
        n.inputs = std::move(ins);
        return g->add(n);
    }

    int norm(const std::string& name, int slot, int in) {
        LayerSpec n;
        n.name = name + suffix;
        n.kind = LayerKind::Norm;
        n.slot = slot;
        n.inputs = {in};
        return g->add(n);
    }
};

// Table 2 wiring. `input_node` carries the sheared 1-channel EPI; returns the
// deconv5 node (27 channels, no trailing activation).
int append_recon_branch(Graph& g, int input_node, int alpha_s, const ReconSlots& s,
                        const std::string& suffix, double leaky) {
    B b{&g, suffix, leaky};
    const int c11 = b.act(b.conv("conv1_1", s.conv1_1, input_node, 5, 5, 4, 1, 1, 10),
                          "conv1_1");
    const int c12 = b.act(b.conv("conv1_2", s.conv1_2, input_node, 5, 5, 2, 1, 1, 10),
                          "conv1_2");
    const int c13 = b.act(b.conv("conv1_3", s.conv1_3, input_node, 5, 5, 1, 1, 1, 10),
                          "conv1_3");
    const int d21 =
        b.act(b.deconv("deconv2_1", s.deconv2_1, c11, 3, 3, 2, 1, 10, 10, c12),
              "deconv2_1");
    const int d22 =
        b.act(b.deconv("deconv2_2", s.deconv2_2, c12, 5, 5, 2, 1, 10, 10, c13),
              "deconv2_2");
    const int r2 = b.subtract("conv1_2-deconv2_1", c12, d21);
    const int r3 = b.subtract("conv1_3-deconv2_2", c13, d22);
    const int c21 = b.prefilter("conv2_1", s.conv2_1, c11, 5, 10);
    const int c22 = b.prefilter("conv2_2", s.conv2_2, r2, 11, 10);
    const int c23 = b.prefilter("conv2_3", s.conv2_3, r3, 21, 10);
    const int c31 = b.act(b.conv("conv3_1", s.conv3_1, c21, 3, 3, 1, 1, 20, 27),
                          "conv3_1");
    const int c32 = b.act(b.conv("conv3_2", s.conv3_2, c22, 3, 3, 1, 1, 20, 27),
                          "conv3_2");
    const int c33 = b.act(b.conv("conv3_3", s.conv3_3, c23, 3, 3, 1, 1, 20, 27),
                          "conv3_3");
    const int d41 =
        b.act(b.deconv("deconv4_1", s.deconv4_1, c31, 5, 5, 4, 1, 27, 27, c33),
              "deconv4_1");
    const int d42 =
        b.act(b.deconv("deconv4_2", s.deconv4_2, c32, 5, 5, 2, 1, 27, 27, c33),
              "deconv4_2");
    const int cat = b.concat("concat4", {d41, d42, c33});
    const int c4 = b.act(b.norm("conv4:norm", s.conv4_norm,
                                b.conv("conv4", s.conv4, cat, 3, 3, 1, 1, 81, 81)),
                         "conv4");
    // Angular upsampling head: stride [1, alpha_s], no activation.
    return b.deconv("deconv5", s.deconv5, c4, 9, 9, 1, alpha_s, 81, 27, c4, alpha_s);
}

// Table 3 wiring. Returns the conv7 node (1 channel, no trailing activation).
int append_fusion_branch(Graph& g, int input_node, int num_shears, double leaky) {
    B b{&g, "", leaky};

    const int s11 = conv_slot(g, "f:conv1_1", 1, 1, 27 * num_shears, 27);
    const int s12 = conv_slot(g, "f:conv1_2", 3, 3, 27, 54);
    const int s21 = conv_slot(g, "f:conv2_1", 3, 3, 54, 54);
    const int s22 = conv_slot(g, "f:conv2_2", 3, 3, 54, 54);
    const int s31 = conv_slot(g, "f:conv3_1", 3, 3, 54, 54);
    const int s4 = conv_slot(g, "f:conv4", 3, 3, 54, 54);
    const int s51 = conv_slot(g, "f:deconv5_1", 5, 5, 54, 54);
    const int s52 = conv_slot(g, "f:conv5_2", 1, 1, 108, 54);
    const int s61 = conv_slot(g, "f:deconv6_1", 5, 5, 54, 27);
    const int s62 = conv_slot(g, "f:conv6_2", 1, 1, 54, 27);
    const int s7 = conv_slot(g, "f:conv7", 9, 9, 27, 1);

    const int c11 = b.act(
        b.conv("f:conv1_1", s11, input_node, 1, 1, 1, 1, 27 * num_shears, 27),
        "f:conv1_1");
    const int c12 = b.act(b.conv("f:conv1_2", s12, c11, 3, 3, 2, 1, 27, 54), "f:conv1_2");
    const int c21 = b.act(b.conv("f:conv2_1", s21, c12, 3, 3, 1, 1, 54, 54), "f:conv2_1");
    const int c22 = b.act(b.conv("f:conv2_2", s22, c21, 3, 3, 2, 1, 54, 54), "f:conv2_2");
    const int c31 = b.act(b.conv("f:conv3_1", s31, c22, 3, 3, 1, 1, 54, 54), "f:conv3_1");
    const int c4 = b.act(b.conv("f:conv4", s4, c31, 3, 3, 1, 1, 54, 54), "f:conv4");
    const int d51 = b.act(b.deconv("f:deconv5_1", s51, c4, 5, 5, 2, 1, 54, 54, c21),
                          "f:deconv5_1");
    const int c52 = b.act(
        b.conv("f:conv5_2", s52, b.concat("f:cat5", {d51, c21}), 1, 1, 1, 1, 108, 54),
        "f:conv5_2");
    const int d61 = b.act(b.deconv("f:deconv6_1", s61, c52, 5, 5, 2, 1, 54, 27, c11),
                          "f:deconv6_1");
    const int c62 = b.act(
        b.conv("f:conv6_2", s62, b.concat("f:cat6", {d61, c11}), 1, 1, 1, 1, 54, 27),
        "f:conv6_2");
    return b.conv("f:conv7", s7, c62, 9, 9, 1, 1, 27, 1);
}

} // namespace

Graph build_reconstruction_net(int alpha_s) {
    if (alpha_s != 3 && alpha_s != 4)
        throw ValidationError("build_reconstruction_net: alpha_s must be 3 or 4");
    Graph g;
    LayerSpec in;
    in.name = "input";
    in.kind = LayerKind::Input;
    in.ch_in = in.ch_out = 1;
    g.input = g.add(in);
    const ReconSlots slots = make_recon_slots(g);
    g.output = append_recon_branch(g, g.input, alpha_s, slots, "", 0.2);
    return g;
}

Graph build_fusion_net(int num_shears) {
    if (num_shears < 1) throw ValidationError("build_fusion_net: num_shears must be >= 1");
    Graph g;
    LayerSpec in;
    in.name = "input";
    in.kind = LayerKind::Input;
    in.ch_in = in.ch_out = 27 * num_shears;
    g.input = g.add(in);
    g.output = append_fusion_branch(g, g.input, num_shears, 0.2);
    return g;
}

Graph build_da2n(const Da2nConfig& cfg) {
    if (cfg.alpha_s != 3 && cfg.alpha_s != 4)
        throw ValidationError("build_da2n: alpha_s must be 3 or 4");
    if (cfg.shears.empty()) throw ValidationError("build_da2n: shears must be non-empty");

    Graph g;
    LayerSpec in;
    in.name = "input";
    in.kind = LayerKind::Input;
    in.ch_in = in.ch_out = 1;
    g.input = g.add(in);

    const ReconSlots slots = make_recon_slots(g);
    std::vector<int> branch_outputs;
    for (size_t i = 0; i < cfg.shears.size(); ++i) {
        const std::string sfx = "@" + std::to_string(i);

        LayerSpec sh;
        sh.name = "shear" + sfx;
        sh.kind = LayerKind::Shear;
        sh.alpha = cfg.shears[i];
        sh.inputs = {g.input};
        const int sheared = g.add(sh);

        const int feat =
            append_recon_branch(g, sheared, cfg.alpha_s, slots, sfx, cfg.leaky);

        LayerSpec un;
        un.name = "unshear" + sfx;
        un.kind = LayerKind::Shear;
        un.alpha = -cfg.shears[i] / cfg.alpha_s;
        un.unshear_alpha_s = cfg.alpha_s;
        un.inputs = {feat};
        branch_outputs.push_back(g.add(un));
    }

    int fused_in;
    if (branch_outputs.size() == 1) {
        fused_in = branch_outputs[0];
    } else {
        LayerSpec cat;
        cat.name = "concat_shears";
        cat.kind = LayerKind::Concat;
        cat.inputs = branch_outputs;
        fused_in = g.add(cat);
    }
    g.output =
        append_fusion_branch(g, fused_in, static_cast<int>(cfg.shears.size()), cfg.leaky);
    return g;
}

Epi danet_reconstruct(const Graph& g, NetworkParams& params, const Epi& input) {
    const Tensor3 out = forward(g, params, Tensor3::from_grid(input.samples), false);
    if (out.channels() != 1)
        throw ValidationError("danet_reconstruct: graph output is not single-channel");
    return Epi(out.channel(0), input.provenance);
}

} // namespace lfaa::danet
