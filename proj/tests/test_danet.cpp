#include <doctest.h>

#include <cmath>
#include <random>

#include "lfaa/danet/network.hpp"
#include "lfaa/danet/train.hpp"
#include "lfaa/synth.hpp"

using namespace lfaa;
using namespace lfaa::danet;

namespace {
const LayerSpec* find_node(const Graph& g, const std::string& name) {
    for (const auto& n : g.nodes)
        if (n.name == name) return &n;
    return nullptr;
}

int find_index(const Graph& g, const std::string& name) {
    for (size_t i = 0; i < g.nodes.size(); ++i)
        if (g.nodes[i].name == name) return static_cast<int>(i);
    return -1;
}

struct Row {
    const char* name;
    LayerKind kind;
    int k, str_u, str_s, ci, co;
};

void check_rows(const Graph& g, const std::vector<Row>& rows) {
    for (const auto& r : rows) {
        CAPTURE(r.name);
        const LayerSpec* n = find_node(g, r.name);
        REQUIRE(n != nullptr);
        CHECK(n->kind == r.kind);
        CHECK(n->k_u == r.k);
        if (n->kind != LayerKind::Prefilter1d) CHECK(n->k_s == r.k);
        CHECK(n->str_u == r.str_u);
        CHECK(n->str_s == r.str_s);
        CHECK(n->ch_in == r.ci);
        CHECK(n->ch_out == r.co);
    }
}
} // namespace

TEST_CASE("reconstruction net matches the layer table") {
    Graph g = build_reconstruction_net(3);
    check_rows(g, {
        {"conv1_1", LayerKind::Conv2d, 5, 4, 1, 1, 10},
        {"conv1_2", LayerKind::Conv2d, 5, 2, 1, 1, 10},
        {"conv1_3", LayerKind::Conv2d, 5, 1, 1, 1, 10},
        {"deconv2_1", LayerKind::Deconv2d, 3, 2, 1, 10, 10},
        {"deconv2_2", LayerKind::Deconv2d, 5, 2, 1, 10, 10},
        {"conv2_1", LayerKind::Prefilter1d, 5, 1, 1, 10, 20},
        {"conv2_2", LayerKind::Prefilter1d, 11, 1, 1, 10, 20},
        {"conv2_3", LayerKind::Prefilter1d, 21, 1, 1, 10, 20},
        {"conv3_1", LayerKind::Conv2d, 3, 1, 1, 20, 27},
        {"conv3_2", LayerKind::Conv2d, 3, 1, 1, 20, 27},
        {"conv3_3", LayerKind::Conv2d, 3, 1, 1, 20, 27},
        {"deconv4_1", LayerKind::Deconv2d, 5, 4, 1, 27, 27},
        {"deconv4_2", LayerKind::Deconv2d, 5, 2, 1, 27, 27},
        {"conv4", LayerKind::Conv2d, 3, 1, 1, 81, 81},
        {"deconv5", LayerKind::Deconv2d, 9, 1, 3, 81, 27},
    });
    const LayerSpec* d5 = find_node(g, "deconv5");
    CHECK(d5->angular_expand == 3);
    const LayerSpec* norm = find_node(g, "conv4:norm");
    REQUIRE(norm != nullptr);
    CHECK(norm->kind == LayerKind::Norm);
    CHECK(g.slots[norm->slot].channels == 81);

    CHECK(find_node(build_reconstruction_net(4), "deconv5")->str_s == 4);
    CHECK_THROWS_AS((void)build_reconstruction_net(2), ValidationError);
}

TEST_CASE("fusion net matches the layer table") {
    Graph g = build_fusion_net(7);
    check_rows(g, {
        {"f:conv1_1", LayerKind::Conv2d, 1, 1, 1, 189, 27},
        {"f:conv1_2", LayerKind::Conv2d, 3, 2, 1, 27, 54},
        {"f:conv2_1", LayerKind::Conv2d, 3, 1, 1, 54, 54},
        {"f:conv2_2", LayerKind::Conv2d, 3, 2, 1, 54, 54},
        {"f:conv3_1", LayerKind::Conv2d, 3, 1, 1, 54, 54},
        {"f:conv4", LayerKind::Conv2d, 3, 1, 1, 54, 54},
        {"f:deconv5_1", LayerKind::Deconv2d, 5, 2, 1, 54, 54},
        {"f:conv5_2", LayerKind::Conv2d, 1, 1, 1, 108, 54},
        {"f:deconv6_1", LayerKind::Deconv2d, 5, 2, 1, 54, 27},
        {"f:conv6_2", LayerKind::Conv2d, 1, 1, 1, 54, 27},
        {"f:conv7", LayerKind::Conv2d, 9, 1, 1, 27, 1},
    });
    CHECK_THROWS_AS((void)build_fusion_net(0), ValidationError);
}

TEST_CASE("forward shapes: recon branch and full network") {
    Epi input = render_epi({{36.0, 1.0, 0.8, 2.5, 0.0, 0.0, 0}}, 6, 72);

    Graph r3 = build_reconstruction_net(3);
    NetworkParams p3 = init_params(r3, 1);
    Tensor3 out3 = forward(r3, p3, Tensor3::from_grid(input.samples));
    CHECK(out3.rows() == 16);
    CHECK(out3.cols() == 72);
    CHECK(out3.channels() == 27);

    Graph r4 = build_reconstruction_net(4);
    NetworkParams p4 = init_params(r4, 1);
    Tensor3 out4 = forward(r4, p4, Tensor3::from_grid(input.samples));
    CHECK(out4.rows() == 21);
    CHECK(out4.channels() == 27);

    Graph full = build_da2n({3, {-3, 0, 3}, 0.2});
    CHECK(find_node(full, "f:conv1_1")->ch_in == 81);
    NetworkParams pf = init_params(full, 1);
    Epi recon = danet_reconstruct(full, pf, input);
    CHECK(recon.angular() == 16);
    CHECK(recon.spatial() == 72);
}

TEST_CASE("prefilter initialization: normalized Gaussian ladder") {
    auto kernels = init_prefilter_layer(21 / 8.0, 20, 21);
    REQUIRE(kernels.size() == 20);
    // Channel 0 is the impulse.
    CHECK(kernels[0][10] == 1.0);

    // Probe at omega = 1: at omega = pi the responses of the widest kernels sit
    // at the truncation noise floor and are no longer ordered.
    double prev_resp = 2.0;
    for (size_t c = 0; c < kernels.size(); ++c) {
        const auto& k = kernels[c];
        REQUIRE(k.size() == 21);
        double dc = 0.0, resp = 0.0;
        for (int t = -10; t <= 10; ++t) {
            dc += k[t + 10];
            resp += k[t + 10] * std::cos(1.0 * t);
        }
        CHECK(dc == doctest::Approx(1.0).epsilon(1e-12)); // unit DC gain
        // Wider sigma along the ladder attenuates high frequencies more.
        CHECK(resp <= prev_resp + 1e-12);
        prev_resp = resp;
    }
    CHECK_THROWS_AS((void)init_prefilter_layer(1.0, 4, 10), ValidationError);
    CHECK_THROWS_AS((void)init_prefilter_layer(-1.0, 4, 11), ValidationError);
}

TEST_CASE("zeroed parameters produce a zero output (bias plumbing)") {
    Graph g = build_reconstruction_net(3);
    NetworkParams p = init_params(g, 3);
    for (size_t i = 0; i < p.w.size(); ++i) {
        if (!g.slots[i].norm) std::fill(p.w[i].begin(), p.w[i].end(), 0.0);
        std::fill(p.b[i].begin(), p.b[i].end(), 0.0);
    }
    Epi input = render_epi({{20.0, 0.5, 0.7, 2.0, 0.0, 0.0, 0}}, 6, 40);
    Tensor3 out = forward(g, p, Tensor3::from_grid(input.samples));
    for (size_t j = 0; j < out.size(); ++j) CHECK(out.data()[j] == 0.0);
}

TEST_CASE("branches with equal shears share weights and activations") {
    Graph g = build_da2n({3, {2.0, 2.0}, 0.2});
    CHECK(find_node(g, "deconv5@0")->slot == find_node(g, "deconv5@1")->slot);

    NetworkParams p = init_params(g, 9);
    Epi input = render_epi({{24.0, 1.0, 0.8, 2.0, 0.0, 0.0, 0}}, 6, 48);
    ForwardCache cache;
    (void)forward(g, p, Tensor3::from_grid(input.samples), false, &cache);

    const int a = find_index(g, "unshear@0"), b = find_index(g, "unshear@1");
    REQUIRE(a >= 0);
    REQUIRE(b >= 0);
    const Tensor3& ta = cache.acts[a];
    const Tensor3& tb = cache.acts[b];
    REQUIRE(ta.size() == tb.size());
    for (size_t j = 0; j < ta.size(); ++j) CHECK(ta.data()[j] == tb.data()[j]);
}

TEST_CASE("integer shear node is an index permutation with zero fill") {
    Graph g;
    LayerSpec in;
    in.name = "input";
    in.kind = LayerKind::Input;
    g.input = g.add(in);
    LayerSpec sh;
    sh.name = "shear";
    sh.kind = LayerKind::Shear;
    sh.alpha = 1.0;
    sh.inputs = {g.input};
    g.output = g.add(sh);

    Tensor3 x(4, 8, 1);
    std::mt19937 rng(2);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    for (int s = 0; s < 4; ++s)
        for (int u = 0; u < 8; ++u) x(s, u, 0) = u01(rng);

    NetworkParams p = init_params(g, 1);
    Tensor3 y = forward(g, p, x);
    for (int s = 0; s < 4; ++s) {
        const int shift = s - 2; // center = rows/2
        for (int u = 0; u < 8; ++u) {
            const int src = u + shift;
            const double want = (src >= 0 && src < 8) ? x(s, src, 0) : 0.0;
            CHECK(y(s, u, 0) == doctest::Approx(want).epsilon(1e-12));
        }
    }
}

TEST_CASE("loss_l1 value and subgradient") {
    Tensor3 a(1, 2, 2), b(1, 2, 2);
    a(0, 0, 0) = 1.0;
    a(0, 1, 1) = -0.5;
    // b stays zero: |1| + |0| + |0| + |0.5| over 4 entries.
    CHECK(loss_l1(a, b) == doctest::Approx(0.375));
    Tensor3 g = loss_l1_grad(a, b);
    CHECK(g(0, 0, 0) == doctest::Approx(0.25));
    CHECK(g(0, 1, 1) == doctest::Approx(-0.25));
    CHECK(g(0, 0, 1) == 0.0);
    CHECK_THROWS_AS((void)loss_l1(a, Tensor3(1, 1, 2)), ValidationError);
}

TEST_CASE("training: zero steps is a no-op, traces are deterministic") {
    Graph g = build_da2n({3, {0.0}, 0.2});
    NetworkParams start = init_params(g, 17);

    TrainingSetConfig dcfg;
    dcfg.count_regular = 6;
    dcfg.input_views = 6;
    dcfg.width = 24;
    dcfg.alpha_s = 3;
    dcfg.d_min = -1.5;
    dcfg.d_max = 1.5;
    dcfg.seed = 2;
    TrainingSet data = make_training_set(dcfg);

    TrainConfig tcfg;
    tcfg.steps = 0;
    tcfg.batch = 1;
    TrainResult r0 = train(g, start, tcfg, data.phase1);
    CHECK(r0.loss_trace.empty());
    for (size_t i = 0; i < start.w.size(); ++i) CHECK(r0.params.w[i] == start.w[i]);

    tcfg.steps = 3;
    TrainResult a = train(g, start, tcfg, data.phase1);
    TrainResult b = train(g, start, tcfg, data.phase1);
    REQUIRE(a.loss_trace.size() == 3);
    for (int i = 0; i < 3; ++i) CHECK(a.loss_trace[i] == b.loss_trace[i]);
    for (size_t i = 0; i < a.params.w.size(); ++i) CHECK(a.params.w[i] == b.params.w[i]);

    TrainConfig bad;
    bad.batch = 0;
    CHECK_THROWS_AS(validate(bad), ValidationError);
    CHECK_THROWS_AS((void)train(g, start, tcfg, {}), ValidationError);
}
