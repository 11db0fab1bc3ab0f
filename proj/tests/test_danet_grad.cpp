#include <doctest.h>

#include <cmath>
#include <random>

#include "lfaa/danet/graph.hpp"

using namespace lfaa;
using namespace lfaa::danet;

namespace {

// Smooth scalar loss 0.5*sum (pred - label)^2 so central differences converge.
double sq_loss(const Graph& g, NetworkParams& p, const Tensor3& x, const Tensor3& label) {
    const Tensor3 pred = forward(g, p, x, true);
    double acc = 0.0;
    for (size_t j = 0; j < pred.size(); ++j) {
        const double d = pred.data()[j] - label.data()[j];
        acc += 0.5 * d * d;
    }
    return acc;
}

Tensor3 analytic(const Graph& g, NetworkParams& p, const Tensor3& x, const Tensor3& label,
                 Gradients& grads) {
    ForwardCache cache;
    const Tensor3 pred = forward(g, p, x, true, &cache);
    Tensor3 dout(pred.rows(), pred.cols(), pred.channels());
    for (size_t j = 0; j < pred.size(); ++j)
        dout.data()[j] = pred.data()[j] - label.data()[j];
    grads.init_like(p);
    return backward(g, p, cache, dout, grads);
}

void check_close(double a, double n, const char* what) {
    CAPTURE(what);
    CAPTURE(a);
    CAPTURE(n);
    CHECK(std::abs(a - n) <= 1e-6 + 1e-4 * (std::abs(a) + std::abs(n)));
}

// Central-difference check of every parameter and every input entry.
void check_gradients(Graph& g, NetworkParams p, const Tensor3& x, uint64_t label_seed) {
    const Tensor3 probe = forward(g, p, x, true);
    Tensor3 label(probe.rows(), probe.cols(), probe.channels());
    std::mt19937_64 rng(label_seed);
    std::uniform_real_distribution<double> u01(-0.5, 0.5);
    for (size_t j = 0; j < label.size(); ++j) label.data()[j] = u01(rng);

    Gradients grads;
    Tensor3 dx = analytic(g, p, x, label, grads);

    const double h = 1e-5;
    for (size_t i = 0; i < p.w.size(); ++i) {
        for (size_t j = 0; j < p.w[i].size(); ++j) {
            const double keep = p.w[i][j];
            p.w[i][j] = keep + h;
            const double lp = sq_loss(g, p, x, label);
            p.w[i][j] = keep - h;
            const double lm = sq_loss(g, p, x, label);
            p.w[i][j] = keep;
            check_close(grads.w[i][j], (lp - lm) / (2.0 * h), g.slots[i].name.c_str());
        }
        for (size_t j = 0; j < p.b[i].size(); ++j) {
            const double keep = p.b[i][j];
            p.b[i][j] = keep + h;
            const double lp = sq_loss(g, p, x, label);
            p.b[i][j] = keep - h;
            const double lm = sq_loss(g, p, x, label);
            p.b[i][j] = keep;
            check_close(grads.b[i][j], (lp - lm) / (2.0 * h), g.slots[i].name.c_str());
        }
    }

    Tensor3 xv = x;
    for (size_t j = 0; j < xv.size(); ++j) {
        const double keep = xv.data()[j];
        xv.data()[j] = keep + h;
        const double lp = sq_loss(g, p, xv, label);
        xv.data()[j] = keep - h;
        const double lm = sq_loss(g, p, xv, label);
        xv.data()[j] = keep;
        check_close(dx.data()[j], (lp - lm) / (2.0 * h), "d_input");
    }
}

Tensor3 random_input(int rows, int cols, int ch, uint64_t seed) {
    Tensor3 x(rows, cols, ch);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u01(0.1, 0.9);
    for (size_t j = 0; j < x.size(); ++j) x.data()[j] = u01(rng);
    return x;
}

NetworkParams random_params(const Graph& g, uint64_t seed) {
    NetworkParams p = init_params(g, seed);
    std::mt19937_64 rng(seed ^ 0xabcdef);
    std::normal_distribution<double> n(0.0, 0.3);
    for (size_t i = 0; i < p.w.size(); ++i) {
        if (g.slots[i].norm) continue; // keep gain 1, shift 0 as a starting point
        for (double& w : p.w[i]) w = n(rng);
        for (double& b : p.b[i]) b = 0.1 * n(rng);
    }
    return p;
}

int add_input(Graph& g, int channels) {
    LayerSpec in;
    in.name = "input";
    in.kind = LayerKind::Input;
    in.ch_in = in.ch_out = channels;
    g.input = g.add(in);
    return g.input;
}
} // namespace

TEST_CASE("gradcheck: strided conv with leaky relu") {
    Graph g;
    const int in = add_input(g, 2);
    ParamSlot s;
    s.name = "c";
    s.w_size = 3 * 3 * 3 * 2;
    s.b_size = 3;
    const int slot = g.add_slot(s);
    LayerSpec c;
    c.name = "c";
    c.kind = LayerKind::Conv2d;
    c.k_u = c.k_s = 3;
    c.str_u = 2;
    c.str_s = 1;
    c.ch_in = 2;
    c.ch_out = 3;
    c.slot = slot;
    c.inputs = {in};
    const int cn = g.add(c);
    LayerSpec a;
    a.name = "a";
    a.kind = LayerKind::LeakyRelu;
    a.slope = 0.2;
    a.inputs = {cn};
    g.output = g.add(a);

    check_gradients(g, random_params(g, 1), random_input(6, 8, 2, 10), 100);
}

TEST_CASE("gradcheck: deconv matched to a skip node, with subtract") {
    Graph g;
    const int in = add_input(g, 1);
    ParamSlot cs;
    cs.name = "down";
    cs.w_size = 3 * 3 * 2 * 1;
    cs.b_size = 2;
    const int cslot = g.add_slot(cs);
    LayerSpec c;
    c.name = "down";
    c.kind = LayerKind::Conv2d;
    c.k_u = c.k_s = 3;
    c.str_u = 2;
    c.str_s = 1;
    c.ch_in = 1;
    c.ch_out = 2;
    c.slot = cslot;
    c.inputs = {in};
    const int down = g.add(c);

    ParamSlot ds;
    ds.name = "up";
    ds.w_size = 3 * 3 * 1 * 2; // [co][ks][ku][ci], co=1 ci=2
    ds.b_size = 1;
    const int dslot = g.add_slot(ds);
    LayerSpec d;
    d.name = "up";
    d.kind = LayerKind::Deconv2d;
    d.k_u = d.k_s = 3;
    d.str_u = 2;
    d.str_s = 1;
    d.ch_in = 2;
    d.ch_out = 1;
    d.slot = dslot;
    d.match_node = in;
    d.inputs = {down};
    const int up = g.add(d);

    LayerSpec sub;
    sub.name = "residual";
    sub.kind = LayerKind::Subtract;
    sub.inputs = {in, up};
    g.output = g.add(sub);

    check_gradients(g, random_params(g, 2), random_input(5, 8, 1, 11), 101);
}

TEST_CASE("gradcheck: angular-expanding deconv") {
    Graph g;
    const int in = add_input(g, 1);
    ParamSlot ds;
    ds.name = "expand";
    ds.w_size = 3 * 5 * 2 * 1; // k_s=5, k_u=3
    ds.b_size = 2;
    const int dslot = g.add_slot(ds);
    LayerSpec d;
    d.name = "expand";
    d.kind = LayerKind::Deconv2d;
    d.k_u = 3;
    d.k_s = 5;
    d.str_u = 1;
    d.str_s = 3;
    d.ch_in = 1;
    d.ch_out = 2;
    d.slot = dslot;
    d.match_node = in;      // spatial size from the input
    d.angular_expand = 3;   // 3*S - 2 rows
    d.inputs = {in};
    g.output = g.add(d);

    Tensor3 x = random_input(4, 6, 1, 12);
    NetworkParams p = random_params(g, 3);
    Tensor3 out = forward(g, p, x);
    CHECK(out.rows() == 10);
    CHECK(out.cols() == 6);
    check_gradients(g, p, x, 102);
}

TEST_CASE("gradcheck: grouped 1d prefilter with concat") {
    Graph g;
    const int in = add_input(g, 2);
    ParamSlot ps;
    ps.name = "pf";
    ps.w_size = 4 * 5;
    ps.b_size = 0;
    ps.prefilter = true;
    ps.pf_length = 5;
    ps.pf_channels = 4;
    ps.pf_sigma_max = 5 / 8.0;
    const int pslot = g.add_slot(ps);
    LayerSpec pf;
    pf.name = "pf";
    pf.kind = LayerKind::Prefilter1d;
    pf.k_u = 5;
    pf.ch_in = 2;
    pf.ch_out = 4;
    pf.slot = pslot;
    pf.inputs = {in};
    const int pfn = g.add(pf);

    LayerSpec cat;
    cat.name = "cat";
    cat.kind = LayerKind::Concat;
    cat.inputs = {in, pfn};
    g.output = g.add(cat);

    NetworkParams p = init_params(g, 4);
    // Perturb the Gaussian ladder so the check is not at a special point.
    std::mt19937_64 rng(77);
    std::normal_distribution<double> n(0.0, 0.05);
    for (double& w : p.w[pslot]) w += n(rng);

    check_gradients(g, p, random_input(4, 9, 2, 13), 103);
}

TEST_CASE("gradcheck: batch norm in training mode") {
    Graph g;
    const int in = add_input(g, 2);
    ParamSlot ns;
    ns.name = "bn";
    ns.w_size = 2;
    ns.b_size = 2;
    ns.norm = true;
    ns.channels = 2;
    const int nslot = g.add_slot(ns);
    LayerSpec nn;
    nn.name = "bn";
    nn.kind = LayerKind::Norm;
    nn.slot = nslot;
    nn.inputs = {in};
    const int bn = g.add(nn);
    LayerSpec a;
    a.name = "a";
    a.kind = LayerKind::LeakyRelu;
    a.slope = 0.2;
    a.inputs = {bn};
    g.output = g.add(a);

    NetworkParams p = init_params(g, 5);
    p.w[nslot] = {1.3, 0.8};
    p.b[nslot] = {0.2, -0.1};
    check_gradients(g, p, random_input(5, 7, 2, 14), 104);
}

TEST_CASE("gradcheck: fractional shear passes gradients to the input") {
    Graph g;
    const int in = add_input(g, 1);
    LayerSpec sh;
    sh.name = "shear";
    sh.kind = LayerKind::Shear;
    sh.alpha = 0.5;
    sh.inputs = {in};
    g.output = g.add(sh);

    check_gradients(g, init_params(g, 6), random_input(4, 8, 1, 15), 105);
}
