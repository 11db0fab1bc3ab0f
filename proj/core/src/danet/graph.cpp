#include "lfaa/danet/graph.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "lfaa/spectral.hpp"

namespace lfaa::danet {

namespace {
constexpr double kNormEps = 1e-5;
constexpr double kNormMomentum = 0.9;
} // namespace

const char* kind_name(LayerKind k) {
    switch (k) {
    case LayerKind::Input: return "input";
    case LayerKind::Conv2d: return "conv2d";
    case LayerKind::Deconv2d: return "deconv2d";
    case LayerKind::Prefilter1d: return "prefilter1d";
    case LayerKind::Shear: return "shear";
    case LayerKind::Concat: return "concat";
    case LayerKind::Subtract: return "subtract";
    case LayerKind::LeakyRelu: return "leaky_relu";
    case LayerKind::Norm: return "norm";
    }
    return "?";
}

int Graph::add(LayerSpec spec) {
    const int id = static_cast<int>(nodes.size());
    for (int i : spec.inputs)
        if (i < 0 || i >= id)
            throw ValidationError("Graph: node " + spec.name + " references node " +
                                  std::to_string(i) + " out of order");
    // Channel arithmetic.
    int in_ch = 0;
    for (int i : spec.inputs) in_ch += nodes[i].ch_out;
    switch (spec.kind) {
    case LayerKind::Input:
        if (!spec.inputs.empty()) throw ValidationError("Graph: input node has inputs");
        break;
    case LayerKind::Conv2d:
    case LayerKind::Deconv2d:
    case LayerKind::Prefilter1d:
        if (spec.inputs.size() != 1)
            throw ValidationError("Graph: " + spec.name + " needs exactly one input");
        if (in_ch != spec.ch_in)
            throw ValidationError("Graph: " + spec.name + " channel mismatch");
        if (spec.kind == LayerKind::Prefilter1d && spec.ch_out != 2 * spec.ch_in)
            throw ValidationError("Graph: prefilter emits 2 variants per channel");
        break;
    case LayerKind::Concat:
        if (spec.inputs.size() < 2)
            throw ValidationError("Graph: concat needs >= 2 inputs");
        spec.ch_in = spec.ch_out = in_ch;
        break;
    case LayerKind::Subtract:
        if (spec.inputs.size() != 2 ||
            nodes[spec.inputs[0]].ch_out != nodes[spec.inputs[1]].ch_out)
            throw ValidationError("Graph: subtract needs two same-channel inputs");
        spec.ch_in = spec.ch_out = nodes[spec.inputs[0]].ch_out;
        break;
    case LayerKind::Shear:
    case LayerKind::LeakyRelu:
    case LayerKind::Norm:
        if (spec.inputs.size() != 1)
            throw ValidationError("Graph: " + spec.name + " needs exactly one input");
        spec.ch_in = spec.ch_out = in_ch;
        break;
    }
    nodes.push_back(std::move(spec));
    return id;
}

int Graph::add_slot(ParamSlot slot) {
    slots.push_back(std::move(slot));
    return static_cast<int>(slots.size()) - 1;
}

size_t NetworkParams::count() const {
    size_t n = 0;
    for (const auto& v : w) n += v.size();
    for (const auto& v : b) n += v.size();
    return n;
}

bool NetworkParams::finite() const {
    const auto ok = [](const std::vector<std::vector<double>>& vv) {
        for (const auto& v : vv)
            for (double x : v)
                if (!std::isfinite(x)) return false;
        return true;
    };
    return ok(w) && ok(b) && ok(running_mean) && ok(running_var);
}

std::vector<std::vector<double>> init_prefilter_layer(double sigma_max, int channels,
                                                      int length) {
    if (channels < 1) throw ValidationError("init_prefilter_layer: channels must be >= 1");
    if (length < 1 || length % 2 == 0)
        throw ValidationError("init_prefilter_layer: length must be odd and >= 1");
    if (sigma_max < 0.0)
        throw ValidationError("init_prefilter_layer: sigma_max must be >= 0");
    std::vector<std::vector<double>> kernels;
    for (int c = 0; c < channels; ++c) {
        const double sigma =
            channels == 1 ? 0.0 : sigma_max * c / (channels - 1.0);
        kernels.push_back(gaussian_kernel(sigma, length / 2));
    }
    return kernels;
}

NetworkParams init_params(const Graph& g, uint64_t seed) {
    NetworkParams p;
    p.w.resize(g.slots.size());
    p.b.resize(g.slots.size());
    p.running_mean.resize(g.slots.size());
    p.running_var.resize(g.slots.size());
    for (size_t i = 0; i < g.slots.size(); ++i) {
        const ParamSlot& s = g.slots[i];
        p.w[i].assign(s.w_size, 0.0);
        p.b[i].assign(s.b_size, 0.0);
        if (s.norm) {
            std::fill(p.w[i].begin(), p.w[i].end(), 1.0); // gain
            p.running_mean[i].assign(s.channels, 0.0);
            p.running_var[i].assign(s.channels, 1.0);
        } else if (s.prefilter) {
            const auto kernels =
                init_prefilter_layer(s.pf_sigma_max, s.pf_channels, s.pf_length);
            if (kernels.size() * kernels[0].size() != s.w_size)
                throw ValidationError("init_params: prefilter slot size mismatch");
            size_t k = 0;
            for (const auto& ker : kernels)
                for (double t : ker) p.w[i][k++] = t;
        } else {
            std::mt19937_64 rng(seed * 0x9e3779b97f4a7c15ULL + i);
            std::normal_distribution<double> dist(0.0, 1e-3);
            for (double& x : p.w[i]) x = dist(rng);
        }
    }
    return p;
}

void Gradients::init_like(const NetworkParams& p) {
    w.resize(p.w.size());
    b.resize(p.b.size());
    for (size_t i = 0; i < p.w.size(); ++i) w[i].assign(p.w[i].size(), 0.0);
    for (size_t i = 0; i < p.b.size(); ++i) b[i].assign(p.b[i].size(), 0.0);
}

void Gradients::accumulate(const Gradients& o) {
    for (size_t i = 0; i < w.size(); ++i)
        for (size_t j = 0; j < w[i].size(); ++j) w[i][j] += o.w[i][j];
    for (size_t i = 0; i < b.size(); ++i)
        for (size_t j = 0; j < b[i].size(); ++j) b[i][j] += o.b[i][j];
}

namespace {

struct ConvGeom {
    int out_s, out_u, pad_s, pad_u;
};

ConvGeom conv_geometry(const LayerSpec& n, int in_s, int in_u) {
    ConvGeom g;
    g.out_s = (in_s + n.str_s - 1) / n.str_s;
    g.out_u = (in_u + n.str_u - 1) / n.str_u;
    g.pad_s = std::max((g.out_s - 1) * n.str_s + n.k_s - in_s, 0) / 2;
    g.pad_u = std::max((g.out_u - 1) * n.str_u + n.k_u - in_u, 0) / 2;
    return g;
}

size_t widx(const LayerSpec& n, int co, int ks, int ku, int ci) {
    return ((static_cast<size_t>(co) * n.k_s + ks) * n.k_u + ku) * n.ch_in + ci;
}

Tensor3 conv2d_forward(const LayerSpec& n, const std::vector<double>& w,
                       const std::vector<double>& b, const Tensor3& x) {
    const ConvGeom g = conv_geometry(n, x.rows(), x.cols());
    Tensor3 out(g.out_s, g.out_u, n.ch_out);
    for (int os = 0; os < g.out_s; ++os)
        for (int ou = 0; ou < g.out_u; ++ou)
            for (int co = 0; co < n.ch_out; ++co) {
                double acc = b[co];
                for (int ks = 0; ks < n.k_s; ++ks) {
                    const int is = os * n.str_s - g.pad_s + ks;
                    if (is < 0 || is >= x.rows()) continue;
                    for (int ku = 0; ku < n.k_u; ++ku) {
                        const int iu = ou * n.str_u - g.pad_u + ku;
                        if (iu < 0 || iu >= x.cols()) continue;
                        const double* wp = &w[widx(n, co, ks, ku, 0)];
                        for (int ci = 0; ci < n.ch_in; ++ci)
                            acc += wp[ci] * x(is, iu, ci);
                    }
                }
                out(os, ou, co) = acc;
            }
    return out;
}

void conv2d_backward(const LayerSpec& n, const std::vector<double>& w, const Tensor3& x,
                     const Tensor3& dout, Tensor3& dx, std::vector<double>& dw,
                     std::vector<double>& db) {
    const ConvGeom g = conv_geometry(n, x.rows(), x.cols());
    for (int os = 0; os < g.out_s; ++os)
        for (int ou = 0; ou < g.out_u; ++ou)
            for (int co = 0; co < n.ch_out; ++co) {
                const double d = dout(os, ou, co);
                db[co] += d;
                for (int ks = 0; ks < n.k_s; ++ks) {
                    const int is = os * n.str_s - g.pad_s + ks;
                    if (is < 0 || is >= x.rows()) continue;
                    for (int ku = 0; ku < n.k_u; ++ku) {
                        const int iu = ou * n.str_u - g.pad_u + ku;
                        if (iu < 0 || iu >= x.cols()) continue;
                        double* dwp = &dw[widx(n, co, ks, ku, 0)];
                        const double* wp = &w[widx(n, co, ks, ku, 0)];
                        for (int ci = 0; ci < n.ch_in; ++ci) {
                            dwp[ci] += d * x(is, iu, ci);
                            dx(is, iu, ci) += d * wp[ci];
                        }
                    }
                }
            }
}

struct DeconvGeom {
    int out_s, out_u, crop_s, crop_u;
};

DeconvGeom deconv_geometry(const LayerSpec& n, int in_s, int in_u, int target_s,
                           int target_u) {
    const int full_s = (in_s - 1) * n.str_s + n.k_s;
    const int full_u = (in_u - 1) * n.str_u + n.k_u;
    if (full_s < target_s || full_u < target_u)
        throw ValidationError("Graph: deconv " + n.name +
                              " cannot reach its target output size");
    return {target_s, target_u, (full_s - target_s) / 2, (full_u - target_u) / 2};
}

Tensor3 deconv2d_forward(const LayerSpec& n, const std::vector<double>& w,
                         const std::vector<double>& b, const Tensor3& x, int target_s,
                         int target_u) {
    const DeconvGeom g = deconv_geometry(n, x.rows(), x.cols(), target_s, target_u);
    Tensor3 out(g.out_s, g.out_u, n.ch_out);
    for (int os = 0; os < g.out_s; ++os)
        for (int ou = 0; ou < g.out_u; ++ou)
            for (int co = 0; co < n.ch_out; ++co) out(os, ou, co) = b[co];
    for (int is = 0; is < x.rows(); ++is)
        for (int iu = 0; iu < x.cols(); ++iu)
            for (int ks = 0; ks < n.k_s; ++ks) {
                const int os = is * n.str_s + ks - g.crop_s;
                if (os < 0 || os >= g.out_s) continue;
                for (int ku = 0; ku < n.k_u; ++ku) {
                    const int ou = iu * n.str_u + ku - g.crop_u;
                    if (ou < 0 || ou >= g.out_u) continue;
                    for (int co = 0; co < n.ch_out; ++co) {
                        const double* wp = &w[widx(n, co, ks, ku, 0)];
                        double acc = 0.0;
                        for (int ci = 0; ci < n.ch_in; ++ci)
                            acc += wp[ci] * x(is, iu, ci);
                        out(os, ou, co) += acc;
                    }
                }
            }
    return out;
}

void deconv2d_backward(const LayerSpec& n, const std::vector<double>& w, const Tensor3& x,
                       const Tensor3& dout, Tensor3& dx, std::vector<double>& dw,
                       std::vector<double>& db) {
    const DeconvGeom g = deconv_geometry(n, x.rows(), x.cols(), dout.rows(), dout.cols());
    for (int os = 0; os < g.out_s; ++os)
        for (int ou = 0; ou < g.out_u; ++ou)
            for (int co = 0; co < n.ch_out; ++co) db[co] += dout(os, ou, co);
    for (int is = 0; is < x.rows(); ++is)
        for (int iu = 0; iu < x.cols(); ++iu)
            for (int ks = 0; ks < n.k_s; ++ks) {
                const int os = is * n.str_s + ks - g.crop_s;
                if (os < 0 || os >= g.out_s) continue;
                for (int ku = 0; ku < n.k_u; ++ku) {
                    const int ou = iu * n.str_u + ku - g.crop_u;
                    if (ou < 0 || ou >= g.out_u) continue;
                    for (int co = 0; co < n.ch_out; ++co) {
                        const double d = dout(os, ou, co);
                        const double* wp = &w[widx(n, co, ks, ku, 0)];
                        double* dwp = &dw[widx(n, co, ks, ku, 0)];
                        for (int ci = 0; ci < n.ch_in; ++ci) {
                            dwp[ci] += d * x(is, iu, ci);
                            dx(is, iu, ci) += d * wp[ci];
                        }
                    }
                }
            }
}

Tensor3 prefilter_forward(const LayerSpec& n, const std::vector<double>& w,
                          const Tensor3& x) {
    const int hw = n.k_u / 2, L = n.k_u;
    Tensor3 out(x.rows(), x.cols(), n.ch_out);
    for (int s = 0; s < x.rows(); ++s)
        for (int u = 0; u < x.cols(); ++u)
            for (int g = 0; g < n.ch_in; ++g)
                for (int m = 0; m < 2; ++m) {
                    const int co = 2 * g + m;
                    double acc = 0.0;
                    for (int t = 0; t < L; ++t) {
                        const int iu = u + t - hw;
                        if (iu < 0 || iu >= x.cols()) continue; // zero padding
                        acc += w[static_cast<size_t>(co) * L + t] * x(s, iu, g);
                    }
                    out(s, u, co) = acc;
                }
    return out;
}

void prefilter_backward(const LayerSpec& n, const std::vector<double>& w, const Tensor3& x,
                        const Tensor3& dout, Tensor3& dx, std::vector<double>& dw) {
    const int hw = n.k_u / 2, L = n.k_u;
    for (int s = 0; s < x.rows(); ++s)
        for (int u = 0; u < x.cols(); ++u)
            for (int g = 0; g < n.ch_in; ++g)
                for (int m = 0; m < 2; ++m) {
                    const int co = 2 * g + m;
                    const double d = dout(s, u, co);
                    for (int t = 0; t < L; ++t) {
                        const int iu = u + t - hw;
                        if (iu < 0 || iu >= x.cols()) continue;
                        dw[static_cast<size_t>(co) * L + t] += d * x(s, iu, g);
                        dx(s, iu, g) += d * w[static_cast<size_t>(co) * L + t];
                    }
                }
}

double shear_center(const LayerSpec& n, int rows) {
    if (n.unshear_alpha_s > 0) {
        const int as = n.unshear_alpha_s;
        if ((rows + as - 1) % as != 0)
            throw ValidationError("Graph: unshear " + n.name +
                                  " row count incompatible with alpha_s");
        return 0.5 * as * ((rows + as - 1) / as);
    }
    return 0.5 * rows;
}

Tensor3 shear_forward(const LayerSpec& n, const Tensor3& x) {
    const double center = shear_center(n, x.rows());
    Tensor3 out(x.rows(), x.cols(), x.channels());
    for (int s = 0; s < x.rows(); ++s) {
        const double shift = (s - center) * n.alpha;
        for (int u = 0; u < x.cols(); ++u) {
            const double src = u + shift;
            const int i0 = static_cast<int>(std::floor(src));
            const double f = src - i0;
            for (int c = 0; c < x.channels(); ++c) {
                double v = 0.0;
                if (i0 >= 0 && i0 < x.cols()) v += (1.0 - f) * x(s, i0, c);
                if (i0 + 1 >= 0 && i0 + 1 < x.cols()) v += f * x(s, i0 + 1, c);
                out(s, u, c) = v;
            }
        }
    }
    return out;
}

void shear_backward(const LayerSpec& n, const Tensor3& x, const Tensor3& dout,
                    Tensor3& dx) {
    const double center = shear_center(n, x.rows());
    for (int s = 0; s < x.rows(); ++s) {
        const double shift = (s - center) * n.alpha;
        for (int u = 0; u < x.cols(); ++u) {
            const double src = u + shift;
            const int i0 = static_cast<int>(std::floor(src));
            const double f = src - i0;
            for (int c = 0; c < x.channels(); ++c) {
                const double d = dout(s, u, c);
                if (i0 >= 0 && i0 < x.cols()) dx(s, i0, c) += (1.0 - f) * d;
                if (i0 + 1 >= 0 && i0 + 1 < x.cols()) dx(s, i0 + 1, c) += f * d;
            }
        }
    }
}

} // namespace

Tensor3 forward(const Graph& g, NetworkParams& params, const Tensor3& input,
                bool training, ForwardCache* cache) {
    if (g.input < 0 || g.output < 0) throw ValidationError("forward: graph incomplete");
    if (input.channels() != g.nodes[g.input].ch_out)
        throw ValidationError("forward: input channel mismatch");
    if (!input.finite()) throw NumericalError("forward: non-finite input");

    std::vector<Tensor3> acts(g.nodes.size());
    std::vector<Tensor3> pre(g.nodes.size());
    for (size_t i = 0; i < g.nodes.size(); ++i) {
        const LayerSpec& n = g.nodes[i];
        Tensor3 out;
        switch (n.kind) {
        case LayerKind::Input:
            out = input;
            break;
        case LayerKind::Conv2d:
            out = conv2d_forward(n, params.w[n.slot], params.b[n.slot],
                                 acts[n.inputs[0]]);
            break;
        case LayerKind::Deconv2d: {
            const Tensor3& x = acts[n.inputs[0]];
            int ts, tu;
            if (n.match_node >= 0) {
                ts = acts[n.match_node].rows();
                tu = acts[n.match_node].cols();
            } else {
                ts = x.rows() * n.str_s;
                tu = x.cols() * n.str_u;
            }
            if (n.angular_expand > 0)
                ts = n.angular_expand * acts[g.input].rows() - (n.angular_expand - 1);
            out = deconv2d_forward(n, params.w[n.slot], params.b[n.slot], x, ts, tu);
            break;
        }
        case LayerKind::Prefilter1d:
            out = prefilter_forward(n, params.w[n.slot], acts[n.inputs[0]]);
            break;
        case LayerKind::Shear:
            out = shear_forward(n, acts[n.inputs[0]]);
            break;
        case LayerKind::Concat: {
            const Tensor3& first = acts[n.inputs[0]];
            out = Tensor3(first.rows(), first.cols(), n.ch_out);
            int off = 0;
            for (int idx : n.inputs) {
                const Tensor3& x = acts[idx];
                if (x.rows() != first.rows() || x.cols() != first.cols())
                    throw ValidationError("forward: concat shape mismatch at " + n.name);
                for (int s = 0; s < x.rows(); ++s)
                    for (int u = 0; u < x.cols(); ++u)
                        for (int c = 0; c < x.channels(); ++c)
                            out(s, u, off + c) = x(s, u, c);
                off += x.channels();
            }
            break;
        }
        case LayerKind::Subtract: {
            const Tensor3& a = acts[n.inputs[0]];
            const Tensor3& b = acts[n.inputs[1]];
            if (a.rows() != b.rows() || a.cols() != b.cols())
                throw ValidationError("forward: subtract shape mismatch at " + n.name);
            out = Tensor3(a.rows(), a.cols(), a.channels());
            for (size_t j = 0; j < out.size(); ++j)
                out.data()[j] = a.data()[j] - b.data()[j];
            break;
        }
        case LayerKind::LeakyRelu: {
            const Tensor3& x = acts[n.inputs[0]];
            out = x;
            for (size_t j = 0; j < out.size(); ++j)
                if (out.data()[j] < 0.0) out.data()[j] *= n.slope;
            break;
        }
        case LayerKind::Norm: {
            const Tensor3& x = acts[n.inputs[0]];
            pre[i] = x;
            out = Tensor3(x.rows(), x.cols(), x.channels());
            const double count = static_cast<double>(x.rows()) * x.cols();
            for (int c = 0; c < x.channels(); ++c) {
                double mean, var;
                if (training) {
                    double m = 0.0;
                    for (int s = 0; s < x.rows(); ++s)
                        for (int u = 0; u < x.cols(); ++u) m += x(s, u, c);
                    mean = m / count;
                    double v = 0.0;
                    for (int s = 0; s < x.rows(); ++s)
                        for (int u = 0; u < x.cols(); ++u) {
                            const double d = x(s, u, c) - mean;
                            v += d * d;
                        }
                    var = v / count;
                    params.running_mean[n.slot][c] =
                        kNormMomentum * params.running_mean[n.slot][c] +
                        (1.0 - kNormMomentum) * mean;
                    params.running_var[n.slot][c] =
                        kNormMomentum * params.running_var[n.slot][c] +
                        (1.0 - kNormMomentum) * var;
                } else {
                    mean = params.running_mean[n.slot][c];
                    var = params.running_var[n.slot][c];
                }
                const double inv = 1.0 / std::sqrt(var + kNormEps);
                const double gain = params.w[n.slot][c], shift = params.b[n.slot][c];
                for (int s = 0; s < x.rows(); ++s)
                    for (int u = 0; u < x.cols(); ++u)
                        out(s, u, c) = gain * (x(s, u, c) - mean) * inv + shift;
            }
            break;
        }
        }
        if (!out.finite())
            throw NumericalError("forward: non-finite activation at layer " + n.name);
        acts[i] = std::move(out);
    }

    Tensor3 result = acts[g.output];
    if (cache) {
        cache->acts = std::move(acts);
        cache->pre = std::move(pre);
        cache->training = training;
    }
    return result;
}

Tensor3 backward(const Graph& g, const NetworkParams& params, const ForwardCache& cache,
                 const Tensor3& d_output, Gradients& grads) {
    if (cache.acts.size() != g.nodes.size())
        throw ValidationError("backward: cache does not match graph");
    if (grads.w.empty()) grads.init_like(params);

    std::vector<Tensor3> d(g.nodes.size());
    const auto ensure = [&](int i) {
        if (d[i].size() == 0)
            d[i] = Tensor3(cache.acts[i].rows(), cache.acts[i].cols(),
                           cache.acts[i].channels());
    };
    ensure(g.output);
    if (d_output.rows() != d[g.output].rows() || d_output.cols() != d[g.output].cols() ||
        d_output.channels() != d[g.output].channels())
        throw ValidationError("backward: d_output shape mismatch");
    d[g.output] = d_output;

    for (int i = static_cast<int>(g.nodes.size()) - 1; i >= 0; --i) {
        if (d[i].size() == 0) continue; // node did not influence the output
        const LayerSpec& n = g.nodes[i];
        const Tensor3& dout = d[i];
        switch (n.kind) {
        case LayerKind::Input:
            break;
        case LayerKind::Conv2d:
            ensure(n.inputs[0]);
            conv2d_backward(n, params.w[n.slot], cache.acts[n.inputs[0]], dout,
                            d[n.inputs[0]], grads.w[n.slot], grads.b[n.slot]);
            break;
        case LayerKind::Deconv2d:
            ensure(n.inputs[0]);
            deconv2d_backward(n, params.w[n.slot], cache.acts[n.inputs[0]], dout,
                              d[n.inputs[0]], grads.w[n.slot], grads.b[n.slot]);
            break;
        case LayerKind::Prefilter1d:
            ensure(n.inputs[0]);
            prefilter_backward(n, params.w[n.slot], cache.acts[n.inputs[0]], dout,
                               d[n.inputs[0]], grads.w[n.slot]);
            break;
        case LayerKind::Shear:
            ensure(n.inputs[0]);
            shear_backward(n, cache.acts[n.inputs[0]], dout, d[n.inputs[0]]);
            break;
        case LayerKind::Concat: {
            int off = 0;
            for (int idx : n.inputs) {
                ensure(idx);
                Tensor3& di = d[idx];
                for (int s = 0; s < di.rows(); ++s)
                    for (int u = 0; u < di.cols(); ++u)
                        for (int c = 0; c < di.channels(); ++c)
                            di(s, u, c) += dout(s, u, off + c);
                off += di.channels();
            }
            break;
        }
        case LayerKind::Subtract:
            ensure(n.inputs[0]);
            ensure(n.inputs[1]);
            for (size_t j = 0; j < dout.size(); ++j) {
                d[n.inputs[0]].data()[j] += dout.data()[j];
                d[n.inputs[1]].data()[j] -= dout.data()[j];
            }
            break;
        case LayerKind::LeakyRelu: {
            ensure(n.inputs[0]);
            const Tensor3& x = cache.acts[n.inputs[0]];
            for (size_t j = 0; j < dout.size(); ++j)
                d[n.inputs[0]].data()[j] +=
                    dout.data()[j] * (x.data()[j] >= 0.0 ? 1.0 : n.slope);
            break;
        }
        case LayerKind::Norm: {
            ensure(n.inputs[0]);
            const Tensor3& x = cache.pre[i];
            Tensor3& dx = d[n.inputs[0]];
            const double count = static_cast<double>(x.rows()) * x.cols();
            for (int c = 0; c < x.channels(); ++c) {
                double mean, var;
                if (cache.training) {
                    double m = 0.0;
                    for (int s = 0; s < x.rows(); ++s)
                        for (int u = 0; u < x.cols(); ++u) m += x(s, u, c);
                    mean = m / count;
                    double v = 0.0;
                    for (int s = 0; s < x.rows(); ++s)
                        for (int u = 0; u < x.cols(); ++u) {
                            const double dd = x(s, u, c) - mean;
                            v += dd * dd;
                        }
                    var = v / count;
                } else {
                    mean = params.running_mean[n.slot][c];
                    var = params.running_var[n.slot][c];
                }
                const double inv = 1.0 / std::sqrt(var + kNormEps);
                const double gain = params.w[n.slot][c];

                double sum_dy = 0.0, sum_dy_xhat = 0.0;
                for (int s = 0; s < x.rows(); ++s)
                    for (int u = 0; u < x.cols(); ++u) {
                        const double dy = dout(s, u, c);
                        const double xhat = (x(s, u, c) - mean) * inv;
                        sum_dy += dy;
                        sum_dy_xhat += dy * xhat;
                    }
                grads.b[n.slot][c] += sum_dy;
                grads.w[n.slot][c] += sum_dy_xhat;

                if (cache.training) {
                    for (int s = 0; s < x.rows(); ++s)
                        for (int u = 0; u < x.cols(); ++u) {
                            const double dy = dout(s, u, c);
                            const double xhat = (x(s, u, c) - mean) * inv;
                            dx(s, u, c) += gain * inv *
                                           (dy - sum_dy / count - xhat * sum_dy_xhat / count);
                        }
                } else {
                    for (int s = 0; s < x.rows(); ++s)
                        for (int u = 0; u < x.cols(); ++u)
                            dx(s, u, c) += dout(s, u, c) * gain * inv;
                }
            }
            break;
        }
        }
    }
    if (d[g.input].size() == 0) ensure(g.input);
    return d[g.input];
}

double loss_l1(const Tensor3& pred, const Tensor3& label) {
    if (pred.rows() != label.rows() || pred.cols() != label.cols() ||
        pred.channels() != label.channels())
        throw ValidationError("loss_l1: shape mismatch");
    double acc = 0.0;
    for (size_t j = 0; j < pred.size(); ++j)
        acc += std::abs(pred.data()[j] - label.data()[j]);
    return acc / static_cast<double>(pred.size());
}

Tensor3 loss_l1_grad(const Tensor3& pred, const Tensor3& label) {
    if (pred.rows() != label.rows() || pred.cols() != label.cols() ||
        pred.channels() != label.channels())
        throw ValidationError("loss_l1_grad: shape mismatch");
    Tensor3 g(pred.rows(), pred.cols(), pred.channels());
    const double inv = 1.0 / static_cast<double>(pred.size());
    for (size_t j = 0; j < pred.size(); ++j) {
        const double diff = pred.data()[j] - label.data()[j];
        g.data()[j] = diff > 0.0 ? inv : (diff < 0.0 ? -inv : 0.0);
    }
    return g;
}

} // namespace lfaa::danet
