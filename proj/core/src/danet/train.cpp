#include "lfaa/danet/train.hpp"

#include <cmath>
#include <random>
#include <string>

namespace lfaa::danet {

void validate(const TrainConfig& cfg) {
    if (cfg.lr_prefilter <= 0.0 || cfg.lr_rest <= 0.0)
        throw ValidationError("TrainConfig: learning rates must be > 0");
    if (cfg.batch < 1) throw ValidationError("TrainConfig: batch must be >= 1");
    if (cfg.steps < 0) throw ValidationError("TrainConfig: steps must be >= 0");
    if (cfg.beta1 <= 0.0 || cfg.beta1 >= 1.0 || cfg.beta2 <= 0.0 || cfg.beta2 >= 1.0)
        throw ValidationError("TrainConfig: betas must be in (0, 1)");
}

TrainResult train(const Graph& g, NetworkParams start, const TrainConfig& cfg,
                  const std::vector<PatchPair>& dataset) {
    validate(cfg);
    if (cfg.steps > 0 && dataset.empty())
        throw ValidationError("train: empty dataset");
    if (!start.finite()) throw NumericalError("train: non-finite starting parameters");

    TrainResult result;
    result.params = std::move(start);
    NetworkParams& p = result.params;

    // ADAM state, one accumulator pair per parameter.
    NetworkParams m, v;
    m.w.resize(p.w.size());
    m.b.resize(p.b.size());
    v.w.resize(p.w.size());
    v.b.resize(p.b.size());
    for (size_t i = 0; i < p.w.size(); ++i) {
        m.w[i].assign(p.w[i].size(), 0.0);
        v.w[i].assign(p.w[i].size(), 0.0);
        m.b[i].assign(p.b[i].size(), 0.0);
        v.b[i].assign(p.b[i].size(), 0.0);
    }

    std::mt19937_64 rng(cfg.seed);
    std::uniform_int_distribution<size_t> pick(0, dataset.empty() ? 0 : dataset.size() - 1);

    for (int step = 0; step < cfg.steps; ++step) {
        Gradients grads;
        grads.init_like(p);
        double loss = 0.0;
        for (int bi = 0; bi < cfg.batch; ++bi) {
            const PatchPair& pair = dataset[pick(rng)];
            ForwardCache cache;
            const Tensor3 input = Tensor3::from_grid(pair.input);
            const Tensor3 label = Tensor3::from_grid(pair.label);
            const Tensor3 pred = forward(g, p, input, true, &cache);
            loss += loss_l1(pred, label);
            backward(g, p, cache, loss_l1_grad(pred, label), grads);
        }
        loss /= cfg.batch;
        if (!std::isfinite(loss))
            throw NumericalError("train: loss diverged at step " + std::to_string(step) +
                                 " after " + std::to_string(result.loss_trace.size()) +
                                 " recorded steps");
        result.loss_trace.push_back(loss);

        const double inv_batch = 1.0 / cfg.batch;
        const double bc1 = 1.0 - std::pow(cfg.beta1, step + 1);
        const double bc2 = 1.0 - std::pow(cfg.beta2, step + 1);
        for (size_t i = 0; i < p.w.size(); ++i) {
            const double lr = g.slots[i].prefilter ? cfg.lr_prefilter : cfg.lr_rest;
            const auto update = [&](std::vector<double>& theta, std::vector<double>& gr,
                                    std::vector<double>& mi, std::vector<double>& vi) {
                for (size_t j = 0; j < theta.size(); ++j) {
                    const double grad = gr[j] * inv_batch;
                    mi[j] = cfg.beta1 * mi[j] + (1.0 - cfg.beta1) * grad;
                    vi[j] = cfg.beta2 * vi[j] + (1.0 - cfg.beta2) * grad * grad;
                    theta[j] -= lr * (mi[j] / bc1) / (std::sqrt(vi[j] / bc2) + cfg.eps);
                }
            };
            update(p.w[i], grads.w[i], m.w[i], v.w[i]);
            update(p.b[i], grads.b[i], m.b[i], v.b[i]);
        }
        if (!p.finite())
            throw NumericalError("train: parameters diverged at step " +
                                 std::to_string(step));
    }
    return result;
}

} // namespace lfaa::danet
