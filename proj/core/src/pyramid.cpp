#include "lfaa/pyramid.hpp"

#include <algorithm>
#include <cmath>

namespace lfaa {

double cubic_kernel(double x) {
    constexpr double a = -0.5;
    x = std::abs(x);
    if (x < 1.0) return ((a + 2.0) * x - (a + 3.0)) * x * x + 1.0;
    if (x < 2.0) return ((a * x - 5.0 * a) * x + 8.0 * a) * x - 4.0 * a;
    return 0.0;
}

Grid2D resample_cols(const Grid2D& x, int out_cols, double scale) {
    if (out_cols < 1) throw ValidationError("resample_cols: out_cols must be >= 1");
    if (scale <= 0.0) throw ValidationError("resample_cols: scale must be > 0");
    const int S = x.rows(), U = x.cols();
    const double stretch = std::max(scale, 1.0);
    const int support = static_cast<int>(std::ceil(2.0 * stretch));

    Grid2D out(S, out_cols);
    for (int o = 0; o < out_cols; ++o) {
        const double src = (o + 0.5) * scale - 0.5;
        const int lo = static_cast<int>(std::floor(src)) - support + 1;
        const int hi = static_cast<int>(std::floor(src)) + support;
        double wsum = 0.0;
        double wbuf[64];
        for (int i = lo; i <= hi; ++i) {
            const double w = cubic_kernel((src - i) / stretch);
            wbuf[i - lo] = w;
            wsum += w;
        }
        for (int s = 0; s < S; ++s) {
            double acc = 0.0;
            for (int i = lo; i <= hi; ++i)
                acc += wbuf[i - lo] * x(s, std::clamp(i, 0, U - 1));
            out(s, o) = acc / wsum;
        }
    }
    return out;
}

Grid2D resample_rows(const Grid2D& x, int out_rows, double scale) {
    if (out_rows < 1) throw ValidationError("resample_rows: out_rows must be >= 1");
    if (scale <= 0.0) throw ValidationError("resample_rows: scale must be > 0");
    const int S = x.rows(), U = x.cols();
    const double stretch = std::max(scale, 1.0);
    const int support = static_cast<int>(std::ceil(2.0 * stretch));

    Grid2D out(out_rows, U);
    for (int o = 0; o < out_rows; ++o) {
        const double src = (o + 0.5) * scale - 0.5;
        const int lo = static_cast<int>(std::floor(src)) - support + 1;
        const int hi = static_cast<int>(std::floor(src)) + support;
        double wsum = 0.0;
        double wbuf[64];
        for (int i = lo; i <= hi; ++i) {
            const double w = cubic_kernel((src - i) / stretch);
            wbuf[i - lo] = w;
            wsum += w;
        }
        for (int u = 0; u < U; ++u) {
            double acc = 0.0;
            for (int i = lo; i <= hi; ++i)
                acc += wbuf[i - lo] * x(std::clamp(i, 0, S - 1), u);
            out(o, u) = acc / wsum;
        }
    }
    return out;
}

Grid2D downscale_spatial(const Grid2D& x, int factor) {
    if (factor < 1) throw ValidationError("downscale_spatial: factor must be >= 1");
    if (factor == 1) return x;
    if (x.cols() < 2 * factor)
        throw ValidationError("downscale_spatial: spatial extent must be >= 2*factor");
    const int out_cols = (x.cols() + factor - 1) / factor;
    return resample_cols(x, out_cols, static_cast<double>(factor));
}

Grid2D upscale_spatial(const Grid2D& x, int factor) {
    if (factor < 1) throw ValidationError("upscale_spatial: factor must be >= 1");
    if (factor == 1) return x;
    return resample_cols(x, x.cols() * factor, 1.0 / factor);
}

namespace {
template <typename F>
Tensor3 per_channel(const Tensor3& x, F&& fn) {
    Tensor3 out;
    for (int c = 0; c < x.channels(); ++c) {
        Grid2D g = fn(x.channel(c));
        if (c == 0) out = Tensor3(g.rows(), g.cols(), x.channels());
        for (int s = 0; s < g.rows(); ++s)
            for (int u = 0; u < g.cols(); ++u) out(s, u, c) = g(s, u);
    }
    return out;
}
} // namespace

Tensor3 downscale_spatial(const Tensor3& x, int factor) {
    return per_channel(x, [&](const Grid2D& g) { return downscale_spatial(g, factor); });
}

Tensor3 upscale_spatial(const Tensor3& x, int factor) {
    return per_channel(x, [&](const Grid2D& g) { return upscale_spatial(g, factor); });
}

PyramidLevels laplacian_decompose(const Grid2D& x, std::vector<int> factors) {
    if (factors.empty() || factors.back() != 1)
        throw ValidationError("laplacian_decompose: factors must end at 1");
    for (size_t i = 1; i < factors.size(); ++i)
        if (factors[i] >= factors[i - 1])
            throw ValidationError("laplacian_decompose: factors must be strictly decreasing");

    PyramidLevels p;
    p.factors = factors;
    std::vector<Grid2D> levels;
    for (int f : factors) levels.push_back(downscale_spatial(x, f));
    p.base = levels.front();
    for (size_t j = 0; j + 1 < levels.size(); ++j) {
        const Grid2D& fine = levels[j + 1];
        const double ratio = static_cast<double>(factors[j + 1]) / factors[j];
        Grid2D up = resample_cols(levels[j], fine.cols(), ratio);
        Grid2D res(fine.rows(), fine.cols());
        for (int s = 0; s < fine.rows(); ++s)
            for (int u = 0; u < fine.cols(); ++u) res(s, u) = fine(s, u) - up(s, u);
        p.residuals.push_back(std::move(res));
    }
    return p;
}

Grid2D laplacian_reconstruct(const PyramidLevels& p) {
    if (p.residuals.size() + 1 != p.factors.size())
        throw ValidationError("laplacian_reconstruct: inconsistent level count");
    Grid2D acc = p.base;
    for (size_t j = 0; j < p.residuals.size(); ++j) {
        const Grid2D& res = p.residuals[j];
        const double ratio = static_cast<double>(p.factors[j + 1]) / p.factors[j];
        Grid2D up = resample_cols(acc, res.cols(), ratio);
        acc = Grid2D(res.rows(), res.cols());
        for (int s = 0; s < res.rows(); ++s)
            for (int u = 0; u < res.cols(); ++u) acc(s, u) = up(s, u) + res(s, u);
    }
    return acc;
}

Grid2D downsample_angular_nearest(const Grid2D& x, int rate, int offset) {
    if (rate < 1) throw ValidationError("downsample_angular_nearest: rate must be >= 1");
    if (offset < 0 || offset >= rate)
        throw ValidationError("downsample_angular_nearest: offset must be in [0, rate)");
    const int out_rows = (x.rows() - offset + rate - 1) / rate;
    Grid2D out(out_rows, x.cols());
    for (int o = 0; o < out_rows; ++o)
        for (int u = 0; u < x.cols(); ++u) out(o, u) = x(offset + o * rate, u);
    return out;
}

Grid2D upsample_angular_cubic(const Grid2D& x, int alpha_s) {
    if (alpha_s < 1) throw ValidationError("upsample_angular_cubic: alpha_s must be >= 1");
    if (alpha_s == 1) return x;
    const int S = x.rows(), U = x.cols();
    const int out_rows = alpha_s * S - (alpha_s - 1);
    Grid2D out(out_rows, U);
    for (int r = 0; r < out_rows; ++r) {
        const double src = static_cast<double>(r) / alpha_s;
        const int base = static_cast<int>(std::floor(src));
        for (int u = 0; u < U; ++u) {
            double acc = 0.0;
            for (int i = base - 1; i <= base + 2; ++i)
                acc += cubic_kernel(src - i) * x(std::clamp(i, 0, S - 1), u);
            out(r, u) = acc;
        }
    }
    return out;
}

} // namespace lfaa
