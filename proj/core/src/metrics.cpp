#include "lfaa/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace lfaa {

double psnr(const Grid2D& a, const Grid2D& b, double peak) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw ValidationError("psnr: shape mismatch");
    if (peak <= 0.0) throw ValidationError("psnr: peak must be > 0");
    if (a.size() == 0) throw ValidationError("psnr: empty image");
    double mse = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        const double d = a.data()[i] - b.data()[i];
        mse += d * d;
    }
    mse /= static_cast<double>(a.size());
    if (mse == 0.0) return 99.0;
    return std::min(99.0, 10.0 * std::log10(peak * peak / mse));
}

double ssim(const Grid2D& a, const Grid2D& b, double peak) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw ValidationError("ssim: shape mismatch");
    if (a.rows() < 11 || a.cols() < 11)
        throw ValidationError("ssim: images must be >= 11x11");
    if (peak <= 0.0) throw ValidationError("ssim: peak must be > 0");

    constexpr int HW = 5; // 11x11 window
    double w[2 * HW + 1];
    double wsum = 0.0;
    for (int i = -HW; i <= HW; ++i) {
        w[i + HW] = std::exp(-0.5 * i * i / (1.5 * 1.5));
        wsum += w[i + HW];
    }
    for (double& x : w) x /= wsum;

    const double c1 = 0.01 * peak * 0.01 * peak;
    const double c2 = 0.03 * peak * 0.03 * peak;

    const int R = a.rows(), C = a.cols();
    double total = 0.0;
    int count = 0;
    for (int r = HW; r < R - HW; ++r) {
        for (int c = HW; c < C - HW; ++c) {
            double mu_a = 0.0, mu_b = 0.0;
            double aa = 0.0, bb = 0.0, ab = 0.0;
            for (int i = -HW; i <= HW; ++i)
                for (int j = -HW; j <= HW; ++j) {
                    const double wij = w[i + HW] * w[j + HW];
                    const double va = a(r + i, c + j), vb = b(r + i, c + j);
                    mu_a += wij * va;
                    mu_b += wij * vb;
                    aa += wij * va * va;
                    bb += wij * vb * vb;
                    ab += wij * va * vb;
                }
            const double var_a = aa - mu_a * mu_a;
            const double var_b = bb - mu_b * mu_b;
            const double cov = ab - mu_a * mu_b;
            const double num = (2.0 * mu_a * mu_b + c1) * (2.0 * cov + c2);
            const double den = (mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2);
            total += num / den;
            ++count;
        }
    }
    return total / count;
}

namespace {
Grid2D view_image(const LightField4D& lf, int s, int t) {
    Grid2D g(lf.height(), lf.width());
    for (int v = 0; v < lf.height(); ++v)
        for (int u = 0; u < lf.width(); ++u) g(v, u) = lf.at(u, v, s, t);
    return g;
}
} // namespace

MetricReport score_light_field(const LightField4D& reconstructed,
                               const LightField4D& truth, int alpha_s,
                               double runtime_ms) {
    if (reconstructed.width() != truth.width() || reconstructed.height() != truth.height() ||
        reconstructed.views_s() != truth.views_s() ||
        reconstructed.views_t() != truth.views_t())
        throw ValidationError("score_light_field: shape mismatch");
    if (alpha_s < 1) throw ValidationError("score_light_field: alpha_s must be >= 1");

    MetricReport rep;
    rep.runtime_ms = runtime_ms;
    double psum = 0.0, ssum = 0.0;
    int scored = 0;
    for (int t = 0; t < truth.views_t(); ++t)
        for (int s = 0; s < truth.views_s(); ++s) {
            const Grid2D ra = view_image(reconstructed, s, t);
            const Grid2D rb = view_image(truth, s, t);
            const double p = psnr(ra, rb);
            const double q = ssim(ra, rb);
            rep.psnr_per_view.push_back(p);
            rep.ssim_per_view.push_back(q);
            if (s % alpha_s == 0 && t % alpha_s == 0) {
                rep.views_excluded.push_back(s * truth.views_t() + t);
            } else {
                psum += p;
                ssum += q;
                ++scored;
            }
        }
    if (scored > 0) {
        rep.psnr_mean = psum / scored;
        rep.ssim_mean = ssum / scored;
    }
    return rep;
}

void write_benchmark_csv(std::ostream& os, const std::vector<BenchmarkRow>& rows) {
    os << "case,pipeline,alpha_s,psnr_mean,ssim_mean,runtime_ms\n";
    os.precision(6);
    os << std::fixed;
    for (const auto& r : rows)
        os << r.case_name << ',' << r.pipeline << ',' << r.alpha_s << ',' << r.psnr_mean
           << ',' << r.ssim_mean << ',' << r.runtime_ms << '\n';
}

} // namespace lfaa
