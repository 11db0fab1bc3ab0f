#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "lfaa/grid.hpp"
#include "lfaa/light_field.hpp"

namespace lfaa {

// 10*log10(peak^2 / MSE); identical images cap at 99 dB.
double psnr(const Grid2D& a, const Grid2D& b, double peak = 1.0);

// Single-scale SSIM, 11x11 Gaussian window sigma = 1.5,
// C1 = (0.01*peak)^2, C2 = (0.03*peak)^2. Needs images >= 11x11.
double ssim(const Grid2D& a, const Grid2D& b, double peak = 1.0);

struct MetricReport {
    std::vector<double> psnr_per_view;
    std::vector<double> ssim_per_view;
    std::vector<int> views_excluded; // flat s*views_t + t indices of input views
    double psnr_mean = 0.0;
    double ssim_mean = 0.0;
    double runtime_ms = 0.0;
};

// Scores reconstructed against dense ground truth view by view; views whose
// (s, t) lie on the sparse input grid (s % alpha_s == 0 && t % alpha_s == 0)
// are excluded from the means.
MetricReport score_light_field(const LightField4D& reconstructed,
                               const LightField4D& truth, int alpha_s,
                               double runtime_ms = 0.0);

struct BenchmarkRow {
    std::string case_name;
    std::string pipeline;
    int alpha_s = 0;
    double psnr_mean = 0.0;
    double ssim_mean = 0.0;
    double runtime_ms = 0.0;
};

// Columns: case, pipeline, alpha_s, psnr_mean, ssim_mean, runtime_ms.
void write_benchmark_csv(std::ostream& os, const std::vector<BenchmarkRow>& rows);

} // namespace lfaa
