#include "lfaa/recon.hpp"

#include <algorithm>
#include <cmath>

#include "lfaa/pyramid.hpp"
#include "lfaa/shear.hpp"
#include "lfaa/spectral.hpp"

namespace lfaa {

void validate(const ReconConfig& cfg) {
    if (cfg.shears.empty()) throw ValidationError("ReconConfig: shears must be non-empty");
    if (!std::is_sorted(cfg.shears.begin(), cfg.shears.end()))
        throw ValidationError("ReconConfig: shears must be sorted");
    if (cfg.alpha_s < 2) throw ValidationError("ReconConfig: alpha_s must be >= 2");
    if (cfg.gamma <= 0.0) throw ValidationError("ReconConfig: gamma must be > 0");
    if (cfg.patch < 8) throw ValidationError("ReconConfig: patch must be >= 8");
    if (cfg.factors.empty() || cfg.factors.back() != 1)
        throw ValidationError("ReconConfig: factors must end at 1");
}

SingleShearResult reconstruct_single_shear(const Epi& epi, double alpha_h,
                                           const ReconConfig& cfg) {
    validate(cfg);
    if (epi.angular() < 2)
        throw ValidationError("reconstruct_single_shear: need >= 2 views");
    if (!epi.samples.finite())
        throw ValidationError("reconstruct_single_shear: non-finite input");

    const int S = epi.angular(), U = epi.spatial();
    const Epi sheared = shear_epi(epi, alpha_h);

    // Alias analysis on the sheared input: its residual slope sets where the
    // replicas cross the Omega_s = 0 row.
    AliasingReport report;
    report.clean = true;
    if (S >= 4) {
        if (auto d_res = estimate_dominant_disparity(sheared)) {
            const SpectralSupport support(*d_res / cfg.alpha_s, 0.0, 1.0);
            report = locate_reference_alias(epi_spectrum(sheared), support, cfg.alpha_s);
        }
    }

    SingleShearResult result;
    result.alpha_h = alpha_h;

    // Shape parameter per pyramid level: sigma scales as 1/factor, so the
    // full-resolution residual gets the widest kernel (the continuous filter
    // is shared across scales).
    std::vector<std::vector<double>> level_taps;
    for (size_t j = 0; j < cfg.factors.size(); ++j) {
        try {
            PrefilterSpec sp = design_prefilter(report, cfg.gamma, cfg.factors[j]);
            if (j == 0) result.sigma = sp.sigma;
            level_taps.push_back(std::move(sp.taps));
        } catch (const NumericalError&) {
            const double sigma = 2.0 / cfg.factors[j]; // cap; alias sits at DC
            result.sigma_capped = true;
            if (j == 0) result.sigma = sigma;
            const double tap_sigma = 2.0 * M_PI * sigma;
            level_taps.push_back(
                gaussian_kernel(tap_sigma, static_cast<int>(std::ceil(4.0 * tap_sigma))));
        }
    }

    // Multi-scale: prefilter each pyramid component at its own grid, upsample
    // angularly there, then recombine exactly as the Laplacian inverse.
    const PyramidLevels pyr = laplacian_decompose(sheared.samples, cfg.factors);
    Grid2D acc = upsample_angular_cubic(convolve_u(pyr.base, level_taps[0]), cfg.alpha_s);
    for (size_t j = 0; j < pyr.residuals.size(); ++j) {
        const Grid2D res =
            upsample_angular_cubic(convolve_u(pyr.residuals[j], level_taps[j + 1]),
                                   cfg.alpha_s);
        const double ratio =
            static_cast<double>(cfg.factors[j + 1]) / cfg.factors[j];
        Grid2D up = resample_cols(acc, res.cols(), ratio);
        acc = Grid2D(res.rows(), res.cols());
        for (int s = 0; s < res.rows(); ++s)
            for (int u = 0; u < res.cols(); ++u) acc(s, u) = up(s, u) + res(s, u);
    }

    Epi out = unshear_for_upsampled(Epi(std::move(acc), epi.provenance), alpha_h,
                                    cfg.alpha_s);

    // Input views pass through untouched.
    for (int s = 0; s < S; ++s)
        for (int u = 0; u < U; ++u) out(s * cfg.alpha_s, u) = epi(s, u);

    result.epi = std::move(out);
    return result;
}

std::vector<double> consistency_error(const Epi& candidate, const Epi& input,
                                      int alpha_s, int patch,
                                      std::optional<double> alpha_h) {
    if (alpha_s < 2) throw ValidationError("consistency_error: alpha_s must be >= 2");
    if (patch < 1) throw ValidationError("consistency_error: patch must be >= 1");
    if (candidate.spatial() != input.spatial())
        throw ValidationError("consistency_error: width mismatch");
    if (candidate.angular() != alpha_s * input.angular() - (alpha_s - 1))
        throw ValidationError("consistency_error: candidate row count inconsistent");

    const int U = input.spatial();
    const int S_in = input.angular(), S_hr = candidate.angular();
    const int n_patches = (U + patch - 1) / patch;
    std::vector<double> err(n_patches, 0.0);

    for (int p = 0; p < n_patches; ++p) {
        const int u0 = p * patch, u1 = std::min(u0 + patch, U);
        double data = 0.0, smooth = 0.0, model = 0.0;
        long model_n = 0;
        for (int u = u0; u < u1; ++u) {
            for (int s = 0; s < S_in; ++s)
                data += std::abs(candidate(s * alpha_s, u) - input(s, u));
            for (int s = 1; s + 1 < S_hr; ++s)
                smooth += std::abs(candidate(s + 1, u) - 2.0 * candidate(s, u) +
                                   candidate(s - 1, u));
            if (alpha_h) {
                const double d_h = -*alpha_h;
                for (int s = 0; s < S_hr; ++s) {
                    if (s % alpha_s == 0) continue;
                    const int sn = std::clamp(
                        static_cast<int>(std::lround(s / static_cast<double>(alpha_s))),
                        0, S_in - 1);
                    const double src = u + d_h / alpha_s * (s - sn * alpha_s);
                    const int ui = static_cast<int>(std::floor(src));
                    if (ui < 0 || ui + 1 >= U) continue;
                    const double f = src - ui;
                    const double pred =
                        (1.0 - f) * input(sn, ui) + f * input(sn, ui + 1);
                    model += std::abs(candidate(s, u) - pred);
                    ++model_n;
                }
            }
        }
        const int width = u1 - u0;
        data /= static_cast<double>(width) * S_in;
        smooth /= static_cast<double>(width) * std::max(S_hr - 2, 1);
        if (model_n > 0) model /= static_cast<double>(model_n);
        err[p] = data + model + 0.1 * smooth;
    }
    return err;
}

MultiShearResult reconstruct_multi(const Epi& epi, const ReconConfig& cfg) {
    validate(cfg);

    MultiShearResult result;
    std::vector<SingleShearResult> cands;
    for (double a : cfg.shears) {
        cands.push_back(reconstruct_single_shear(epi, a, cfg));
        if (cands.back().sigma_capped)
            result.warnings.push_back("unfilterable alias at shear " + std::to_string(a) +
                                      "; sigma capped");
    }

    const int U = epi.spatial();
    const int n_patches = (U + cfg.patch - 1) / cfg.patch;
    // The data term is zero for every conforming candidate (pass-through rows),
    // so the shear-hypothesis model term does the actual ranking.
    std::vector<std::vector<double>> errs;
    for (const auto& c : cands)
        errs.push_back(consistency_error(c.epi, epi, cfg.alpha_s, cfg.patch, c.alpha_h));

    // better(): strictly lower error wins; near-ties go to the smaller |alpha_h|.
    const auto better = [&](double ce, double ca, double be, double ba) {
        if (ce < be * (1.0 - 1e-9)) return true;
        if (ce <= be * (1.0 + 1e-9) && std::abs(ca) < std::abs(ba)) return true;
        return false;
    };

    std::vector<int> sel(n_patches, 0);
    if (cfg.fusion == ReconConfig::Fusion::global_best) {
        int best = 0;
        double best_total = 0.0, best_a = cfg.shears[0];
        for (size_t c = 0; c < cands.size(); ++c) {
            double total = 0.0;
            for (double e : errs[c]) total += e;
            if (c == 0 || better(total, cfg.shears[c], best_total, best_a)) {
                best = static_cast<int>(c);
                best_total = total;
                best_a = cfg.shears[c];
            }
        }
        std::fill(sel.begin(), sel.end(), best);
    } else {
        for (int p = 0; p < n_patches; ++p) {
            int best = 0;
            for (size_t c = 1; c < cands.size(); ++c)
                if (better(errs[c][p], cfg.shears[c], errs[best][p], cfg.shears[best]))
                    best = static_cast<int>(c);
            sel[p] = best;
        }
    }
    for (int p = 0; p < n_patches; ++p)
        result.selected_shears.push_back(cfg.shears[sel[p]]);

    // Blend: linear cross-fade over an 8-px zone centered at patch seams.
    const int S_hr = cands[0].epi.angular();
    Epi out(S_hr, U, epi.provenance);
    constexpr int FADE = 8;
    for (int u = 0; u < U; ++u) {
        const int p = std::min(u / cfg.patch, n_patches - 1);
        int left = p, right = p;
        double w = 0.0;
        const int lb = p * cfg.patch, rb = (p + 1) * cfg.patch;
        if (p > 0 && u < lb + FADE / 2) {
            left = p - 1;
            right = p;
            w = (u - (lb - FADE / 2) + 0.5) / FADE;
        } else if (p + 1 < n_patches && u >= rb - FADE / 2) {
            left = p;
            right = p + 1;
            w = (u - (rb - FADE / 2) + 0.5) / FADE;
        }
        const Epi& cl = cands[sel[left]].epi;
        const Epi& cr = cands[sel[right]].epi;
        for (int s = 0; s < S_hr; ++s)
            out(s, u) = (1.0 - w) * cl(s, u) + w * cr(s, u);
    }

    // Blending cannot disturb the pass-through rows (both candidates agree
    // there), but restore them exactly anyway.
    for (int s = 0; s < epi.angular(); ++s)
        for (int u = 0; u < U; ++u) out(s * cfg.alpha_s, u) = epi(s, u);

    result.epi = std::move(out);
    return result;
}

} // namespace lfaa
