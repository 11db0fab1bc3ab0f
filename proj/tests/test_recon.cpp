#include <doctest.h>

#include <cmath>
#include <vector>

#include "lfaa/metrics.hpp"
#include "lfaa/pyramid.hpp"
#include "lfaa/recon.hpp"
#include "lfaa/synth.hpp"

using namespace lfaa;

namespace {
double interior_psnr(const Epi& a, const Epi& b, int margin) {
    REQUIRE(a.angular() == b.angular());
    REQUIRE(a.spatial() == b.spatial());
    Grid2D ca(a.angular(), a.spatial() - 2 * margin);
    Grid2D cb = ca;
    for (int s = 0; s < a.angular(); ++s)
        for (int u = 0; u < ca.cols(); ++u) {
            ca(s, u) = a(s, u + margin);
            cb(s, u) = b(s, u + margin);
        }
    return psnr(ca, cb, 1.0);
}

ReconConfig config_for(std::vector<double> shears, int alpha_s) {
    ReconConfig cfg;
    cfg.shears = std::move(shears);
    cfg.alpha_s = alpha_s;
    return cfg;
}
} // namespace

TEST_CASE("recon config validation") {
    ReconConfig cfg;
    CHECK_NOTHROW(validate(cfg));
    cfg.shears = {3, -3};
    CHECK_THROWS_AS(validate(cfg), ValidationError);
    cfg = ReconConfig{};
    cfg.alpha_s = 1;
    CHECK_THROWS_AS(validate(cfg), ValidationError);
    cfg = ReconConfig{};
    cfg.patch = 4;
    CHECK_THROWS_AS(validate(cfg), ValidationError);
    cfg = ReconConfig{};
    cfg.factors = {4, 2};
    CHECK_THROWS_AS(validate(cfg), ValidationError);
}

TEST_CASE("single shear: vertical content reconstructs above 50 dB") {
    auto [lr, hr] = render_dense_oracle(
        {{30.0, 0.0, 0.8, 3.0, 0.0, 0.0, 0}, {70.0, 0.0, 0.5, 4.0, 0.0, 0.0, 0}}, 16, 96, 3);
    SingleShearResult r = reconstruct_single_shear(lr, 0.0, config_for({0}, 3));
    CHECK(r.epi.angular() == 16);
    CHECK(interior_psnr(r.epi, hr, 8) > 50.0);
    // Input rows pass through bit-exactly.
    for (int s = 0; s < 6; ++s)
        for (int u = 0; u < 96; ++u) CHECK(r.epi(3 * s, u) == lr(s, u));
}

TEST_CASE("single shear: matched shear recovers a steep line, wrong shear does not") {
    const double d = 6.0;
    auto [lr, hr] =
        render_dense_oracle({{64.0, d, 0.8, 2.5, 0.0, 0.0, 0}}, 16, 128, 3);
    const ReconConfig cfg = config_for({-d, 0.0}, 3);

    SingleShearResult good = reconstruct_single_shear(lr, -d, cfg);
    SingleShearResult bad = reconstruct_single_shear(lr, 0.0, cfg);
    const double p_good = interior_psnr(good.epi, hr, 24);
    const double p_bad = interior_psnr(bad.epi, hr, 24);
    CHECK(p_good > 45.0);
    CHECK(p_good > p_bad + 3.0);
}

TEST_CASE("consistency_error: data term catches broken pass-through") {
    Epi input = render_epi({{32.0, 1.0, 0.8, 2.5, 0.0, 0.0, 0}}, 6, 64);
    Epi cand(upsample_angular_cubic(input.samples, 3), input.provenance);

    auto err = consistency_error(cand, input, 3, 16);
    REQUIRE(err.size() == 4);
    for (double e : err) {
        CHECK(e >= 0.0);
        CHECK(e < 0.05); // interpolating candidate: data term zero, mild smoothness
    }

    Epi broken = cand;
    for (int u = 0; u < 16; ++u) broken(6, u) += 0.5; // row 6 = input row 2, patch 0
    auto err2 = consistency_error(broken, input, 3, 16);
    CHECK(err2[0] > err[0] + 0.05);
    CHECK(err2[1] == doctest::Approx(err[1]));

    CHECK_THROWS_AS((void)consistency_error(input, input, 3, 16), ValidationError);
}

TEST_CASE("multi shear: per-patch selection favors the matching shear") {
    // Two regions with opposite steep disparities.
    auto [lr, hr] = render_dense_oracle(
        {{32.0, 6.0, 0.8, 2.5, 0.0, 0.0, 0}, {96.0, -6.0, 0.6, 2.5, 0.0, 0.0, 0}}, 16, 128, 3);
    ReconConfig cfg = config_for({-6, 0, 6}, 3);
    MultiShearResult r = reconstruct_multi(lr, cfg);
    REQUIRE(r.selected_shears.size() == 8);

    // Patches fully inside each region (line drifts +-30 px from center).
    CHECK(r.selected_shears[1] == doctest::Approx(-6.0));
    CHECK(r.selected_shears[6] == doctest::Approx(6.0));

    // Fused result beats the best single unmatched shear overall.
    SingleShearResult zero = reconstruct_single_shear(lr, 0.0, cfg);
    CHECK(interior_psnr(r.epi, hr, 12) > interior_psnr(zero.epi, hr, 12));

    // Input rows restored exactly.
    for (int s = 0; s < 6; ++s)
        for (int u = 0; u < 128; ++u) CHECK(r.epi(3 * s, u) == lr(s, u));
}

TEST_CASE("multi shear: single candidate reduces to the single-shear result") {
    Epi lr = render_epi({{40.0, 2.0, 0.7, 2.0, 0.0, 0.0, 0}}, 6, 80);
    ReconConfig cfg = config_for({-2}, 3);
    MultiShearResult multi = reconstruct_multi(lr, cfg);
    SingleShearResult single = reconstruct_single_shear(lr, -2.0, cfg);
    CHECK(multi.epi.samples == single.epi.samples);
    for (double s : multi.selected_shears) CHECK(s == doctest::Approx(-2.0));
}

TEST_CASE("multi shear: global_best picks one shear everywhere, runs deterministically") {
    Epi lr = render_epi({{64.0, 5.0, 0.8, 2.5, 0.0, 0.0, 0}}, 6, 128);
    ReconConfig cfg = config_for({-5, 0, 5}, 3);
    cfg.fusion = ReconConfig::Fusion::global_best;
    MultiShearResult r = reconstruct_multi(lr, cfg);
    for (double s : r.selected_shears) CHECK(s == doctest::Approx(r.selected_shears[0]));
    CHECK(r.selected_shears[0] == doctest::Approx(-5.0));

    MultiShearResult again = reconstruct_multi(lr, cfg);
    CHECK(again.epi.samples == r.epi.samples);
}

TEST_CASE("multi shear beats naive upsampling on a steep line outside the shear-free regime") {
    const double d = 14.0;
    auto [lr, hr] =
        render_dense_oracle({{96.0, d, 0.8, 2.5, 0.0, 0.0, 0}}, 16, 192, 3);
    ReconConfig cfg = config_for({-14, 0}, 3);
    MultiShearResult fused = reconstruct_multi(lr, cfg);
    SingleShearResult naive = reconstruct_single_shear(lr, 0.0, cfg);
    CHECK(interior_psnr(fused.epi, hr, 48) > interior_psnr(naive.epi, hr, 48) + 3.0);
}
