#include <doctest.h>

#include <array>
#include <cmath>
#include <vector>

#include "lfaa/pyramid.hpp"
#include "lfaa/synth.hpp"

using namespace lfaa;

TEST_CASE("dense oracle: LR is an exact subsample of HR and matches render_epi") {
    std::vector<ScenePoint> pts = {{20.0, 1.3, 0.8, 2.0, 0.0, 0.0, 0},
                                   {40.0, -0.7, 0.6, 3.0, 0.0, 0.0, 0}};
    const int alpha_s = 3, s_lr = 6;
    auto [lr, hr] = render_dense_oracle(pts, alpha_s * s_lr - (alpha_s - 1), 64, alpha_s);
    CHECK(lr.angular() == s_lr);
    CHECK(hr.angular() == 16);

    Grid2D sub = downsample_angular_nearest(hr.samples, alpha_s, 0);
    CHECK(lr.samples == sub);

    Epi direct = render_epi(pts, s_lr, 64);
    CHECK(lr.samples == direct.samples);

    CHECK_THROWS_AS((void)render_dense_oracle(pts, 15, 64, 3), ValidationError);
}

TEST_CASE("scene point validation") {
    CHECK_THROWS_AS(validate(ScenePoint{0, 0, 0.8, 0.0, 0, 0, 0}), ValidationError);
    CHECK_THROWS_AS(validate(ScenePoint{0, 0, 1.2, 1.0, 0, 0, 0}), ValidationError);
    CHECK_THROWS_AS(validate(ScenePoint{0, 0, 0.8, 1.0, 0.0, 0.3, 0}), ValidationError);
    CHECK_THROWS_AS(validate(ScenePoint{0, 0, 0.9, 1.0, 0.5, 0.5, 0}), ValidationError);
    CHECK_NOTHROW(validate(ScenePoint{0, 0, 0.7, 1.0, 0.5, 0.3, 0}));
}

TEST_CASE("non-Lambertian modulation stays bounded and varies along s") {
    Epi epi = render_epi({{32.0, 0.0, 0.7, 3.0, 0.6, 0.3, 11}}, 12, 64);
    double lo = 1e9, hi = -1e9;
    for (int s = 0; s < 12; ++s) {
        CHECK(epi(s, 32) >= 0.0);
        CHECK(epi(s, 32) <= 1.0);
        lo = std::min(lo, epi(s, 32));
        hi = std::max(hi, epi(s, 32));
    }
    CHECK(hi - lo > 0.01); // modulation is visible on the line center
}

TEST_CASE("analysis scene has the expected cast") {
    auto pts = analysis_scene();
    REQUIRE(pts.size() == 4);
    int non_lambertian = 0;
    double dmax = 0.0;
    for (const auto& p : pts) {
        CHECK_NOTHROW(validate(p));
        if (p.beta_over_z > 0.0) ++non_lambertian;
        dmax = std::max(dmax, std::abs(p.d));
    }
    CHECK(non_lambertian == 1);
    CHECK(dmax > 2.0);
}

TEST_CASE("pseudo EPI follows a monotone disparity ramp") {
    PseudoEpiSpec spec;
    spec.u0 = 110.0;
    spec.intensity = 0.8;
    spec.width = 3.0;
    spec.disparity_knots = {2.0, 6.0};
    const int S = 12, U = 128;
    Epi epi = render_pseudo_epi(spec, S, U);

    // Intensity centroid per row tracks the trajectory u0 - integral d.
    std::vector<double> centroid(S);
    for (int s = 0; s < S; ++s) {
        double m = 0.0, mu = 0.0;
        for (int u = 0; u < U; ++u) {
            m += epi(s, u);
            mu += epi(s, u) * u;
        }
        REQUIRE(m > 0.0);
        centroid[s] = mu / m;
    }
    std::vector<double> slope(S - 1);
    for (int s = 0; s + 1 < S; ++s) slope[s] = centroid[s] - centroid[s + 1];
    for (int s = 0; s + 2 < S; ++s) CHECK(slope[s + 1] > slope[s] - 1e-6);
    CHECK(slope.front() == doctest::Approx(2.2).epsilon(0.15));
    CHECK(slope.back() == doctest::Approx(5.8).epsilon(0.15));

    CHECK_THROWS_AS((void)render_pseudo_epi(PseudoEpiSpec{}, 8, 32), ValidationError);
}

TEST_CASE("pseudo dense oracle subsamples exactly") {
    PseudoEpiSpec spec;
    spec.u0 = 60.0;
    spec.width = 2.5;
    spec.disparity_knots = {1.0, -2.0, 0.5};
    auto [lr, hr] = render_pseudo_dense_oracle(spec, 16, 96, 3);
    CHECK(lr.angular() == 6);
    CHECK(lr.samples == downsample_angular_nearest(hr.samples, 3, 0));
}

TEST_CASE("training set: shapes, determinism, disparity histogram") {
    TrainingSetConfig cfg;
    cfg.count_regular = 10000;
    cfg.count_pseudo = 8;
    cfg.input_views = 4;
    cfg.width = 24;
    cfg.alpha_s = 2;
    cfg.d_min = -2.0;
    cfg.d_max = 2.0;
    cfg.seed = 5;

    TrainingSet set = make_training_set(cfg);
    REQUIRE(set.phase1.size() == 10000);
    REQUIRE(set.phase2.size() == 8);
    CHECK(set.phase1[0].input.rows() == 4);
    CHECK(set.phase1[0].label.rows() == 7);
    CHECK(set.phase1[0].input.cols() == 24);

    // Drawn disparities cover [d_min, d_max] uniformly: quartile bins within
    // 5 percentage points of 25% each.
    std::array<int, 4> bins{};
    int total = 0;
    for (const auto& p : set.phase1)
        for (double d : p.disparities) {
            int b = static_cast<int>((d - cfg.d_min) / (cfg.d_max - cfg.d_min) * 4.0);
            bins[std::clamp(b, 0, 3)]++;
            ++total;
            CHECK(d >= cfg.d_min);
            CHECK(d <= cfg.d_max);
        }
    for (int b : bins) CHECK(std::abs(b / static_cast<double>(total) - 0.25) < 0.05);

    // Same seed reproduces the set bit-exactly; another seed differs.
    TrainingSetConfig small = cfg;
    small.count_regular = 3;
    small.count_pseudo = 2;
    TrainingSet again = make_training_set(small);
    for (int i = 0; i < 3; ++i) CHECK(again.phase1[i].input == set.phase1[i].input);
    small.seed = 6;
    TrainingSet other = make_training_set(small);
    CHECK_FALSE(other.phase1[0].input == set.phase1[0].input);

    TrainingSetConfig bad = cfg;
    bad.width = 4;
    CHECK_THROWS_AS((void)make_training_set(bad), ValidationError);
}

TEST_CASE("4D oracle: sparse equals subsampled dense, hints set") {
    auto [sparse, dense] =
        render_light_field_oracle({{12.0, 10.0, 1.2, 0.8, 2.0}, {20.0, 16.0, -0.5, 0.6, 3.0}},
                                  32, 24, 3, 3, 3);
    CHECK(dense.views_s() == 7);
    CHECK(dense.views_t() == 7);
    for (int t = 0; t < 3; ++t)
        for (int s = 0; s < 3; ++s)
            for (int v = 0; v < 24; ++v)
                for (int u = 0; u < 32; ++u)
                    CHECK(sparse.at(u, v, s, t) == dense.at(u, v, 3 * s, 3 * t));
    REQUIRE(sparse.disparity_hint().has_value());
    CHECK(sparse.disparity_hint()->d_min == doctest::Approx(-0.5));
    CHECK(sparse.disparity_hint()->d_max == doctest::Approx(1.2));
}
