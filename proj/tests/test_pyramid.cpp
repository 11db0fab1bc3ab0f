#include <doctest.h>

#include <cmath>
#include <random>

#include "lfaa/metrics.hpp"
#include "lfaa/pyramid.hpp"
#include "lfaa/synth.hpp"

using namespace lfaa;

namespace {
Grid2D random_grid(int rows, int cols, uint32_t seed) {
    Grid2D g(rows, cols);
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    for (int s = 0; s < rows; ++s)
        for (int u = 0; u < cols; ++u) g(s, u) = u01(rng);
    return g;
}

double max_abs_diff(const Grid2D& a, const Grid2D& b) {
    REQUIRE(a.rows() == b.rows());
    REQUIRE(a.cols() == b.cols());
    double m = 0.0;
    for (int s = 0; s < a.rows(); ++s)
        for (int u = 0; u < a.cols(); ++u) m = std::max(m, std::abs(a(s, u) - b(s, u)));
    return m;
}
} // namespace

TEST_CASE("resample_cols at scale 1 and matching size is the identity") {
    Grid2D x = random_grid(5, 31, 3);
    Grid2D y = resample_cols(x, 31, 1.0);
    CHECK(max_abs_diff(x, y) < 1e-12);
}

TEST_CASE("cubic resampling reproduces linear ramps exactly (interior)") {
    Grid2D x(3, 40);
    for (int s = 0; s < 3; ++s)
        for (int u = 0; u < 40; ++u) x(s, u) = 0.01 * u + 0.1 * s;
    Grid2D up = resample_cols(x, 80, 0.5);
    for (int s = 0; s < 3; ++s)
        for (int o = 4; o < 76; ++o) {
            const double src = (o + 0.5) * 0.5 - 0.5;
            CHECK(up(s, o) == doctest::Approx(0.01 * src + 0.1 * s).epsilon(1e-10));
        }
}

TEST_CASE("downscale/upscale shapes and validation") {
    Grid2D x = random_grid(4, 37, 9);
    CHECK(downscale_spatial(x, 2).cols() == 19);
    CHECK(downscale_spatial(x, 4).cols() == 10);
    CHECK(upscale_spatial(x, 3).cols() == 111);
    CHECK_THROWS_AS((void)downscale_spatial(x, 0), ValidationError);
    CHECK_THROWS_AS((void)downscale_spatial(random_grid(4, 6, 1), 4), ValidationError);

    Tensor3 t(4, 16, 3, 0.5);
    Tensor3 dt = downscale_spatial(t, 2);
    CHECK(dt.rows() == 4);
    CHECK(dt.cols() == 8);
    CHECK(dt.channels() == 3);
}

TEST_CASE("laplacian pyramid reconstructs exactly") {
    SUBCASE("trivial factors {1}") {
        Grid2D x = random_grid(8, 64, 11);
        PyramidLevels p = laplacian_decompose(x, {1});
        CHECK(p.residuals.empty());
        CHECK(max_abs_diff(laplacian_reconstruct(p), x) < 1e-12);
    }
    SUBCASE("constant image has zero residuals") {
        Grid2D x(6, 48, 0.42);
        PyramidLevels p = laplacian_decompose(x);
        for (const auto& r : p.residuals) {
            for (int s = 0; s < r.rows(); ++s)
                for (int u = 0; u < r.cols(); ++u) CHECK(std::abs(r(s, u)) < 1e-12);
        }
        CHECK(max_abs_diff(laplacian_reconstruct(p), x) < 1e-12);
    }
    SUBCASE("100 random 32x128 grids within 1e-6") {
        for (uint32_t seed = 0; seed < 100; ++seed) {
            Grid2D x = random_grid(32, 128, 1000 + seed);
            PyramidLevels p = laplacian_decompose(x, {4, 2, 1});
            CHECK(max_abs_diff(laplacian_reconstruct(p), x) <= 1e-6);
        }
    }
    SUBCASE("validation") {
        Grid2D x = random_grid(4, 64, 2);
        CHECK_THROWS_AS((void)laplacian_decompose(x, {}), ValidationError);
        CHECK_THROWS_AS((void)laplacian_decompose(x, {4, 2}), ValidationError);
        CHECK_THROWS_AS((void)laplacian_decompose(x, {2, 4, 1}), ValidationError);
    }
}

TEST_CASE("downsample_angular_nearest keeps rows offset (mod rate)") {
    Grid2D x(16, 4);
    for (int s = 0; s < 16; ++s)
        for (int u = 0; u < 4; ++u) x(s, u) = s;
    Grid2D y = downsample_angular_nearest(x, 3, 0);
    REQUIRE(y.rows() == 6);
    for (int o = 0; o < 6; ++o) CHECK(y(o, 0) == doctest::Approx(3.0 * o));
    Grid2D z = downsample_angular_nearest(x, 3, 1);
    REQUIRE(z.rows() == 5);
    for (int o = 0; o < 5; ++o) CHECK(z(o, 2) == doctest::Approx(3.0 * o + 1.0));
    CHECK_THROWS_AS((void)downsample_angular_nearest(x, 3, 3), ValidationError);
}

TEST_CASE("upsample_angular_cubic interpolates: original rows exact") {
    Grid2D x = random_grid(6, 24, 5);
    Grid2D y = upsample_angular_cubic(x, 3);
    REQUIRE(y.rows() == 16);
    for (int s = 0; s < 6; ++s)
        for (int u = 0; u < 24; ++u) CHECK(y(3 * s, u) == doctest::Approx(x(s, u)).epsilon(1e-12));
}

TEST_CASE("smooth EPI survives an angular down/up round trip above 40 dB") {
    // Small disparity, wide footprint: cubic upsampling alone should do well.
    const int alpha_s = 2;
    auto [lr, hr] = render_dense_oracle(
        {{20.0, 0.4, 0.7, 5.0, 0.0, 0.0, 0}, {44.0, -0.3, 0.5, 6.0, 0.0, 0.0, 0}}, 15, 64,
        alpha_s);
    Grid2D up = upsample_angular_cubic(lr.samples, alpha_s);
    CHECK(psnr(up, hr.samples, 1.0) > 40.0);
}
