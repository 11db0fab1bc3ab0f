#include <benchmark/benchmark.h>

#include "lfaa/recon.hpp"
#include "lfaa/shear.hpp"
#include "lfaa/spectral.hpp"
#include "lfaa/synth.hpp"

namespace {

lfaa::Epi make_epi(int views, int width) {
    std::vector<lfaa::ScenePoint> pts = {
        {width * 0.3, -2.0, 0.8, 3.0, 0.0, 0.0, 0},
        {width * 0.7, 4.0, 0.6, 2.5, 0.0, 0.0, 0},
    };
    return lfaa::render_epi(pts, views, width);
}

void BM_ShearEpi(benchmark::State& state) {
    const lfaa::Epi epi = make_epi(8, static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(lfaa::shear_epi(epi, 3.0));
}
BENCHMARK(BM_ShearEpi)->Arg(128)->Arg(512);

void BM_EpiSpectrum(benchmark::State& state) {
    const lfaa::Epi epi = make_epi(8, static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(lfaa::epi_spectrum(epi));
}
BENCHMARK(BM_EpiSpectrum)->Arg(128)->Arg(512);

void BM_ReconstructSingleShear(benchmark::State& state) {
    const lfaa::Epi epi = make_epi(8, static_cast<int>(state.range(0)));
    lfaa::ReconConfig cfg;
    cfg.alpha_s = 3;
    for (auto _ : state)
        benchmark::DoNotOptimize(lfaa::reconstruct_single_shear(epi, -2.0, cfg));
}
BENCHMARK(BM_ReconstructSingleShear)->Arg(128)->Arg(256);

void BM_ReconstructMulti(benchmark::State& state) {
    const lfaa::Epi epi = make_epi(8, static_cast<int>(state.range(0)));
    lfaa::ReconConfig cfg;
    cfg.alpha_s = 3;
    for (auto _ : state)
        benchmark::DoNotOptimize(lfaa::reconstruct_multi(epi, cfg));
}
BENCHMARK(BM_ReconstructMulti)->Arg(128);

} // namespace

BENCHMARK_MAIN();
