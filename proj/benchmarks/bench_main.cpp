#include "vh/analysis.hpp"
#include "vh/pipeline.hpp"
#include "vh/specfun.hpp"

#include <benchmark/benchmark.h>

using namespace vh;

namespace {

RunConfig config(std::size_t n) {
    RunConfig c;
    c.grid_n = n;
    return c;
}

void BM_BesselJ(benchmark::State& st) {
    const int l = int(st.range(0));
    double x = 0.1;
    for (auto _ : st) {
        benchmark::DoNotOptimize(specfun::bessel_j(l, x));
        x = x > 300 ? 0.1 : x * 1.07;
    }
}
BENCHMARK(BM_BesselJ)->Arg(0)->Arg(1)->Arg(5)->Arg(20);

void BM_BesselZero(benchmark::State& st) {
    for (auto _ : st) benchmark::DoNotOptimize(specfun::bessel_zero(int(st.range(0)), 4));
}
BENCHMARK(BM_BesselZero)->Arg(1)->Arg(8);

void BM_TbbField(benchmark::State& st) {
    const auto cfg = config(std::size_t(st.range(0)));
    const auto beam = pipeline::beam_for(cfg);
    const auto grid = pipeline::grid_for(cfg);
    for (auto _ : st) benchmark::DoNotOptimize(modes::tbb_field({1, 1}, beam, grid));
}
BENCHMARK(BM_TbbField)->Arg(512)->Arg(2048)->Unit(benchmark::kMillisecond);

void BM_BuildMask(benchmark::State& st) {
    const auto cfg = config(std::size_t(st.range(0)));
    for (auto _ : st) benchmark::DoNotOptimize(pipeline::build_mask(cfg, {2, 1}));
}
BENCHMARK(BM_BuildMask)->Arg(512)->Arg(2048)->Unit(benchmark::kMillisecond);

void BM_Propagate(benchmark::State& st) {
    const auto cfg = config(std::size_t(st.range(0)));
    const auto beam = pipeline::beam_for(cfg);
    const auto mask = pipeline::build_mask(cfg, {0, 1});
    const auto f = mask.as_field();
    const double d = mask.grating.period(cfg.rho_max_m);
    for (auto _ : st) benchmark::DoNotOptimize(optics::propagate(f, beam, d));
}
BENCHMARK(BM_Propagate)->Arg(512)->Arg(2048)->Unit(benchmark::kMillisecond);

void BM_AnalyzeOrder(benchmark::State& st) {
    const auto cfg = config(2048);
    const auto beam = pipeline::beam_for(cfg);
    const auto mask = pipeline::build_mask(cfg, {1, 1});
    const auto pat = optics::propagate(mask.as_field(), beam, mask.grating.period(cfg.rho_max_m));
    const auto e = optics::extract_order(pat, 1, beam);
    for (auto _ : st) benchmark::DoNotOptimize(analysis::analyze_order(e, beam));
}
BENCHMARK(BM_AnalyzeOrder)->Unit(benchmark::kMillisecond);

void BM_CountLobes(benchmark::State& st) {
    const auto cfg = config(2048);
    const auto beam = pipeline::beam_for(cfg);
    const auto mask = pipeline::build_mask(cfg, {1, 1});
    const auto pat = optics::astig_transform(mask.as_field(), {4.0, cfg.astig_angle}, beam,
                                             mask.grating.period(cfg.rho_max_m));
    const auto e = optics::extract_order(pat, 1, beam);
    for (auto _ : st) benchmark::DoNotOptimize(analysis::count_lobes(e));
}
BENCHMARK(BM_CountLobes)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
