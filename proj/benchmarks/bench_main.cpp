#include <benchmark/benchmark.h>

#include "wppsc/analysis.hpp"
#include "wppsc/scr.hpp"
#include "wppsc/sim.hpp"

using namespace wppsc;

namespace {

Scenario nominal(ControlType control, bool sc) {
    const Scenario base = default_scenario();
    return sweep_scenario(base, base.study.grid_cases.at(1), control, sc, {1.0, 1.0, 1.0});
}

void BM_OperatingPoint(benchmark::State& state) {
    const Scenario s = nominal(ControlType::gfm, true);
    for (auto _ : state) benchmark::DoNotOptimize(solve_operating_point(s, s.op));
}
BENCHMARK(BM_OperatingPoint);

void BM_Linearize(benchmark::State& state) {
    const Scenario s = nominal(ControlType::gfm, true);
    const EquilibriumPoint eq = solve_operating_point(s, s.op);
    for (auto _ : state) benchmark::DoNotOptimize(linearize(s, eq));
}
BENCHMARK(BM_Linearize);

void BM_Eigenvalues(benchmark::State& state) {
    const Scenario s = nominal(ControlType::gfl, true);
    const StateSpaceModel ss = linearize(s, solve_operating_point(s, s.op));
    for (auto _ : state) benchmark::DoNotOptimize(eigenvalues(ss));
}
BENCHMARK(BM_Eigenvalues);

void BM_Sweep(benchmark::State& state) {
    const Scenario base = default_scenario();
    SweepOptions opt;
    opt.jobs = static_cast<unsigned>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(sweep(base, base.study, opt));
}
BENCHMARK(BM_Sweep)->Arg(1)->Arg(0)->Unit(benchmark::kMillisecond);

void BM_Simulate100ms(benchmark::State& state) {
    const Scenario s = nominal(ControlType::gfl, true);
    const EquilibriumPoint eq = solve_operating_point(s, s.op);
    for (auto _ : state) {
        benchmark::DoNotOptimize(integrate(make_model(s, eq), eq.state, 0.1, 5e-5, {}));
    }
}
BENCHMARK(BM_Simulate100ms)->Unit(benchmark::kMillisecond);

void BM_EscrClosedForm(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(escr_with_sc({0.55, 0.8, 0.075}));
}
BENCHMARK(BM_EscrClosedForm);

}  // namespace
BENCHMARK_MAIN();
