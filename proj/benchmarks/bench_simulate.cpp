#include "kellystop/pde_solver.hpp"
#include "kellystop/simulate.hpp"

#include <benchmark/benchmark.h>

using namespace kellystop;

namespace {

const DerivedParams kDp = derive_params({0.10, 0.0, 0.10});

SimConfig config(std::size_t paths) {
    SimConfig c;
    c.n_paths = paths;
    c.n_steps = 250;
    c.stop_level = 0.95;
    c.threads = 1;
    return c;
}

}  // namespace

static void BM_SimulateKelly(benchmark::State& state) {
    const auto cfg = config(static_cast<std::size_t>(state.range(0)));
    const auto fn = constant_strategy(kDp.alpha_kelly);
    for (auto _ : state) benchmark::DoNotOptimize(simulate(cfg, kDp, fn).mean_log_growth);
    state.SetItemsProcessed(state.iterations() * state.range(0) * 250);
}
BENCHMARK(BM_SimulateKelly)->Arg(1024)->Arg(8192)->Unit(benchmark::kMillisecond);

static void BM_SimulateSurface(benchmark::State& state) {
    const auto cfg = config(static_cast<std::size_t>(state.range(0)));
    const auto s = solve_stop_loss(StopLossProblem::make(200, cfg.horizon / kDp.tau));
    const auto fn = surface_strategy(s, kDp, cfg.stop_level, cfg.horizon);
    for (auto _ : state) benchmark::DoNotOptimize(simulate(cfg, kDp, fn).mean_log_growth);
    state.SetItemsProcessed(state.iterations() * state.range(0) * 250);
}
BENCHMARK(BM_SimulateSurface)->Arg(1024)->Arg(8192)->Unit(benchmark::kMillisecond);
