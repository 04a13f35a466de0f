#include "kellystop/pde_solver.hpp"
#include "kellystop/value_fn.hpp"

#include <benchmark/benchmark.h>

#include <vector>

using namespace kellystop;

static void BM_EulerStep(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const Grid g = Grid::for_horizon(n, 1.0);
    std::vector<double> row(g.node_count(), 1.0);
    row.back() = 0.0;
    for (auto _ : state) {
        row = step_explicit_euler(row, g.dtheta(), g.dz());
        benchmark::DoNotOptimize(row.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_EulerStep)->Arg(100)->Arg(200)->Arg(400);

static void BM_SolveStopLoss(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto problem = StopLossProblem::make(n, 5.0);
    for (auto _ : state) {
        auto s = solve_stop_loss(problem);
        benchmark::DoNotOptimize(s.values().data());
    }
}
BENCHMARK(BM_SolveStopLoss)->Arg(50)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);

static void BM_ReconstructValue(benchmark::State& state) {
    const auto s = solve_stop_loss(StopLossProblem::make(200, 1.0));
    ReconstructOptions opts;
    opts.pi_lo = 1.0;
    opts.pi_hi = 10.0;
    for (auto _ : state) {
        auto c = reconstruct_value(s, 1.0, 0.95, opts);
        benchmark::DoNotOptimize(c.value.data());
    }
}
BENCHMARK(BM_ReconstructValue)->Unit(benchmark::kMillisecond);
