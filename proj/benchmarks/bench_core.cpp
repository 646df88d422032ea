#include <benchmark/benchmark.h>

#include <random>

#include <riskcontract/benchmark.hpp>
#include <riskcontract/minimax.hpp>
#include <riskcontract/oracle.hpp>
#include <riskcontract/risk.hpp>

using namespace riskcontract;

namespace {

Scenario large_scenario(std::size_t m)
{
    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> unit(0.05, 1.0);
    std::uniform_real_distribution<double> income(-3.0, 1.0);
    std::vector<double> p(m);
    double total = 0.0;
    for (double& x : p) {
        x = unit(gen);
        total += x;
    }
    for (double& x : p)
        x /= total;
    double acc = 0.0;
    for (double x : p)
        acc += x;
    p.back() += 1.0 - acc;
    Position w(m);
    for (double& x : w)
        x = income(gen);
    return Scenario::make(std::move(p), std::move(w));
}

const Scenario kExampleTwo = Scenario::make({0.25, 0.75}, {-1.0, -2.0});
const TypeGrid kGridTwo = TypeGrid::make(
    0.5, {0.5, 0.625, 0.75, 0.875, 1.0},
    {1.0 / 15, 2.0 / 15, 3.0 / 15, 4.0 / 15, 5.0 / 15});

void bm_avar_quantile(benchmark::State& state)
{
    const Scenario sc = large_scenario(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state)
        benchmark::DoNotOptimize(avar_quantile(sc, sc.income, 0.05));
}

void bm_avar_dual(benchmark::State& state)
{
    const Scenario sc = large_scenario(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state)
        benchmark::DoNotOptimize(avar_dual(sc, sc.income, 20.0).risk);
}

void bm_exact_avar_lp(benchmark::State& state)
{
    const Scenario sc = large_scenario(12);
    for (auto _ : state)
        benchmark::DoNotOptimize(exact_avar_lp(sc, sc.income, 1.5).risk);
}

void bm_newton_step(benchmark::State& state)
{
    const SmoothingParams params;
    const SolverConfig config;
    const KKTState init = KKTState::reference_start(5, 2);
    for (auto _ : state)
        benchmark::DoNotOptimize(
            newton_step(init, kExampleTwo, kGridTwo, params, config)
                .step_length);
}

void bm_solve_minimax_loose(benchmark::State& state)
{
    const SmoothingParams params;
    const SolverConfig config;
    for (auto _ : state) {
        const MinimaxSolution sol = solve_minimax(
            kExampleTwo, kGridTwo, params, config,
            KKTState::reference_start(5, 2));
        benchmark::DoNotOptimize(sol.objective);
    }
}

void bm_grid_search(benchmark::State& state)
{
    const Scenario sc = Scenario::make({0.25, 0.75}, {-1.0, -2.0});
    const TypeGrid grid = TypeGrid::make(
        0.5, {0.5, 0.75, 1.0}, {1.0 / 15, 3.0 / 15, 5.0 / 15});
    GridSearchSpec spec;
    spec.resolution = static_cast<int>(state.range(0));
    for (auto _ : state)
        benchmark::DoNotOptimize(
            grid_search_minimax(sc, grid, SmoothingParams{}, 1.1, spec)
                .objective);
}

void bm_quantize_normal(benchmark::State& state)
{
    for (auto _ : state)
        benchmark::DoNotOptimize(
            quantize_normal(0.5, 0.2236, static_cast<int>(state.range(0)),
                            -0.11, 0.1)
                .scenario.size());
}

} // namespace

BENCHMARK(bm_avar_quantile)->Arg(1000)->Arg(100000);
BENCHMARK(bm_avar_dual)->Arg(1000)->Arg(100000);
BENCHMARK(bm_exact_avar_lp);
BENCHMARK(bm_newton_step);
BENCHMARK(bm_solve_minimax_loose);
BENCHMARK(bm_grid_search)->Arg(21)->Arg(41);
BENCHMARK(bm_quantize_normal)->Arg(2000);

BENCHMARK_MAIN();
