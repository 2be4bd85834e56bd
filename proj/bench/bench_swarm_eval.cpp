// Serial versus OpenMP evaluation of one swarm generation on the tuning problem.

#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "exo/pso.hpp"
#include "exo/tuning.hpp"

namespace {

std::vector<std::vector<double>> random_swarm(std::size_t n) {
    std::mt19937_64 rng(7);
    std::vector<std::vector<double>> positions(n);
    for (auto& x : positions)
        for (const exo::Dimension& d : exo::gain_bounds())
            x.push_back(std::uniform_real_distribution<double>(d.min, d.max)(rng));
    return positions;
}

template <exo::Execution E>
void BM_SwarmEvaluation(benchmark::State& state) {
    const exo::StepResponseProblem problem;
    const auto positions = random_swarm(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        auto scores = exo::evaluate(positions, problem, E);
        benchmark::DoNotOptimize(scores.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK_TEMPLATE(BM_SwarmEvaluation, exo::Execution::serial)
    ->Arg(8)->Arg(30)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK_TEMPLATE(BM_SwarmEvaluation, exo::Execution::parallel)
    ->Arg(8)->Arg(30)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
