#include <benchmark/benchmark.h>

#include "riskfusion/simulation.hpp"
#include "riskfusion/solver.hpp"

using namespace riskfusion;

namespace {

FusionModel reference(double alpha, RewardCase rc) {
    return FusionModel{ObservationModel::symmetric(0.8), RiskAversion(alpha),
                       ControllerParams{0.1, 0.7, rc, 1e-3}};
}

void BM_Cvar(benchmark::State& state) {
    double p = 0.1;
    for (auto _ : state) {
        p = p < 0.9 ? p + 1e-6 : 0.1;
        benchmark::DoNotOptimize(cvar({0.4, -0.6}, Belief(p), RiskAversion(0.7)));
    }
}
BENCHMARK(BM_Cvar);

void BM_ValueIteration(benchmark::State& state) {
    const auto rc = state.range(1) ? RewardCase::Altruistic : RewardCase::SelfInterested;
    const auto model = reference(0.9, rc);
    const BeliefGrid grid(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(value_iteration(grid, model));
}
BENCHMARK(BM_ValueIteration)->Args({1001, 0})->Args({1001, 1})->Args({10001, 0})->Unit(benchmark::kMillisecond);

void BM_DenseOracle(benchmark::State& state) {
    const auto model = reference(0.9, RewardCase::SelfInterested);
    const auto solved = value_iteration(BeliefGrid(1001), model);
    for (auto _ : state)
        benchmark::DoNotOptimize(dense_price_oracle(Belief(0.4), solved.value, model, 10000));
}
BENCHMARK(BM_DenseOracle)->Unit(benchmark::kMicrosecond);

void BM_Ensemble(benchmark::State& state) {
    const auto model = reference(0.9, RewardCase::SelfInterested);
    const auto policy = value_iteration(BeliefGrid(1001), model).policy;
    for (auto _ : state)
        benchmark::DoNotOptimize(
            simulate_ensemble(policy, model, Belief(0.5), 200, static_cast<std::size_t>(state.range(0)), 1));
    state.SetItemsProcessed(state.iterations() * state.range(0) * 200);
}
BENCHMARK(BM_Ensemble)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
