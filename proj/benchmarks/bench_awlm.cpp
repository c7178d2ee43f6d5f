#include <benchmark/benchmark.h>

#include <random>

#include "awlm/gmm.hpp"
#include "awlm/model.hpp"
#include "awlm/sim.hpp"

using namespace awlm;

namespace {

Universe make_universe4() { return Universe({"a", "b", "c", "d"}); }

gmm::GmmDataset example_dataset() {
    const Universe universe = make_universe4();
    const MenuPair menu(universe, {"a", "b", "c"}, {"a", "b", "c", "d"});
    std::vector<gmm::RegimeData> regimes{
        {{0.4, 0.2, 0.1}, {19.0 / 60, 18.0 / 60, 23.0 / 60}, 60},
        {{0.3, 0.1, 0.2}, {18.0 / 60, 15.0 / 60, 27.0 / 60}, 60},
        {{0.25, 0.25, 0.25}, {15.0 / 60, 19.0 / 60, 26.0 / 60}, 60},
    };
    return {menu, std::move(regimes)};
}

void BM_awlm_choice(benchmark::State& state) {
    const Universe universe = make_universe4();
    const IndexSet S{0, 1, 2};
    const Dist p0(S, {0.6, 0.2, 0.2});
    const Dist q({0, 1, 2, 3}, {0.3, 0.2, 0.1, 0.4});
    for (auto _ : state) {
        benchmark::DoNotOptimize(awlm_choice(p0, q, 0.45, S));
    }
}
BENCHMARK(BM_awlm_choice);

void BM_simulate_regime(benchmark::State& state) {
    const Universe universe = make_universe4();
    const MenuPair menu(universe, IndexSet{0, 1, 2}, IndexSet{0, 1, 2, 3});
    const Dist q({0, 1, 2, 3}, {0.3, 0.2, 0.1, 0.4});
    const ModelParams params(0.6, LuceWeights({3.0, 1.0, 1.0, 2.0}));
    sim::SimConfig cfg(params, menu, q, state.range(0));
    sim::Rng rng(7);
    for (auto _ : state) {
        benchmark::DoNotOptimize(sim::simulate_regime(cfg, rng));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_simulate_regime)->Arg(1000)->Arg(10000);

void BM_concentrated_criterion(benchmark::State& state) {
    const auto data = example_dataset();
    const auto W = gmm::weight_blocks(data, gmm::WeightKind::identity, 0.0, 0.0, nullptr);
    double alpha = 0.3;
    for (auto _ : state) {
        benchmark::DoNotOptimize(gmm::concentrated_criterion(alpha, data, W));
        alpha = alpha < 0.7 ? alpha + 1e-4 : 0.3; // sweep to defeat caching
    }
}
BENCHMARK(BM_concentrated_criterion);

void BM_estimate_two_step(benchmark::State& state) {
    const auto data = example_dataset();
    for (auto _ : state) {
        benchmark::DoNotOptimize(gmm::estimate(data, {gmm::WeightKind::optimal}));
    }
}
BENCHMARK(BM_estimate_two_step);

void BM_chi2_upper_tail(benchmark::State& state) {
    double x = 0.1;
    for (auto _ : state) {
        benchmark::DoNotOptimize(gmm::chi2_upper_tail(x, 3));
        x = x < 30.0 ? x + 0.01 : 0.1;
    }
}
BENCHMARK(BM_chi2_upper_tail);

} // namespace

BENCHMARK_MAIN();
