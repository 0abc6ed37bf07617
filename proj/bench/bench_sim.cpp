// Serial vs OpenMP Monte Carlo kernels on the two-tier default network.

#include <benchmark/benchmark.h>

#include "hetcache/model.hpp"
#include "hetcache/sim.hpp"

using namespace hetcache;

namespace {

NetworkModel two_tier() {
    const double lambda = 1.0 / (3.14159265358979 * 0.25);
    return NetworkModel(3.0, {{lambda, dbm_to_watt(46), db_to_linear(-4), 1},
                              {10 * lambda, dbm_to_watt(30), db_to_linear(-4), 1}});
}

void run(benchmark::State& state, Execution exec) {
    const NetworkModel model = two_tier();
    const PlacementMatrix p = PlacementMatrix::from_rows({{1.0, 0.6}});
    SimConfig cfg;
    cfg.execution = exec;
    cfg.threads = exec == Execution::Parallel ? static_cast<int>(state.range(1)) : 1;
    const auto trials = static_cast<std::uint64_t>(state.range(0));
    std::uint64_t key = 1;
    for (auto _ : state) {
        const auto hits = exec == Execution::Serial ? count_hits_serial(model, p, 0, cfg, key, trials)
                                                    : count_hits_parallel(model, p, 0, cfg, key, trials);
        benchmark::DoNotOptimize(hits);
        ++key;
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_Serial(benchmark::State& s) { run(s, Execution::Serial); }
void BM_OpenMP(benchmark::State& s) { run(s, Execution::Parallel); }

}  // namespace

BENCHMARK(BM_Serial)->Args({20000, 1})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_OpenMP)->ArgsProduct({{20000}, {1, 2, 4}})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
