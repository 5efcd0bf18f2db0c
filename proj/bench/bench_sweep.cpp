// Serial vs OpenMP full-space evaluation sweep.
//
// Run: ./bench_sweep  (add --benchmark_filter=... to pick one)

#include <benchmark/benchmark.h>

#include "dse/config.hpp"
#include "dse/vehicle_model.hpp"

namespace {

const dse::ExplorationConfig& config() {
    static dse::ExplorationConfig cfg =
        dse::load_config(std::string(DSE_REPO_ROOT) + "/configs/robotaxi.json");
    return cfg;
}

const dse::VehicleModel& model() {
    static dse::VehicleModel m(config().calibration);
    return m;
}

void BM_GroundTruthSerial(benchmark::State& state) {
    for (auto _ : state) {
        auto truth =
            dse::ground_truth_serial(model(), config().space, config().scenario, 1);
        benchmark::DoNotOptimize(truth);
    }
    state.SetItemsProcessed(state.iterations() *
                            static_cast<std::int64_t>(config().space.size()));
}

void BM_GroundTruthParallel(benchmark::State& state) {
    for (auto _ : state) {
        auto truth = dse::ground_truth(model(), config().space, config().scenario, 1);
        benchmark::DoNotOptimize(truth);
    }
    state.SetItemsProcessed(state.iterations() *
                            static_cast<std::int64_t>(config().space.size()));
}

void BM_SimulateOnePoint(benchmark::State& state) {
    const dse::DesignPoint p{18, 1.8, 7};
    for (auto _ : state) {
        auto sim = model().simulate(p, config().scenario, 1);
        benchmark::DoNotOptimize(sim);
    }
}

BENCHMARK(BM_SimulateOnePoint)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GroundTruthSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GroundTruthParallel)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
