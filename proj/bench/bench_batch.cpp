// Serial reference vs OpenMP batch evaluation of one swarm generation.

#include <benchmark/benchmark.h>

#include "mmplan/io.hpp"
#include "mmplan/optimizer.hpp"
#include "mmplan/packing.hpp"
#include "mmplan/simulator.hpp"

using namespace mmplan;

namespace {

struct Fixture {
    sim::DigitalModel model{io::load_scenario(std::string(MMPLAN_DATA_DIR) + "/demo_cell/scenario.json")};
    sim::PnpTask task;

    Fixture() {
        const auto& sc = model.scenario();
        const auto layout = packing::compute_layout(sc.items, sc.boxes, sc.packing.margin);
        task = {0, sc.items[0].pick_poses[1], layout.spots[0][0], 0};
    }

    std::vector<BasePose> particles(int n) const {
        const opt::CounterRng rng(42);
        std::vector<BasePose> out;
        const auto& lim = model.scenario().pso.p_lim[0];
        for (int q = 0; q < n; ++q) out.push_back({rng.uniform(lim.min, lim.max, {static_cast<std::uint64_t>(q)})});
        return out;
    }
};

const Fixture& fixture() {
    static const Fixture f;
    return f;
}

void BM_BatchSerial(benchmark::State& state) {
    const auto& f = fixture();
    const auto ps = f.particles(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(f.model.batch_simulate_serial(ps, f.task));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_BatchOpenMP(benchmark::State& state) {
    const auto& f = fixture();
    const auto ps = f.particles(static_cast<int>(state.range(0)));
    const int jobs = static_cast<int>(state.range(1));
    for (auto _ : state) benchmark::DoNotOptimize(f.model.batch_simulate(ps, f.task, jobs));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_BatchSerial)->Arg(10)->Arg(100)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BatchOpenMP)->Args({10, 1})->Args({10, 4})->Args({100, 1})->Args({100, 4})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
