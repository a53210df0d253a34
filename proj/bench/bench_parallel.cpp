// Parallel sweeps against their serial references.
#include <benchmark/benchmark.h>

#include <dssim/dse.hpp>
#include <dssim/oracle.hpp>

using namespace dssim;

namespace {

dse::GridSpec grid_spec() {
    auto spec = dse::load_grid_spec(app::data_dir() / "table6" / "grid.json");
    spec.workload.jobs = 150;
    return spec;
}

const app::AppTemplate& canonical() {
    static const auto g = app::build_canonical_graph().graph;
    return g;
}

const resource::SocConfig& canonical_soc() {
    static const auto soc = resource::load_soc_config(app::data_dir() / "canonical_soc.json");
    return soc;
}

void BM_GridParallel(benchmark::State& state) {
    const auto spec = grid_spec();
    for (auto _ : state) benchmark::DoNotOptimize(dse::grid_search(spec));
    state.counters["threads"] = dse::thread_count();
}

void BM_GridSerial(benchmark::State& state) {
    const auto spec = grid_spec();
    for (auto _ : state) benchmark::DoNotOptimize(dse::grid_search_serial(spec));
}

void BM_OracleParallel(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(sched::oracle_optimal_table(canonical(), canonical_soc()));
    state.counters["assignments"] = static_cast<double>(sched::assignment_space(canonical(), canonical_soc()));
}

void BM_OracleSerial(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(sched::oracle_optimal_table_serial(canonical(), canonical_soc()));
}

} // namespace

BENCHMARK(BM_GridParallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GridSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_OracleParallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_OracleSerial)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
