// Serial vs OpenMP comparison for the data-parallel kernels: the per-block
// trace replay inside window_report and the sweep driver.
#include <benchmark/benchmark.h>

#include "tfmm/config.hpp"
#include "tfmm/parallel.hpp"
#include "tfmm/sim.hpp"
#include "tfmm/trace.hpp"

namespace {

tfmm::SimConfig replay_scenario() {
    tfmm::SimConfig cfg;
    cfg.pool = tfmm::PoolState({10.0, 350.0, 1.2e6}, {0.34, 0.33, 0.33}, 0.003, 0.5,
                               {"BTC", "PAXG", "USDC"});
    cfg.initial_prices = tfmm::PriceVector({118000.0, 3400.0, 1.0});
    cfg.trajectory = tfmm::WeightTrajectory(
        {0.34, 0.33, 0.33}, {{1, {0.345, 0.325, 0.33}, 500}});
    cfg.price_process.kind = tfmm::PriceProcess::Kind::GeometricBrownian;
    cfg.price_process.drift = {0.0, 0.0, 0.0};
    cfg.price_process.vol = {8e-4, 4e-4, 0.0};
    cfg.chain_gas.base_fee_gwei = 0.55;
    cfg.chain_gas.eth_price_usd = 3000.0;
    tfmm::ArbitrageurAgent agent;
    agent.kind = tfmm::ArbitrageurAgent::Kind::StandaloneArb;
    cfg.agents.push_back(agent);
    cfg.n_blocks = 600;
    cfg.seed = 7;
    return cfg;
}

const std::vector<tfmm::BlockRecord>& replay_records() {
    static const auto records = tfmm::sim_trace_records(tfmm::run(replay_scenario()));
    return records;
}

void bench_window_report(benchmark::State& state) {
    const auto& records = replay_records();
    tfmm::AnalyzerParams params;
    params.workers = static_cast<int>(state.range(0));
    for (auto _ : state) {
        const auto trades = tfmm::detect_trades(records, params);
        const auto report = tfmm::window_report(records, trades, params);
        benchmark::DoNotOptimize(report.total_theoretical_usd);
    }
}

void bench_sweep(benchmark::State& state) {
    const tfmm::SimConfig base = replay_scenario();
    const std::vector<double> steps{1, 2, 4, 8, 16, 32, 64, 128};
    const int workers = static_cast<int>(state.range(0));
    for (auto _ : state) {
        std::vector<double> extraction(steps.size());
        tfmm::parallel_for(static_cast<std::int64_t>(steps.size()), workers, [&](std::int64_t k) {
            const auto cfg = tfmm::apply_sweep_point(base, "n_steps", steps[k]);
            extraction[k] = tfmm::run(cfg).total_empirical_usd;
        });
        benchmark::DoNotOptimize(extraction);
    }
}

} // namespace

BENCHMARK(bench_window_report)->Arg(1)->Arg(0)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(bench_sweep)->Arg(1)->Arg(0)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
