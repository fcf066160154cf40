// Counterfactual CEX-rebalancer benchmarks over a weight/price history.
#pragma once

#include <cstdint>
#include <vector>

namespace tfmm {

struct BenchmarkParams {
    double commission_rate = 0.0010;  // fraction of traded notional
    double half_spread_rate = 0.0005; // fraction of traded notional
    std::int64_t rebalance_cadence_blocks = 1;

    void validate() const;
};

// Frictionless rebalancer holding the same per-block weight trajectory:
// V_{t+1} = V_t * sum_i w_i(t) * p_i(t+1)/p_i(t).
std::vector<double> lvr_series(const std::vector<std::vector<double>>& weights,
                               const std::vector<std::vector<double>>& prices, double v0);

// Same growth, minus (commission + half_spread) * V * turnover at each
// rebalance block, where turnover is sum_i |w_i(target) - theta_i| against
// the allocation drifted since the last rebalance. Zero rates reproduce
// the frictionless series exactly.
std::vector<double> rvr_series(const std::vector<std::vector<double>>& weights,
                               const std::vector<std::vector<double>>& prices, double v0,
                               const BenchmarkParams& params);

// 100 * (pool_t/pool_0 - bench_t/bench_0), in percentage points.
std::vector<double> relative_performance(const std::vector<double>& pool_values,
                                         const std::vector<double>& bench_values);

struct BenchmarkSeries {
    std::vector<double> pool_value_usd;
    std::vector<double> lvr_value_usd;
    std::vector<double> rvr_value_usd;
    std::vector<double> rel_perf_vs_lvr_pp;
    std::vector<double> rel_perf_vs_rvr_pp;
};

BenchmarkSeries benchmark_series(const std::vector<std::vector<double>>& weights,
                                 const std::vector<std::vector<double>>& prices,
                                 const std::vector<double>& pool_values,
                                 const BenchmarkParams& params);

} // namespace tfmm
