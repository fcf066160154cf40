#include "tfmm/bench.hpp"

#include <cmath>
#include <stdexcept>

namespace tfmm {

namespace {

void check_series(const std::vector<std::vector<double>>& weights,
                  const std::vector<std::vector<double>>& prices, double v0) {
    if (weights.size() != prices.size())
        throw std::invalid_argument("weights/prices length mismatch");
    if (weights.empty()) throw std::invalid_argument("empty series");
    if (!(v0 > 0.0)) throw std::invalid_argument("v0 must be positive");
    const std::size_t n = weights[0].size();
    for (std::size_t t = 0; t < weights.size(); ++t) {
        if (weights[t].size() != n || prices[t].size() != n)
            throw std::invalid_argument("series dimension mismatch");
        for (double p : prices[t])
            if (!(p > 0.0)) throw std::invalid_argument("prices must be positive");
    }
}

} // namespace

void BenchmarkParams::validate() const {
    if (!(commission_rate >= 0.0 && commission_rate <= 0.1))
        throw std::invalid_argument("commission_rate must lie in [0, 0.1]");
    if (!(half_spread_rate >= 0.0 && half_spread_rate <= 0.1))
        throw std::invalid_argument("half_spread_rate must lie in [0, 0.1]");
    if (rebalance_cadence_blocks < 1)
        throw std::invalid_argument("rebalance cadence must be at least 1 block");
}

std::vector<double> lvr_series(const std::vector<std::vector<double>>& weights,
                               const std::vector<std::vector<double>>& prices, double v0) {
    check_series(weights, prices, v0);
    std::vector<double> value(weights.size());
    value[0] = v0;
    for (std::size_t t = 1; t < weights.size(); ++t) {
        double growth = 0.0;
        for (std::size_t i = 0; i < weights[t - 1].size(); ++i)
            growth += weights[t - 1][i] * prices[t][i] / prices[t - 1][i];
        value[t] = value[t - 1] * growth;
    }
    return value;
}

std::vector<double> rvr_series(const std::vector<std::vector<double>>& weights,
                               const std::vector<std::vector<double>>& prices, double v0,
                               const BenchmarkParams& params) {
    check_series(weights, prices, v0);
    params.validate();
    const double rate = params.commission_rate + params.half_spread_rate;
    const std::size_t n = weights[0].size();

    std::vector<double> value(weights.size());
    value[0] = v0;
    // Allocation drifts away from the last rebalanced target between
    // rebalance blocks; turnover is measured against that drifted mix.
    std::vector<double> held = weights[0];
    std::size_t last_rebalance = 0;
    for (std::size_t t = 1; t < weights.size(); ++t) {
        double growth = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            growth += weights[t - 1][i] * prices[t][i] / prices[t - 1][i];
        double v = value[t - 1] * growth;

        if ((t - last_rebalance) >= static_cast<std::size_t>(params.rebalance_cadence_blocks)) {
            double norm = 0.0;
            std::vector<double> theta(n);
            for (std::size_t i = 0; i < n; ++i) {
                theta[i] = held[i] * prices[t][i] / prices[last_rebalance][i];
                norm += theta[i];
            }
            double turnover = 0.0;
            for (std::size_t i = 0; i < n; ++i) turnover += std::abs(weights[t][i] - theta[i] / norm);
            v -= rate * v * turnover;
            held = weights[t];
            last_rebalance = t;
        }
        value[t] = v;
    }
    return value;
}

std::vector<double> relative_performance(const std::vector<double>& pool_values,
                                         const std::vector<double>& bench_values) {
    if (pool_values.size() != bench_values.size())
        throw std::invalid_argument("series length mismatch");
    if (pool_values.empty()) throw std::invalid_argument("empty series");
    if (!(pool_values[0] > 0.0 && bench_values[0] > 0.0))
        throw std::invalid_argument("series must start positive");
    std::vector<double> rel(pool_values.size());
    for (std::size_t t = 0; t < pool_values.size(); ++t)
        rel[t] = 100.0 * (pool_values[t] / pool_values[0] - bench_values[t] / bench_values[0]);
    return rel;
}

BenchmarkSeries benchmark_series(const std::vector<std::vector<double>>& weights,
                                 const std::vector<std::vector<double>>& prices,
                                 const std::vector<double>& pool_values,
                                 const BenchmarkParams& params) {
    if (pool_values.size() != weights.size())
        throw std::invalid_argument("pool value series length mismatch");
    BenchmarkSeries out;
    out.pool_value_usd = pool_values;
    out.lvr_value_usd = lvr_series(weights, prices, pool_values.at(0));
    out.rvr_value_usd = rvr_series(weights, prices, pool_values.at(0), params);
    out.rel_perf_vs_lvr_pp = relative_performance(pool_values, out.lvr_value_usd);
    out.rel_perf_vs_rvr_pp = relative_performance(pool_values, out.rvr_value_usd);
    return out;
}

} // namespace tfmm
