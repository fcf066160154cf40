// Block-by-block simulation: weights interpolate, external prices evolve,
// standalone arbitrageurs strike when the opportunity clears their gas
// threshold, incidental routers trade regardless of profit.
#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "tfmm/arb.hpp"
#include "tfmm/classify.hpp"
#include "tfmm/gas.hpp"
#include "tfmm/pool.hpp"
#include "tfmm/weights.hpp"

namespace tfmm {

struct PriceProcess {
    enum class Kind { Constant, GeometricBrownian, Replay };
    Kind kind = Kind::Constant;
    std::vector<double> drift; // per-block log drift, one entry per token
    std::vector<double> vol;   // per-block log volatility, one entry per token
    std::vector<std::vector<double>> series; // replay rows, one per block
};

enum class SizingPolicy { Optimal, Grid };

struct ArbitrageurAgent {
    enum class Kind { StandaloneArb, IncidentalRouter };
    Kind kind = Kind::StandaloneArb;
    std::string id;

    // StandaloneArb: cost model and sizing. Without an explicit gas model
    // the agent uses the chain-level one.
    std::optional<GasModel> gas;
    SizingPolicy sizing = SizingPolicy::Optimal;
    std::vector<double> size_grid; // candidate fractions of the optimal size

    // IncidentalRouter: bounded-notional flow that arrives per block.
    double router_notional_min_usd = 20.0;
    double router_notional_max_usd = 80.0;
    double router_arrival_prob = 0.0;
};

struct SimConfig {
    PoolState pool;
    PriceVector initial_prices;
    WeightTrajectory trajectory;
    PriceProcess price_process;
    GasModel chain_gas; // recorded in the trace; default agent cost model
    std::vector<ArbitrageurAgent> agents;
    std::int64_t n_blocks = 0;
    double block_time_seconds = 12.0;
    double start_timestamp = 0.0;
    std::uint64_t seed = 0;
    ClassifyParams classify;

    SimConfig() : trajectory(std::vector<double>{0.5, 0.5}) {}
    void validate() const;
};

struct TradeEvent {
    std::string agent_id;
    TradeClass classification = TradeClass::WeightDriven;
    bool is_strike = false; // standalone auction strike vs routed flow
    double profit_usd = 0.0;
    std::vector<ArbTrade> legs;
};

struct SimBlock {
    std::int64_t block = 0;
    double timestamp = 0.0;
    std::vector<double> weights;
    std::vector<double> reserves; // end of block
    std::vector<double> prices;
    double base_fee_gwei = 0.0;
    double eth_price_usd = 0.0;
    double allocation_drift = 0.0;            // end of block
    double threshold_usd = 0.0;               // binding standalone threshold
    double theoretical_opportunity_usd = 0.0; // before any trade this block
    std::vector<TradeEvent> trades;
    double cum_empirical_usd = 0.0;
    double cum_theoretical_usd = 0.0;
    double cum_skim_usd = 0.0;
};

struct SimTrace {
    std::vector<std::string> token_ids;
    double swap_fee_rate = 0.0;
    double protocol_fee_share = 0.5;
    double block_time_seconds = 12.0;
    std::vector<SimBlock> blocks;

    double initial_pool_value_usd = 0.0;
    double final_pool_value_usd = 0.0;
    double total_empirical_usd = 0.0;
    double total_theoretical_usd = 0.0;
    double total_skim_usd = 0.0;
    std::size_t n_strikes = 0;
    std::size_t n_router_trades = 0;
};

// Sequential within a run; independent runs are isolated and re-entrant.
class Simulator {
public:
    explicit Simulator(SimConfig config);

    // Advances one block and returns its record. Block 0 is the baseline
    // snapshot; trading starts at block 1.
    SimBlock step();
    bool done() const { return next_block_ >= config_.n_blocks; }

    const PoolState& pool() const { return pool_; }
    const SimConfig& config() const { return config_; }

private:
    void advance_prices(std::int64_t block);
    bool try_strike(const ArbitrageurAgent& agent, std::int64_t block, SimBlock& rec,
                    const ArbOpportunity& opp);
    void try_route(const ArbitrageurAgent& agent, SimBlock& rec);
    TradeClass tag_trade(double profit_usd, const std::vector<double>& pre_trade_reserves,
                         std::int64_t block) const;

    SimConfig config_;
    PoolState pool_;
    PriceVector prices_;
    std::mt19937_64 rng_;
    std::int64_t next_block_ = 0;
    double cum_empirical_ = 0.0;
    double cum_theoretical_ = 0.0;
    double cum_skim_ = 0.0;
    std::vector<std::size_t> standalone_idx_;
    std::vector<std::size_t> router_idx_;
};

SimTrace run(const SimConfig& config);

} // namespace tfmm
