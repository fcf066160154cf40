#include "tfmm/sim.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tfmm {

namespace {

double legs_profit(const std::vector<ArbTrade>& legs) {
    double p = 0.0;
    for (const auto& leg : legs) p += leg.profit_usd;
    return p;
}

} // namespace

void SimConfig::validate() const {
    if (n_blocks < 1) throw std::invalid_argument("n_blocks must be at least 1");
    const std::size_t n = pool.size();
    if (initial_prices.size() != n) throw std::invalid_argument("initial_prices size mismatch");
    if (trajectory.initial_weights().size() != n)
        throw std::invalid_argument("trajectory dimension mismatch");
    if (block_time_seconds <= 0.0) throw std::invalid_argument("block_time_seconds must be positive");
    chain_gas.validate();

    switch (price_process.kind) {
        case PriceProcess::Kind::Constant:
            break;
        case PriceProcess::Kind::GeometricBrownian:
            if (price_process.drift.size() != n || price_process.vol.size() != n)
                throw std::invalid_argument("gbm drift/vol must have one entry per token");
            break;
        case PriceProcess::Kind::Replay:
            if (price_process.series.size() < static_cast<std::size_t>(n_blocks))
                throw std::invalid_argument("replay series shorter than n_blocks");
            for (const auto& row : price_process.series) {
                if (row.size() != n) throw std::invalid_argument("replay row size mismatch");
                for (double p : row)
                    if (!(p > 0.0) || !std::isfinite(p))
                        throw std::invalid_argument("replay prices must be positive");
            }
            break;
    }

    for (const auto& agent : agents) {
        if (agent.kind == ArbitrageurAgent::Kind::StandaloneArb) {
            if (agent.gas) agent.gas->validate();
            if (agent.router_arrival_prob != 0.0)
                throw std::invalid_argument("standalone agent with router parameters");
            if (agent.sizing == SizingPolicy::Grid) {
                if (agent.size_grid.empty())
                    throw std::invalid_argument("grid sizing needs a size grid");
                for (double f : agent.size_grid)
                    if (!(f > 0.0 && f <= 1.0))
                        throw std::invalid_argument("size grid fractions must lie in (0,1]");
            }
        } else {
            if (agent.gas || !agent.size_grid.empty())
                throw std::invalid_argument("router agent with standalone parameters");
            if (!(agent.router_arrival_prob >= 0.0 && agent.router_arrival_prob <= 1.0))
                throw std::invalid_argument("arrival probability must lie in [0,1]");
            if (!(agent.router_notional_min_usd > 0.0 &&
                  agent.router_notional_max_usd >= agent.router_notional_min_usd))
                throw std::invalid_argument("router notional range invalid");
        }
    }
}

Simulator::Simulator(SimConfig config)
    : config_(std::move(config)),
      pool_(config_.pool),
      prices_(config_.initial_prices),
      rng_(config_.seed) {
    config_.validate();
    for (std::size_t a = 0; a < config_.agents.size(); ++a) {
        auto& agent = config_.agents[a];
        if (agent.id.empty()) agent.id = "agent_" + std::to_string(a);
        if (agent.kind == ArbitrageurAgent::Kind::StandaloneArb)
            standalone_idx_.push_back(a);
        else
            router_idx_.push_back(a);
    }
}

void Simulator::advance_prices(std::int64_t block) {
    switch (config_.price_process.kind) {
        case PriceProcess::Kind::Constant:
            break;
        case PriceProcess::Kind::GeometricBrownian: {
            std::normal_distribution<double> normal(0.0, 1.0);
            for (std::size_t i = 0; i < prices_.usd.size(); ++i) {
                const double z = normal(rng_);
                const double mu = config_.price_process.drift[i];
                const double sigma = config_.price_process.vol[i];
                prices_.usd[i] *= std::exp(mu - 0.5 * sigma * sigma + sigma * z);
            }
            break;
        }
        case PriceProcess::Kind::Replay:
            prices_.usd = config_.price_process.series[static_cast<std::size_t>(block)];
            break;
    }
}

TradeClass Simulator::tag_trade(double profit_usd, const std::vector<double>& pre_trade_reserves,
                                std::int64_t block) const {
    // Same "what for" test the analyzer applies: does an opportunity above
    // dust survive with weights frozen at the current window start?
    const auto stale_weights = config_.trajectory.window_start_weights(block);
    PoolState stale_pool(pre_trade_reserves, stale_weights, pool_.swap_fee_rate,
                         pool_.protocol_fee_share, pool_.token_ids, pool_.fee_side);
    const double stale_opp =
        optimal_arb_multi(stale_pool, prices_).theoretical_max_profit_usd;
    return classify_rule(profit_usd, stale_opp, config_.classify);
}

bool Simulator::try_strike(const ArbitrageurAgent& agent, std::int64_t block, SimBlock& rec,
                           const ArbOpportunity& opp) {
    if (!opp.exists || opp.legs.empty()) return false;
    const GasModel& gas = agent.gas ? *agent.gas : config_.chain_gas;
    const double threshold = threshold_usd(gas, block);

    // Pick the executable plan under the agent's sizing policy.
    double scale = 1.0;
    double planned_profit = legs_profit(opp.legs);
    if (agent.sizing == SizingPolicy::Grid) {
        double best_profit = 0.0;
        double best_scale = 0.0;
        for (double f : agent.size_grid) {
            PoolState probe = pool_;
            double profit = 0.0;
            for (const auto& leg : opp.legs) {
                const double amount = f * leg.amount_in;
                const double out = quote_swap(probe, leg.token_in, leg.token_out, amount);
                profit += prices_[leg.token_out] * out - prices_[leg.token_in] * amount;
                probe = execute_swap(probe, leg.token_in, leg.token_out, amount).pool;
            }
            if (profit > best_profit) {
                best_profit = profit;
                best_scale = f;
            }
        }
        if (best_scale == 0.0) return false;
        scale = best_scale;
        planned_profit = best_profit;
    }
    if (planned_profit < threshold) return false;

    const std::vector<double> pre_reserves = pool_.reserves;
    TradeEvent event;
    event.agent_id = agent.id;
    event.is_strike = true;
    for (const auto& leg : opp.legs) {
        const double amount = scale * leg.amount_in;
        SwapResult res = execute_swap(pool_, leg.token_in, leg.token_out, amount);
        ArbTrade executed = leg;
        executed.amount_in = amount;
        executed.amount_out = res.amount_out;
        executed.profit_usd =
            prices_[leg.token_out] * res.amount_out - prices_[leg.token_in] * amount;
        executed.post_trade_gap_bp = band_gap_bp(
            no_arb_band(res.pool, leg.token_out, leg.token_in),
            prices_[leg.token_out] / prices_[leg.token_in]);
        pool_ = res.pool;
        cum_skim_ += res.skimmed * prices_[res.fee_token];
        event.profit_usd += executed.profit_usd;
        event.legs.push_back(executed);
    }
    event.classification = tag_trade(event.profit_usd, pre_reserves, block);
    cum_empirical_ += event.profit_usd;
    rec.trades.push_back(std::move(event));
    return true;
}

void Simulator::try_route(const ArbitrageurAgent& agent, SimBlock& rec) {
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    const double arrival = uniform(rng_);
    if (arrival >= agent.router_arrival_prob) return;
    const double notional = agent.router_notional_min_usd +
                            uniform(rng_) * (agent.router_notional_max_usd -
                                             agent.router_notional_min_usd);

    // Route the drawn notional through whichever ordered pair reduces the
    // allocation drift the most; skip the arrival if nothing improves.
    const double pre_drift = allocation_drift(pool_, prices_);
    const std::size_t n = pool_.size();
    double best_drift = pre_drift;
    std::size_t best_in = 0, best_out = 0;
    double best_amount = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            double amount = notional / prices_[i];
            amount = std::min(amount, 0.25 * pool_.reserves[i]);
            if (!(amount > 0.0)) continue;
            const PoolState post = execute_swap(pool_, i, j, amount).pool;
            const double drift = allocation_drift(post, prices_);
            if (drift < best_drift) {
                best_drift = drift;
                best_in = i;
                best_out = j;
                best_amount = amount;
            }
        }
    }
    if (best_amount == 0.0) return;

    const std::vector<double> pre_reserves = pool_.reserves;
    SwapResult res = execute_swap(pool_, best_in, best_out, best_amount);
    ArbTrade trade;
    trade.token_in = best_in;
    trade.token_out = best_out;
    trade.amount_in = best_amount;
    trade.amount_out = res.amount_out;
    trade.profit_usd =
        prices_[best_out] * res.amount_out - prices_[best_in] * best_amount;
    trade.post_trade_gap_bp = band_gap_bp(no_arb_band(res.pool, best_in, best_out),
                                          prices_[best_in] / prices_[best_out]);
    pool_ = res.pool;
    cum_skim_ += res.skimmed * prices_[res.fee_token];

    TradeEvent event;
    event.agent_id = agent.id;
    event.is_strike = false;
    event.profit_usd = trade.profit_usd;
    event.legs.push_back(trade);
    event.classification = tag_trade(event.profit_usd, pre_reserves, rec.block);
    cum_empirical_ += event.profit_usd;
    rec.trades.push_back(std::move(event));
}

SimBlock Simulator::step() {
    if (done()) throw std::logic_error("simulation already finished");
    const std::int64_t b = next_block_++;

    pool_.weights = config_.trajectory.weights_at(b);
    if (b > 0) advance_prices(b);

    SimBlock rec;
    rec.block = b;
    rec.timestamp = config_.start_timestamp + static_cast<double>(b) * config_.block_time_seconds;
    rec.base_fee_gwei = config_.chain_gas.base_fee_gwei.at(b);
    rec.eth_price_usd = config_.chain_gas.eth_price_usd.at(b);

    const ArbOpportunity opp = optimal_arb_multi(pool_, prices_);
    rec.theoretical_opportunity_usd = opp.theoretical_max_profit_usd;

    double binding = threshold_usd(config_.chain_gas, b);
    for (std::size_t idx : standalone_idx_) {
        const auto& agent = config_.agents[idx];
        const GasModel& gas = agent.gas ? *agent.gas : config_.chain_gas;
        binding = std::min(binding, threshold_usd(gas, b));
    }
    rec.threshold_usd = binding;

    if (b >= 1) {
        // One standalone strike per block; priority rotates round-robin.
        if (!standalone_idx_.empty()) {
            const std::size_t n_std = standalone_idx_.size();
            const std::size_t offset = static_cast<std::size_t>(b) % n_std;
            for (std::size_t k = 0; k < n_std; ++k) {
                const auto& agent = config_.agents[standalone_idx_[(k + offset) % n_std]];
                if (try_strike(agent, b, rec, opp)) break;
            }
        }
        for (std::size_t idx : router_idx_) try_route(config_.agents[idx], rec);
    }

    if (!rec.trades.empty()) cum_theoretical_ += opp.theoretical_max_profit_usd;

    rec.weights = pool_.weights;
    rec.reserves = pool_.reserves;
    rec.prices = prices_.usd;
    rec.allocation_drift = allocation_drift(pool_, prices_);
    rec.cum_empirical_usd = cum_empirical_;
    rec.cum_theoretical_usd = cum_theoretical_;
    rec.cum_skim_usd = cum_skim_;
    return rec;
}

SimTrace run(const SimConfig& config) {
    Simulator sim(config);
    SimTrace trace;
    trace.token_ids = sim.pool().token_ids;
    trace.swap_fee_rate = sim.pool().swap_fee_rate;
    trace.protocol_fee_share = sim.pool().protocol_fee_share;
    trace.block_time_seconds = config.block_time_seconds;
    trace.blocks.reserve(static_cast<std::size_t>(config.n_blocks));

    while (!sim.done()) trace.blocks.push_back(sim.step());

    const auto& first = trace.blocks.front();
    const auto& last = trace.blocks.back();
    PriceVector p0(first.prices), p1(last.prices);
    trace.initial_pool_value_usd =
        pool_value(PoolState(first.reserves, first.weights, trace.swap_fee_rate,
                             trace.protocol_fee_share, trace.token_ids),
                   p0);
    trace.final_pool_value_usd = pool_value(
        PoolState(last.reserves, last.weights, trace.swap_fee_rate, trace.protocol_fee_share,
                  trace.token_ids),
        p1);
    trace.total_empirical_usd = last.cum_empirical_usd;
    trace.total_theoretical_usd = last.cum_theoretical_usd;
    trace.total_skim_usd = last.cum_skim_usd;
    for (const auto& blk : trace.blocks) {
        for (const auto& ev : blk.trades) {
            if (ev.is_strike)
                ++trace.n_strikes;
            else
                ++trace.n_router_trades;
        }
    }
    return trace;
}

} // namespace tfmm
