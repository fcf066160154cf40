// Optimal-arbitrage solver against external prices: pairwise closed
// condition from the first-order profit maximization, greedy multi-token
// iteration with a simultaneous-flow refinement, and the boundary-slip /
// under-trading diagnostics.
#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "tfmm/pool.hpp"

namespace tfmm {

struct ArbTrade {
    std::size_t token_in = 0;
    std::size_t token_out = 0;
    double amount_in = 0.0;
    double amount_out = 0.0;
    double profit_usd = 0.0;
    // Distance of the external price inside the nearest post-trade band
    // edge, in basis points (1e-4 log units). Zero means the trade parked
    // the pool exactly on the boundary.
    double post_trade_gap_bp = 0.0;
};

struct ArbOpportunity {
    bool exists = false;
    std::optional<ArbTrade> best_trade;
    double theoretical_max_profit_usd = 0.0;
    // Executable plan: greedy pairwise legs in execution order.
    std::vector<ArbTrade> legs;
};

struct BoundarySlip {
    double slip_bp = 0.0;
    double trade_fraction_of_tvl = 0.0;
};

// Value of the candidate swap at external prices. May be negative.
double profit_of_trade(const PoolState& pool, const PriceVector& prices,
                       std::size_t token_in, std::size_t token_out, double amount_in);

// Profit-maximizing trade on the pair (i, j), or nullopt when the external
// price ratio p_i/p_j sits inside the no-arb band.
std::optional<ArbTrade> optimal_arb_two_token(const PoolState& pool, const PriceVector& prices,
                                              std::size_t i, std::size_t j);

// Greedy pairwise iteration plus a direct maximization over simultaneous
// per-token net flows; reports the better of the two.
ArbOpportunity optimal_arb_multi(const PoolState& pool, const PriceVector& prices);

// How far inside the band edge the optimal trade lands, and its notional
// as a fraction of pool TVL. Requires an opportunity on (i, j).
BoundarySlip boundary_slip(const PoolState& pool, const PriceVector& prices,
                           std::size_t i, std::size_t j);

// Profit captured by trading each fraction of the optimal size, normalized
// by the optimal profit.
std::vector<std::pair<double, double>> undertrade_profile(const PoolState& pool,
                                                          const PriceVector& prices,
                                                          std::size_t i, std::size_t j,
                                                          const std::vector<double>& fractions);

// Distance of `price_ratio` inside the band, in basis points of log
// distance to the nearest edge; negative when outside.
double band_gap_bp(const NoArbBand& band, double price_ratio);

} // namespace tfmm
