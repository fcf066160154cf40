// Geometric-mean market maker pool: state, pricing, swaps, value accounting.
#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace tfmm {

// Side on which the swap fee is charged. Input is the Balancer vault
// convention and the default; output is provided as a switchable
// alternative since on-chain deployments differ.
enum class FeeSide { Input, Output };

// Strictly positive per-token prices in the numeraire (USD per token).
struct PriceVector {
    std::vector<double> usd;

    PriceVector() = default;
    explicit PriceVector(std::vector<double> values);

    double operator[](std::size_t i) const { return usd[i]; }
    std::size_t size() const { return usd.size(); }
};

// One pool at one block: reserves R_i, weights w_i (sum to 1), swap fee
// 1-gamma, and the vault's share of that fee which is skimmed out of the
// pool at swap time.
struct PoolState {
    std::vector<double> reserves;
    std::vector<double> weights;
    double swap_fee_rate = 0.0;
    double protocol_fee_share = 0.5;
    std::vector<std::string> token_ids;
    FeeSide fee_side = FeeSide::Input;

    PoolState() = default;
    PoolState(std::vector<double> reserves, std::vector<double> weights,
              double swap_fee_rate = 0.0, double protocol_fee_share = 0.5,
              std::vector<std::string> token_ids = {},
              FeeSide fee_side = FeeSide::Input);

    std::size_t size() const { return reserves.size(); }
    double gamma() const { return 1.0 - swap_fee_rate; }
};

// Multiplicative no-trade interval around the quoted marginal price.
struct NoArbBand {
    double lower = 0.0;       // gamma * quoted_mid
    double upper = 0.0;       // quoted_mid / gamma
    double quoted_mid = 0.0;

    bool contains(double price) const { return price >= lower && price <= upper; }
};

struct SwapResult {
    PoolState pool;
    double amount_out = 0.0;
    double fee_paid = 0.0;     // total fee charged, in fee_token units
    double skimmed = 0.0;      // part of the fee removed from the pool
    std::size_t fee_token = 0; // token the fee is denominated in
};

// prod_i R_i^{w_i}, evaluated in log space.
double invariant_k(const PoolState& pool);

// Marginal price of one unit of token i denominated in token j:
// (R_j / w_j) * (w_i / R_i).
double quoted_price(const PoolState& pool, std::size_t i, std::size_t j);

// theta_i = R_i p_i / sum_j R_j p_j.
std::vector<double> value_allocation(const PoolState& pool, const PriceVector& prices);

// sum_i |theta_i - w_i|; zero exactly when the pool quotes market prices.
double allocation_drift(const PoolState& pool, const PriceVector& prices);

NoArbBand no_arb_band(const PoolState& pool, std::size_t i, std::size_t j);

// Output amount for a swap of amount_in of token_in against token_out.
// Fee-inclusive reserves keep the invariant; the quote never touches state.
double quote_swap(const PoolState& pool, std::size_t token_in, std::size_t token_out,
                  double amount_in);

// Applies the swap and the protocol-fee skim, returning the new state.
// The input state is never modified.
SwapResult execute_swap(const PoolState& pool, std::size_t token_in, std::size_t token_out,
                        double amount_in);

// sum_i R_i p_i.
double pool_value(const PoolState& pool, const PriceVector& prices);

} // namespace tfmm
