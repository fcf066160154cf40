#include "tfmm/pool.hpp"

#include <cmath>
#include <set>
#include <stdexcept>

namespace tfmm {

namespace {

constexpr double kWeightSumTol = 1e-12;

void require(bool cond, const char* what, bool domain = false) {
    if (!cond) {
        if (domain) throw std::domain_error(what);
        throw std::invalid_argument(what);
    }
}

void check_pair(const PoolState& pool, std::size_t i, std::size_t j) {
    require(i < pool.size() && j < pool.size(), "token index out of range");
    require(i != j, "token indices must differ");
    for (double r : pool.reserves)
        require(r > 0.0, "degenerate pool: zero reserve", /*domain=*/true);
}

} // namespace

PriceVector::PriceVector(std::vector<double> values) : usd(std::move(values)) {
    for (double p : usd)
        require(p > 0.0 && std::isfinite(p), "prices must be positive and finite");
}

PoolState::PoolState(std::vector<double> reserves_, std::vector<double> weights_,
                     double swap_fee_rate_, double protocol_fee_share_,
                     std::vector<std::string> token_ids_, FeeSide fee_side_)
    : reserves(std::move(reserves_)),
      weights(std::move(weights_)),
      swap_fee_rate(swap_fee_rate_),
      protocol_fee_share(protocol_fee_share_),
      token_ids(std::move(token_ids_)),
      fee_side(fee_side_) {
    require(reserves.size() >= 2, "pool needs at least two tokens");
    require(weights.size() == reserves.size(), "reserves/weights size mismatch");
    double sum = 0.0;
    for (double w : weights) {
        require(w > 0.0 && w < 1.0, "weights must lie strictly in (0,1)");
        sum += w;
    }
    require(std::abs(sum - 1.0) <= kWeightSumTol, "weights must sum to 1");
    for (double r : reserves)
        require(r >= 0.0 && std::isfinite(r), "reserves must be non-negative and finite");
    require(swap_fee_rate >= 0.0 && swap_fee_rate < 1.0, "swap_fee_rate must be in [0,1)");
    require(protocol_fee_share >= 0.0 && protocol_fee_share <= 1.0,
            "protocol_fee_share must be in [0,1]");
    if (token_ids.empty()) {
        for (std::size_t i = 0; i < reserves.size(); ++i)
            token_ids.push_back("token_" + std::to_string(i));
    }
    require(token_ids.size() == reserves.size(), "token_ids size mismatch");
    std::set<std::string> distinct(token_ids.begin(), token_ids.end());
    require(distinct.size() == token_ids.size(), "token_ids must be distinct");
}

double invariant_k(const PoolState& pool) {
    double log_k = 0.0;
    for (std::size_t i = 0; i < pool.size(); ++i) {
        if (pool.reserves[i] <= 0.0) throw std::domain_error("degenerate pool: zero reserve");
        log_k += pool.weights[i] * std::log(pool.reserves[i]);
    }
    return std::exp(log_k);
}

double quoted_price(const PoolState& pool, std::size_t i, std::size_t j) {
    check_pair(pool, i, j);
    return (pool.reserves[j] / pool.weights[j]) * (pool.weights[i] / pool.reserves[i]);
}

std::vector<double> value_allocation(const PoolState& pool, const PriceVector& prices) {
    require(prices.size() == pool.size(), "prices size mismatch");
    double total = 0.0;
    for (std::size_t i = 0; i < pool.size(); ++i) total += pool.reserves[i] * prices[i];
    if (total <= 0.0) throw std::domain_error("pool has zero value");
    std::vector<double> theta(pool.size());
    for (std::size_t i = 0; i < pool.size(); ++i) theta[i] = pool.reserves[i] * prices[i] / total;
    return theta;
}

double allocation_drift(const PoolState& pool, const PriceVector& prices) {
    const auto theta = value_allocation(pool, prices);
    double drift = 0.0;
    for (std::size_t i = 0; i < pool.size(); ++i) drift += std::abs(theta[i] - pool.weights[i]);
    return drift;
}

NoArbBand no_arb_band(const PoolState& pool, std::size_t i, std::size_t j) {
    const double mid = quoted_price(pool, i, j);
    const double gamma = pool.gamma();
    return NoArbBand{gamma * mid, mid / gamma, mid};
}

double quote_swap(const PoolState& pool, std::size_t token_in, std::size_t token_out,
                  double amount_in) {
    check_pair(pool, token_in, token_out);
    require(amount_in > 0.0 && std::isfinite(amount_in), "amount_in must be positive");

    const double r_in = pool.reserves[token_in];
    const double r_out = pool.reserves[token_out];
    const double exponent = pool.weights[token_in] / pool.weights[token_out];
    const double gamma = pool.gamma();

    // Input-side fee: only gamma * amount_in enters the curve.
    // Output-side fee: full input enters, output is scaled by gamma.
    const double eff_in = (pool.fee_side == FeeSide::Input) ? gamma * amount_in : amount_in;
    // out = R_out * (1 - (R_in / (R_in + eff_in))^exponent), via expm1/log1p
    // so quotes stay accurate for trades many orders below the reserves.
    const double z = eff_in / (r_in + eff_in);
    double out = -r_out * std::expm1(exponent * std::log1p(-z));
    if (pool.fee_side == FeeSide::Output) out *= gamma;
    return out;
}

SwapResult execute_swap(const PoolState& pool, std::size_t token_in, std::size_t token_out,
                        double amount_in) {
    const double out = quote_swap(pool, token_in, token_out, amount_in);

    SwapResult res;
    res.pool = pool;
    res.amount_out = out;
    if (pool.fee_side == FeeSide::Input) {
        res.fee_token = token_in;
        res.fee_paid = pool.swap_fee_rate * amount_in;
        res.skimmed = pool.protocol_fee_share * res.fee_paid;
        res.pool.reserves[token_in] += amount_in - res.skimmed;
        res.pool.reserves[token_out] -= out;
    } else {
        const double gross_out = out / pool.gamma();
        res.fee_token = token_out;
        res.fee_paid = pool.swap_fee_rate * gross_out;
        res.skimmed = pool.protocol_fee_share * res.fee_paid;
        res.pool.reserves[token_in] += amount_in;
        res.pool.reserves[token_out] -= out + res.skimmed;
    }
    if (res.pool.reserves[token_out] <= 0.0)
        throw std::domain_error("swap would drain the output reserve");
    return res;
}

double pool_value(const PoolState& pool, const PriceVector& prices) {
    require(prices.size() == pool.size(), "prices size mismatch");
    double total = 0.0;
    for (std::size_t i = 0; i < pool.size(); ++i) total += pool.reserves[i] * prices[i];
    return total;
}

} // namespace tfmm
