// Test-only oracles. Each one reaches the answer by a route independent of
// the implementation path it checks: bisection on the invariant residual,
// exhaustive grid search over trade sizes, exhaustive search over the flow
// space, plain least squares.
#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "tfmm/pool.hpp"

namespace oracle {

// Swap output that preserves the invariant on fee-inclusive reserves,
// found by bisecting the log-invariant residual.
inline double swap_out_bisect(const tfmm::PoolState& pool, std::size_t i, std::size_t j,
                              double amount_in) {
    const double gamma = 1.0 - pool.swap_fee_rate;
    const double eff_in = pool.fee_side == tfmm::FeeSide::Input ? gamma * amount_in : amount_in;
    const double target = pool.weights[i] * std::log(pool.reserves[i]) +
                          pool.weights[j] * std::log(pool.reserves[j]);
    auto residual = [&](double out) {
        return pool.weights[i] * std::log(pool.reserves[i] + eff_in) +
               pool.weights[j] * std::log(pool.reserves[j] - out) - target;
    };
    double lo = 0.0, hi = pool.reserves[j] * (1.0 - 1e-15);
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (residual(mid) > 0.0 ? lo : hi) = mid;
    }
    const double gross = 0.5 * (lo + hi);
    return pool.fee_side == tfmm::FeeSide::Output ? gamma * gross : gross;
}

// Size of the trade that restores price equality (the "naive" size); an
// upper bracket for the profit-maximizing size.
inline double alignment_trade_size(const tfmm::PoolState& pool, const tfmm::PriceVector& prices,
                                   std::size_t token_in, std::size_t token_out) {
    const double eta = pool.weights[token_in] / pool.weights[token_out];
    const double gamma = 1.0 - pool.swap_fee_rate;
    const double log_u = (std::log(eta * pool.reserves[token_out]) +
                          eta * std::log(pool.reserves[token_in]) +
                          std::log(prices[token_out] / prices[token_in])) /
                         (1.0 + eta);
    return (std::exp(log_u) - pool.reserves[token_in]) / gamma;
}

struct GridBest {
    bool found = false;
    std::size_t token_in = 0;
    std::size_t token_out = 0;
    double amount_in = 0.0;
    double profit = 0.0;
};

// Best trade on the pair by exhaustive search: a coarse scan over
// [0, alignment size] followed by a fine scan around the best coarse cell.
// coarse + fine evaluations per direction.
inline GridBest grid_best_trade(const tfmm::PoolState& pool, const tfmm::PriceVector& prices,
                                std::size_t i, std::size_t j, int coarse = 100, int fine = 9900) {
    GridBest best;
    auto value = [&](std::size_t in, std::size_t out, double x) {
        if (!(x > 0.0)) return -1.0;
        const double got = tfmm::quote_swap(pool, in, out, x);
        return prices[out] * got - prices[in] * x;
    };
    for (auto [in, out] : {std::pair<std::size_t, std::size_t>{i, j}, {j, i}}) {
        const double bracket = alignment_trade_size(pool, prices, in, out);
        if (!(bracket > 0.0)) continue;
        double best_x = 0.0, best_p = 0.0;
        const double step = bracket / coarse;
        for (int k = 1; k <= coarse; ++k) {
            const double x = step * k;
            const double p = value(in, out, x);
            if (p > best_p) {
                best_p = p;
                best_x = x;
            }
        }
        const double lo = std::max(step * 1e-6, best_x - step);
        const double hi = std::min(bracket, best_x + step);
        for (int k = 0; k <= fine; ++k) {
            const double x = lo + (hi - lo) * k / fine;
            const double p = value(in, out, x);
            if (p > best_p) {
                best_p = p;
                best_x = x;
            }
        }
        if (best_p > best.profit) {
            best = GridBest{true, in, out, best_x, best_p};
        }
    }
    if (best.profit <= 0.0) best.found = false;
    return best;
}

// Exhaustive search over simultaneous per-token net flows for a 3-token
// pool: 2-d grid in log-reserve moves with one refinement pass.
inline double flow_grid_best_3token(const tfmm::PoolState& pool, const tfmm::PriceVector& prices,
                                    double span = 0.2, int steps = 200) {
    const double gamma = 1.0 - pool.swap_fee_rate;
    auto payoff = [&](double t0, double t1) {
        const double t2 = -(pool.weights[0] * t0 + pool.weights[1] * t1) / pool.weights[2];
        const double t[3] = {t0, t1, t2};
        double profit = 0.0;
        for (int k = 0; k < 3; ++k) {
            const double e = pool.reserves[k] * std::exp(t[k]);
            if (e > pool.reserves[k])
                profit -= prices[k] * (e - pool.reserves[k]) / gamma;
            else
                profit += prices[k] * (pool.reserves[k] - e);
        }
        return profit;
    };
    double best = 0.0, b0 = 0.0, b1 = 0.0;
    double lo0 = -span, hi0 = span, lo1 = -span, hi1 = span;
    for (int pass = 0; pass < 3; ++pass) {
        for (int a = 0; a <= steps; ++a) {
            for (int b = 0; b <= steps; ++b) {
                const double t0 = lo0 + (hi0 - lo0) * a / steps;
                const double t1 = lo1 + (hi1 - lo1) * b / steps;
                const double p = payoff(t0, t1);
                if (p > best) {
                    best = p;
                    b0 = t0;
                    b1 = t1;
                }
            }
        }
        const double w0 = (hi0 - lo0) / steps, w1 = (hi1 - lo1) / steps;
        lo0 = b0 - 2 * w0;
        hi0 = b0 + 2 * w0;
        lo1 = b1 - 2 * w1;
        hi1 = b1 + 2 * w1;
    }
    return best;
}

struct LinFit {
    double intercept = 0.0;
    double slope = 0.0;
    double r2 = 0.0;
};

inline LinFit linfit(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        sx += x[k];
        sy += y[k];
        sxx += x[k] * x[k];
        sxy += x[k] * y[k];
        syy += y[k] * y[k];
    }
    LinFit fit;
    fit.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    fit.intercept = (sy - fit.slope * sx) / n;
    double ss_res = 0, ss_tot = 0;
    const double mean_y = sy / n;
    for (std::size_t k = 0; k < x.size(); ++k) {
        const double fit_y = fit.intercept + fit.slope * x[k];
        ss_res += (y[k] - fit_y) * (y[k] - fit_y);
        ss_tot += (y[k] - mean_y) * (y[k] - mean_y);
    }
    fit.r2 = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
    return fit;
}

} // namespace oracle
