#include "tfmm/arb.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

namespace tfmm {

namespace {

constexpr int kMaxFocIterations = 200;
constexpr double kFocStepTol = 1e-12;

struct Direction {
    std::size_t token_in;
    std::size_t token_out;
    double eta;    // w_in / w_out
    double r_in;
    double r_out;
    double p_in;
    double p_out;
};

// First-order condition for max profit: the fee-adjusted marginal output
// value equals the input value. d(out)/d(in) = gamma * eta * R_out *
// R_in^eta * (R_in + gamma x)^-(eta+1), so the stationary point is
//   (R_in + gamma x)^(eta+1) = gamma * eta * R_out * R_in^eta * p_out/p_in.
double closed_form_size(const Direction& d, double gamma) {
    const double log_u = (std::log(gamma * d.eta * d.r_out) + d.eta * std::log(d.r_in) +
                          std::log(d.p_out / d.p_in)) /
                         (1.0 + d.eta);
    return (std::exp(log_u) - d.r_in) / gamma;
}

// One or two guarded Newton steps on the FOC polish the closed form to the
// limit of double precision.
double polish_size(const Direction& d, double gamma, double x) {
    for (int it = 0; it < kMaxFocIterations; ++it) {
        const double u = d.r_in + gamma * x;
        const double dout_din = gamma * d.eta * d.r_out * std::pow(d.r_in / u, d.eta) / u;
        const double g = d.p_out * dout_din - d.p_in;
        // g'(x) = -gamma (eta+1)/u * p_out * d(out)/d(in)
        const double gp = -gamma * (d.eta + 1.0) / u * d.p_out * dout_din;
        if (gp == 0.0) break;
        const double step = g / gp;
        const double next = x - step;
        if (!(next > 0.0) || !std::isfinite(next)) break;
        x = next;
        if (std::abs(step) <= kFocStepTol * std::max(1.0, x)) break;
    }
    return x;
}

ArbTrade make_trade(const PoolState& pool, const PriceVector& prices, std::size_t token_in,
                    std::size_t token_out, double amount_in, std::size_t i, std::size_t j) {
    ArbTrade trade;
    trade.token_in = token_in;
    trade.token_out = token_out;
    trade.amount_in = amount_in;
    trade.amount_out = quote_swap(pool, token_in, token_out, amount_in);
    trade.profit_usd =
        prices[token_out] * trade.amount_out - prices[token_in] * trade.amount_in;
    const PoolState post = execute_swap(pool, token_in, token_out, amount_in).pool;
    trade.post_trade_gap_bp = band_gap_bp(no_arb_band(post, i, j), prices[i] / prices[j]);
    return trade;
}

// --------------------- simultaneous-flow refinement ---------------------
//
// A single multi-asset trade moves the fee-discounted reserves along the
// invariant surface: E_i = R_i e^{t_i} with sum_i w_i t_i = 0. Inputs pay
// gross (E_i - R_i)/gamma, outputs deliver R_i - E_i. The payoff is concave
// in t (the fee switch at t_i = 0 only drops the slope), so a derivative-
// free simplex search is enough.
double flow_profit(const PoolState& pool, const PriceVector& prices,
                   const std::vector<double>& t_free) {
    const std::size_t n = pool.size();
    const double gamma = pool.gamma();
    double wt = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) wt += pool.weights[i] * t_free[i];
    const double t_last = -wt / pool.weights[n - 1];
    double profit = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double t = (i + 1 < n) ? t_free[i] : t_last;
        if (std::abs(t) > 690.0) return -1e300;
        const double e = pool.reserves[i] * std::exp(t);
        if (e > pool.reserves[i])
            profit -= prices[i] * (e - pool.reserves[i]) / gamma;
        else
            profit += prices[i] * (pool.reserves[i] - e);
    }
    return profit;
}

double nelder_mead_max(const std::function<double(const std::vector<double>&)>& f,
                       std::vector<double> x0, double step, int max_iter) {
    const std::size_t dim = x0.size();
    std::vector<std::vector<double>> simplex(dim + 1, x0);
    for (std::size_t i = 0; i < dim; ++i) simplex[i + 1][i] += step;
    std::vector<double> fv(dim + 1);
    for (std::size_t i = 0; i <= dim; ++i) fv[i] = f(simplex[i]);

    auto order = [&] {
        std::vector<std::size_t> idx(dim + 1);
        for (std::size_t i = 0; i <= dim; ++i) idx[i] = i;
        std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return fv[a] > fv[b]; });
        std::vector<std::vector<double>> s2(dim + 1);
        std::vector<double> f2(dim + 1);
        for (std::size_t i = 0; i <= dim; ++i) {
            s2[i] = simplex[idx[i]];
            f2[i] = fv[idx[i]];
        }
        simplex.swap(s2);
        fv.swap(f2);
    };

    for (int it = 0; it < max_iter; ++it) {
        order();
        if (std::abs(fv[0] - fv[dim]) <= 1e-13 * (std::abs(fv[0]) + 1e-9)) break;
        std::vector<double> centroid(dim, 0.0);
        for (std::size_t i = 0; i < dim; ++i)
            for (std::size_t k = 0; k < dim; ++k) centroid[k] += simplex[i][k] / double(dim);
        auto blend = [&](double coef) {
            std::vector<double> p(dim);
            for (std::size_t k = 0; k < dim; ++k)
                p[k] = centroid[k] + coef * (centroid[k] - simplex[dim][k]);
            return p;
        };
        auto refl = blend(1.0);
        double fr = f(refl);
        if (fr > fv[0]) {
            auto exp_p = blend(2.0);
            double fe = f(exp_p);
            if (fe > fr) { simplex[dim] = exp_p; fv[dim] = fe; }
            else { simplex[dim] = refl; fv[dim] = fr; }
        } else if (fr > fv[dim - 1]) {
            simplex[dim] = refl;
            fv[dim] = fr;
        } else {
            auto contr = blend(fr > fv[dim] ? 0.5 : -0.5);
            double fc = f(contr);
            if (fc > std::max(fr, fv[dim])) { simplex[dim] = contr; fv[dim] = fc; }
            else {
                for (std::size_t i = 1; i <= dim; ++i) {
                    for (std::size_t k = 0; k < dim; ++k)
                        simplex[i][k] = simplex[0][k] + 0.5 * (simplex[i][k] - simplex[0][k]);
                    fv[i] = f(simplex[i]);
                }
            }
        }
    }
    order();
    return fv[0];
}

} // namespace

double band_gap_bp(const NoArbBand& band, double price_ratio) {
    const double lo = std::log(price_ratio / band.lower);
    const double hi = std::log(band.upper / price_ratio);
    return 1e4 * std::min(lo, hi);
}

double profit_of_trade(const PoolState& pool, const PriceVector& prices, std::size_t token_in,
                       std::size_t token_out, double amount_in) {
    if (prices.size() != pool.size()) throw std::invalid_argument("prices size mismatch");
    const double out = quote_swap(pool, token_in, token_out, amount_in);
    return prices[token_out] * out - prices[token_in] * amount_in;
}

std::optional<ArbTrade> optimal_arb_two_token(const PoolState& pool, const PriceVector& prices,
                                              std::size_t i, std::size_t j) {
    if (prices.size() != pool.size()) throw std::invalid_argument("prices size mismatch");
    const NoArbBand band = no_arb_band(pool, i, j); // validates pair + reserves
    const double m_p = prices[i] / prices[j];
    const double gamma = pool.gamma();

    Direction d{};
    if (m_p > band.upper) {
        // Pool undervalues token i: pay j, receive i.
        d = Direction{j, i, pool.weights[j] / pool.weights[i], pool.reserves[j],
                      pool.reserves[i], prices[j], prices[i]};
    } else if (m_p < band.lower) {
        // Pool overvalues token i: pay i, receive j.
        d = Direction{i, j, pool.weights[i] / pool.weights[j], pool.reserves[i],
                      pool.reserves[j], prices[i], prices[j]};
    } else {
        return std::nullopt;
    }

    double x = closed_form_size(d, gamma);
    if (!(x > 0.0) || !std::isfinite(x)) return std::nullopt;
    x = polish_size(d, gamma, x);
    ArbTrade trade = make_trade(pool, prices, d.token_in, d.token_out, x, i, j);
    if (!(trade.profit_usd > 0.0)) return std::nullopt;
    return trade;
}

ArbOpportunity optimal_arb_multi(const PoolState& pool, const PriceVector& prices) {
    if (prices.size() != pool.size()) throw std::invalid_argument("prices size mismatch");
    const std::size_t n = pool.size();

    ArbOpportunity opp;
    bool outside = false;
    for (std::size_t i = 0; i < n && !outside; ++i)
        for (std::size_t j = i + 1; j < n && !outside; ++j)
            if (!no_arb_band(pool, i, j).contains(prices[i] / prices[j])) outside = true;
    if (!outside) return opp;

    const double dust = 1e-13 * std::max(pool_value(pool, prices), 1.0);

    // Greedy: take the most profitable pair, execute, repeat. Ties resolve
    // to the lowest (i, j) because only strictly better trades replace the
    // incumbent.
    PoolState work = pool;
    double greedy_total = 0.0;
    for (int round = 0; round < 256; ++round) {
        std::optional<ArbTrade> best;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                auto t = optimal_arb_two_token(work, prices, i, j);
                if (t && (!best || t->profit_usd > best->profit_usd)) best = t;
            }
        }
        if (!best || best->profit_usd <= dust) break;
        work = execute_swap(work, best->token_in, best->token_out, best->amount_in).pool;
        greedy_total += best->profit_usd;
        opp.legs.push_back(*best);
    }

    double direct = greedy_total;
    if (n > 2 && !opp.legs.empty()) {
        auto objective = [&](const std::vector<double>& t) {
            return flow_profit(pool, prices, t);
        };
        // Start from the greedy endpoint (in fee-discounted reserve space)
        // and from the origin.
        std::vector<double> eff(pool.reserves);
        for (const auto& leg : opp.legs) {
            eff[leg.token_in] += pool.gamma() * leg.amount_in;
            eff[leg.token_out] -= leg.amount_out;
        }
        std::vector<double> start(n - 1);
        for (std::size_t i = 0; i + 1 < n; ++i) start[i] = std::log(eff[i] / pool.reserves[i]);
        const double from_greedy = nelder_mead_max(objective, start, 0.01, 2000);
        const double from_origin =
            nelder_mead_max(objective, std::vector<double>(n - 1, 0.0), 0.01, 2000);
        direct = std::max({greedy_total, from_greedy, from_origin});
    }

    opp.theoretical_max_profit_usd = std::max(greedy_total, direct);
    opp.exists = opp.theoretical_max_profit_usd > 0.0;
    if (!opp.legs.empty()) opp.best_trade = opp.legs.front();
    return opp;
}

BoundarySlip boundary_slip(const PoolState& pool, const PriceVector& prices, std::size_t i,
                           std::size_t j) {
    auto trade = optimal_arb_two_token(pool, prices, i, j);
    if (!trade) throw std::invalid_argument("no arbitrage opportunity on the pair");
    BoundarySlip slip;
    slip.slip_bp = trade->post_trade_gap_bp;
    slip.trade_fraction_of_tvl =
        prices[trade->token_in] * trade->amount_in / pool_value(pool, prices);
    return slip;
}

std::vector<std::pair<double, double>> undertrade_profile(const PoolState& pool,
                                                          const PriceVector& prices,
                                                          std::size_t i, std::size_t j,
                                                          const std::vector<double>& fractions) {
    auto trade = optimal_arb_two_token(pool, prices, i, j);
    if (!trade) throw std::invalid_argument("no arbitrage opportunity on the pair");
    std::vector<std::pair<double, double>> profile;
    profile.reserve(fractions.size());
    for (double f : fractions) {
        if (!(f > 0.0 && f <= 1.0))
            throw std::invalid_argument("fractions must lie in (0,1]");
        const double p =
            profit_of_trade(pool, prices, trade->token_in, trade->token_out, f * trade->amount_in);
        profile.emplace_back(f, p / trade->profit_usd);
    }
    return profile;
}

} // namespace tfmm
