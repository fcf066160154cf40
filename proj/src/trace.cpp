#include "tfmm/trace.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "tfmm/arb.hpp"
#include "tfmm/io.hpp"
#include "tfmm/parallel.hpp"

namespace tfmm {

namespace {

using nlohmann::json;

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

double parse_number(const std::string& s, std::size_t line_no, const std::string& col) {
    const char* begin = s.c_str();
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin || *end != '\0' || !std::isfinite(v))
        throw std::runtime_error("line " + std::to_string(line_no) + ": malformed number in column " +
                                 col + ": '" + s + "'");
    return v;
}

struct TraceSchema {
    std::size_t n_tokens = 0;
    bool has_gas_used = false;
    bool has_priority_fee = false;
    bool has_tip = false;
    std::size_t n_columns = 0;
};

TraceSchema parse_header(const std::vector<std::string>& cols) {
    TraceSchema schema;
    std::size_t k = 0;
    auto expect = [&](const std::string& name) {
        if (k >= cols.size() || cols[k] != name)
            throw std::runtime_error("line 1: trace header must start with "
                                     "'block,timestamp,reserve_0..': missing column '" +
                                     name + "'");
        ++k;
    };
    expect("block");
    expect("timestamp");
    auto count_prefixed = [&](const std::string& prefix) {
        std::size_t n = 0;
        while (k < cols.size() && cols[k] == prefix + std::to_string(n)) {
            ++k;
            ++n;
        }
        return n;
    };
    schema.n_tokens = count_prefixed("reserve_");
    if (schema.n_tokens < 2)
        throw std::runtime_error("line 1: trace needs at least reserve_0 and reserve_1");
    if (count_prefixed("weight_") != schema.n_tokens)
        throw std::runtime_error("line 1: weight_ column count must match reserve_ count");
    if (count_prefixed("price_") != schema.n_tokens)
        throw std::runtime_error("line 1: price_ column count must match reserve_ count");
    expect("base_fee_gwei");
    expect("eth_price_usd");
    if (k < cols.size() && cols[k] == "gas_used") {
        schema.has_gas_used = true;
        ++k;
    }
    if (k < cols.size() && cols[k] == "priority_fee_gwei") {
        schema.has_priority_fee = true;
        ++k;
    }
    if (k < cols.size() && cols[k] == "tip_usd") {
        schema.has_tip = true;
        ++k;
    }
    if (k != cols.size())
        throw std::runtime_error("line 1: unexpected trailing column '" + cols[k] + "'");
    schema.n_columns = k;
    return schema;
}

void validate_record(const BlockRecord& rec, std::size_t line_no,
                     const std::optional<std::int64_t>& prev_block) {
    if (prev_block && rec.block <= *prev_block)
        throw std::runtime_error("line " + std::to_string(line_no) +
                                 ": blocks must be strictly increasing");
    double wsum = 0.0;
    for (double w : rec.weights) {
        if (!(w > 0.0 && w < 1.0))
            throw std::runtime_error("line " + std::to_string(line_no) +
                                     ": weights must lie strictly in (0,1)");
        wsum += w;
    }
    if (std::abs(wsum - 1.0) > 1e-9)
        throw std::runtime_error("line " + std::to_string(line_no) + ": weights sum to " +
                                 fmt_double(wsum) + ", expected 1 within 1e-9");
    for (double r : rec.reserves)
        if (!(r >= 0.0))
            throw std::runtime_error("line " + std::to_string(line_no) +
                                     ": reserves must be non-negative");
    for (double p : rec.prices)
        if (!(p > 0.0))
            throw std::runtime_error("line " + std::to_string(line_no) +
                                     ": prices must be positive");
}

bool weights_equal(const std::vector<double>& a, const std::vector<double>& b) {
    for (std::size_t i = 0; i < a.size(); ++i)
        if (std::abs(a[i] - b[i]) > 1e-14) return false;
    return true;
}

// Start of the current run of changing weights; the reference point for
// the stale-weight ("what for") test.
std::size_t stale_reference_row(const std::vector<BlockRecord>& records, std::size_t row) {
    std::size_t r = row;
    while (r > 0 && !weights_equal(records[r].weights, records[r - 1].weights)) --r;
    return r;
}

PoolState record_pool(const BlockRecord& rec, const std::vector<double>& weights,
                      const AnalyzerParams& params) {
    return PoolState(rec.reserves, weights, params.swap_fee_rate, params.protocol_fee_share);
}

bool positive_reserves(const std::vector<double>& reserves) {
    for (double r : reserves)
        if (!(r > 0.0)) return false;
    return true;
}

} // namespace

std::vector<BlockRecord> parse_trace_csv(const std::string& content) {
    std::vector<BlockRecord> records;
    std::stringstream ss(content);
    std::string line;
    std::size_t line_no = 0;
    std::optional<TraceSchema> schema;
    std::optional<std::int64_t> prev_block;
    while (std::getline(ss, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto cols = split_csv_line(line);
        if (!schema) {
            schema = parse_header(cols);
            continue;
        }
        if (cols.size() != schema->n_columns)
            throw std::runtime_error("line " + std::to_string(line_no) + ": expected " +
                                     std::to_string(schema->n_columns) + " fields, got " +
                                     std::to_string(cols.size()));
        BlockRecord rec;
        std::size_t k = 0;
        const double block_val = parse_number(cols[k], line_no, "block");
        ++k;
        rec.block = static_cast<std::int64_t>(block_val);
        if (static_cast<double>(rec.block) != block_val)
            throw std::runtime_error("line " + std::to_string(line_no) +
                                     ": block must be an integer");
        rec.timestamp = parse_number(cols[k], line_no, "timestamp");
        ++k;
        const std::size_t n = schema->n_tokens;
        rec.reserves.resize(n);
        rec.weights.resize(n);
        rec.prices.resize(n);
        for (std::size_t i = 0; i < n; ++i, ++k)
            rec.reserves[i] = parse_number(cols[k], line_no, "reserve_" + std::to_string(i));
        for (std::size_t i = 0; i < n; ++i, ++k)
            rec.weights[i] = parse_number(cols[k], line_no, "weight_" + std::to_string(i));
        for (std::size_t i = 0; i < n; ++i, ++k)
            rec.prices[i] = parse_number(cols[k], line_no, "price_" + std::to_string(i));
        rec.base_fee_gwei = parse_number(cols[k], line_no, "base_fee_gwei");
        ++k;
        rec.eth_price_usd = parse_number(cols[k], line_no, "eth_price_usd");
        ++k;
        if (schema->has_gas_used) rec.gas_used = parse_number(cols[k++], line_no, "gas_used");
        if (schema->has_priority_fee)
            rec.priority_fee_gwei = parse_number(cols[k++], line_no, "priority_fee_gwei");
        if (schema->has_tip) rec.tip_usd = parse_number(cols[k++], line_no, "tip_usd");
        validate_record(rec, line_no, prev_block);
        prev_block = rec.block;
        records.push_back(std::move(rec));
    }
    return records;
}

std::vector<BlockRecord> parse_trace_json(const std::string& content) {
    if (content.find_first_not_of(" \t\r\n") == std::string::npos) return {};
    json j = json::parse(content);
    if (!j.is_array()) throw std::runtime_error("json trace must be an array of objects");
    std::vector<BlockRecord> records;
    std::optional<std::int64_t> prev_block;
    std::size_t idx = 0;
    for (const auto& obj : j) {
        ++idx;
        if (!obj.is_object())
            throw std::runtime_error("entry " + std::to_string(idx) + ": expected an object");
        BlockRecord rec;
        try {
            rec.block = obj.at("block").get<std::int64_t>();
            rec.timestamp = obj.at("timestamp").get<double>();
            for (std::size_t i = 0;; ++i) {
                const std::string key = "reserve_" + std::to_string(i);
                if (!obj.contains(key)) break;
                rec.reserves.push_back(obj.at(key).get<double>());
                rec.weights.push_back(obj.at("weight_" + std::to_string(i)).get<double>());
                rec.prices.push_back(obj.at("price_" + std::to_string(i)).get<double>());
            }
            rec.base_fee_gwei = obj.at("base_fee_gwei").get<double>();
            rec.eth_price_usd = obj.at("eth_price_usd").get<double>();
            if (obj.contains("gas_used")) rec.gas_used = obj.at("gas_used").get<double>();
            if (obj.contains("priority_fee_gwei"))
                rec.priority_fee_gwei = obj.at("priority_fee_gwei").get<double>();
            if (obj.contains("tip_usd")) rec.tip_usd = obj.at("tip_usd").get<double>();
        } catch (const json::exception& e) {
            throw std::runtime_error("entry " + std::to_string(idx) + ": " + e.what());
        }
        if (rec.reserves.size() < 2)
            throw std::runtime_error("entry " + std::to_string(idx) +
                                     ": trace needs at least two tokens");
        validate_record(rec, idx, prev_block);
        prev_block = rec.block;
        records.push_back(std::move(rec));
    }
    return records;
}

std::vector<BlockRecord> load_trace(const std::string& path, TraceFormat format) {
    const std::string content = read_file(path);
    return format == TraceFormat::Csv ? parse_trace_csv(content) : parse_trace_json(content);
}

std::vector<TradeRecord> detect_trades(const std::vector<BlockRecord>& records,
                                       const AnalyzerParams& params) {
    std::vector<TradeRecord> trades;
    if (records.size() < 2) return trades;
    const std::size_t n = records[0].reserves.size();
    const double keep = 1.0 - params.protocol_fee_share * params.swap_fee_rate;

    for (std::size_t t = 1; t < records.size(); ++t) {
        const auto& prev = records[t - 1];
        const auto& cur = records[t];
        bool any = false;
        std::vector<double> deltas(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            const double d = cur.reserves[i] - prev.reserves[i];
            if (std::abs(d) > params.dust_tolerance_rel * std::max(prev.reserves[i], 1e-300)) {
                deltas[i] = d;
                any = true;
            }
        }
        if (!any) continue;

        TradeRecord trade;
        trade.block = cur.block;
        trade.row = t;
        trade.balance_deltas.resize(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            if (deltas[i] > 0.0) {
                // The pool kept only (1 - share*fee) of the trader's input.
                trade.balance_deltas[i] = deltas[i] / keep;
                trade.tokens_in.push_back(i);
            } else if (deltas[i] < 0.0) {
                trade.balance_deltas[i] = deltas[i];
                trade.tokens_out.push_back(i);
            }
        }
        const std::size_t markout_row =
            std::min(records.size() - 1, t + static_cast<std::size_t>(params.markout_blocks));
        double profit = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            profit -= records[markout_row].prices[i] * trade.balance_deltas[i];
        trade.empirical_profit_usd = profit;
        trade.threshold_usd = threshold_usd(cur.base_fee_gwei, static_cast<double>(params.gas_units),
                                            cur.eth_price_usd, params.markup);
        bool warning = false;
        trade.classification = classify_trade(records, trade, params, &warning);
        trade.stale_ref_warning = warning;
        trades.push_back(std::move(trade));
    }
    return trades;
}

TradeClass classify_trade(const std::vector<BlockRecord>& records, const TradeRecord& trade,
                          const AnalyzerParams& params, bool* warning) {
    if (warning) *warning = false;
    if (trade.row == 0 || trade.row >= records.size()) {
        if (warning) *warning = true;
        return TradeClass::WeightDriven;
    }
    const auto& pre = records[trade.row - 1];
    const auto& cur = records[trade.row];

    const std::size_t ref = stale_reference_row(records, trade.row);
    const bool missing_ref = ref == 0 && records.size() > 1 &&
                             !weights_equal(records[0].weights, records[1].weights);
    if (missing_ref && warning) *warning = true;

    double stale_opportunity = 0.0;
    if (positive_reserves(pre.reserves)) {
        PoolState stale_pool = record_pool(pre, records[ref].weights, params);
        stale_opportunity =
            optimal_arb_multi(stale_pool, PriceVector(cur.prices)).theoretical_max_profit_usd;
    }
    return classify_rule(trade.empirical_profit_usd, stale_opportunity, params.classify);
}

double efficiency_ratio(double total_empirical_usd, double total_theoretical_usd) {
    if (total_theoretical_usd <= 0.0) return 0.0;
    return total_empirical_usd / total_theoretical_usd;
}

WindowReport window_report(const std::vector<BlockRecord>& records,
                           const std::vector<TradeRecord>& trades,
                           const AnalyzerParams& params) {
    WindowReport report;
    report.n_trades = trades.size();
    const int workers = params.workers > 0 ? params.workers : default_workers();

    // Per-block drift and the theoretical opportunity at each block's own
    // state; rows are independent, so this is the parallel kernel.
    report.drift.resize(records.size(), 0.0);
    report.opportunity_usd.resize(records.size(), 0.0);
    report.threshold_usd.resize(records.size(), 0.0);
    parallel_for(static_cast<std::int64_t>(records.size()), workers, [&](std::int64_t t) {
        const auto& rec = records[static_cast<std::size_t>(t)];
        report.threshold_usd[t] = threshold_usd(rec.base_fee_gwei,
                                                static_cast<double>(params.gas_units),
                                                rec.eth_price_usd, params.markup);
        if (!positive_reserves(rec.reserves)) return;
        PoolState pool = record_pool(rec, rec.weights, params);
        PriceVector prices(rec.prices);
        report.drift[t] = allocation_drift(pool, prices);
        report.opportunity_usd[t] = optimal_arb_multi(pool, prices).theoretical_max_profit_usd;
    });
    for (double d : report.drift) report.max_allocation_drift = std::max(report.max_allocation_drift, d);

    // Replay: the optimal extraction available at each trade's pre-trade
    // state. Summation stays sequential so worker count never changes the
    // totals.
    std::vector<double> theoretical(trades.size(), 0.0);
    parallel_for(static_cast<std::int64_t>(trades.size()), workers, [&](std::int64_t k) {
        const auto& trade = trades[static_cast<std::size_t>(k)];
        if (trade.row == 0) return;
        const auto& pre = records[trade.row - 1];
        const auto& cur = records[trade.row];
        if (!positive_reserves(pre.reserves)) return;
        PoolState pool(pre.reserves, cur.weights, params.swap_fee_rate, params.protocol_fee_share);
        theoretical[k] =
            optimal_arb_multi(pool, PriceVector(cur.prices)).theoretical_max_profit_usd;
    });

    double emp_eff = 0.0, theo_eff = 0.0;
    std::size_t below = 0;
    for (std::size_t k = 0; k < trades.size(); ++k) {
        const auto& trade = trades[k];
        report.total_empirical_usd += trade.empirical_profit_usd;
        report.total_theoretical_usd += theoretical[k];
        switch (trade.classification) {
            case TradeClass::WeightDriven: ++report.n_weight_driven; break;
            case TradeClass::PriceDriven: ++report.n_price_driven; break;
            case TradeClass::IncidentalRouting: ++report.n_incidental; break;
        }
        const bool in_efficiency = params.include_price_driven_in_efficiency ||
                                   trade.classification != TradeClass::PriceDriven;
        if (in_efficiency) {
            emp_eff += trade.empirical_profit_usd;
            theo_eff += theoretical[k];
        }
        if (trade.empirical_profit_usd < trade.threshold_usd) ++below;
    }

    report.cum_empirical_usd.resize(records.size(), 0.0);
    report.cum_theoretical_usd.resize(records.size(), 0.0);
    {
        double ce = 0.0, ct = 0.0;
        std::size_t k = 0;
        for (std::size_t t = 0; t < records.size(); ++t) {
            while (k < trades.size() && trades[k].row == t) {
                ce += trades[k].empirical_profit_usd;
                ct += theoretical[k];
                ++k;
            }
            report.cum_empirical_usd[t] = ce;
            report.cum_theoretical_usd[t] = ct;
        }
    }

    if (trades.empty()) {
        report.flags.push_back("no_trades");
        return report;
    }
    report.extraction_per_trade_usd = report.total_empirical_usd / double(trades.size());
    report.efficiency_ratio = efficiency_ratio(emp_eff, theo_eff);
    report.mean_blocks_between_trades = double(records.size()) / double(trades.size());
    report.fraction_below_threshold = double(below) / double(trades.size());
    if (report.efficiency_ratio > 1.05)
        report.flags.push_back("efficiency_overshoot");
    for (const auto& trade : trades)
        if (trade.stale_ref_warning) {
            report.flags.push_back("stale_reference_missing");
            break;
        }
    return report;
}

std::string trace_to_csv(const std::vector<BlockRecord>& records) {
    std::ostringstream out;
    const std::size_t n = records.empty() ? 2 : records[0].reserves.size();
    out << "block,timestamp";
    for (std::size_t i = 0; i < n; ++i) out << ",reserve_" << i;
    for (std::size_t i = 0; i < n; ++i) out << ",weight_" << i;
    for (std::size_t i = 0; i < n; ++i) out << ",price_" << i;
    out << ",base_fee_gwei,eth_price_usd\n";
    for (const auto& rec : records) {
        out << rec.block << ',' << fmt_double(rec.timestamp);
        for (double r : rec.reserves) out << ',' << fmt_double(r);
        for (double w : rec.weights) out << ',' << fmt_double(w);
        for (double p : rec.prices) out << ',' << fmt_double(p);
        out << ',' << fmt_double(rec.base_fee_gwei) << ',' << fmt_double(rec.eth_price_usd) << '\n';
    }
    return out.str();
}

std::string trace_to_json(const std::vector<BlockRecord>& records) {
    json arr = json::array();
    for (const auto& rec : records) {
        json obj;
        obj["block"] = rec.block;
        obj["timestamp"] = rec.timestamp;
        for (std::size_t i = 0; i < rec.reserves.size(); ++i) {
            obj["reserve_" + std::to_string(i)] = rec.reserves[i];
            obj["weight_" + std::to_string(i)] = rec.weights[i];
            obj["price_" + std::to_string(i)] = rec.prices[i];
        }
        obj["base_fee_gwei"] = rec.base_fee_gwei;
        obj["eth_price_usd"] = rec.eth_price_usd;
        if (rec.gas_used) obj["gas_used"] = *rec.gas_used;
        if (rec.priority_fee_gwei) obj["priority_fee_gwei"] = *rec.priority_fee_gwei;
        if (rec.tip_usd) obj["tip_usd"] = *rec.tip_usd;
        arr.push_back(std::move(obj));
    }
    return arr.dump(2) + "\n";
}

std::vector<BlockRecord> sim_trace_records(const SimTrace& trace) {
    std::vector<BlockRecord> records;
    records.reserve(trace.blocks.size());
    for (const auto& blk : trace.blocks) {
        BlockRecord rec;
        rec.block = blk.block;
        rec.timestamp = blk.timestamp;
        rec.reserves = blk.reserves;
        rec.weights = blk.weights;
        rec.prices = blk.prices;
        rec.base_fee_gwei = blk.base_fee_gwei;
        rec.eth_price_usd = blk.eth_price_usd;
        records.push_back(std::move(rec));
    }
    return records;
}

} // namespace tfmm
