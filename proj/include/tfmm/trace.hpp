// Trace lab: ingest per-block pool traces, detect trades from balance
// deltas, classify them, and compute window-level metrics.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tfmm/classify.hpp"
#include "tfmm/gas.hpp"
#include "tfmm/pool.hpp"
#include "tfmm/sim.hpp"

namespace tfmm {

struct BlockRecord {
    std::int64_t block = 0;
    double timestamp = 0.0;
    std::vector<double> reserves;
    std::vector<double> weights;
    std::vector<double> prices;
    double base_fee_gwei = 0.0;
    double eth_price_usd = 0.0;
    std::optional<double> gas_used;
    std::optional<double> priority_fee_gwei;
    std::optional<double> tip_usd;
};

struct TradeRecord {
    std::int64_t block = 0;
    std::size_t row = 0; // index into the record list
    // Skim-adjusted deltas from the trader's perspective: positive entries
    // are tokens the trader paid in, negative are tokens received.
    std::vector<double> balance_deltas;
    std::vector<std::size_t> tokens_in;
    std::vector<std::size_t> tokens_out;
    double empirical_profit_usd = 0.0;
    double threshold_usd = 0.0;
    TradeClass classification = TradeClass::WeightDriven;
    bool stale_ref_warning = false;
};

struct WindowReport {
    std::size_t n_trades = 0;
    std::size_t n_weight_driven = 0;
    std::size_t n_price_driven = 0;
    std::size_t n_incidental = 0;
    double extraction_per_trade_usd = 0.0;
    double total_empirical_usd = 0.0;
    double total_theoretical_usd = 0.0;
    double efficiency_ratio = 0.0;
    double max_allocation_drift = 0.0;
    double mean_blocks_between_trades = 0.0;
    double fraction_below_threshold = 0.0;
    // Per-block series for plotting.
    std::vector<double> drift;
    std::vector<double> opportunity_usd;
    std::vector<double> threshold_usd;
    std::vector<double> cum_empirical_usd;
    std::vector<double> cum_theoretical_usd;
    std::vector<std::string> flags;
};

struct AnalyzerParams {
    double swap_fee_rate = 0.003;
    double protocol_fee_share = 0.5;
    double dust_tolerance_rel = 1e-9; // reserve deltas below this are noise
    std::int64_t gas_units = 450000;
    double markup = 1.5;
    ClassifyParams classify;
    bool include_price_driven_in_efficiency = false;
    std::int64_t markout_blocks = 0; // 0 = value trades at same-block prices
    int workers = 0;                 // 0 = library default
};

enum class TraceFormat { Csv, Json };

std::vector<BlockRecord> load_trace(const std::string& path, TraceFormat format);
std::vector<BlockRecord> parse_trace_csv(const std::string& content);
std::vector<BlockRecord> parse_trace_json(const std::string& content);

std::vector<TradeRecord> detect_trades(const std::vector<BlockRecord>& records,
                                       const AnalyzerParams& params);

TradeClass classify_trade(const std::vector<BlockRecord>& records, const TradeRecord& trade,
                          const AnalyzerParams& params, bool* warning = nullptr);

WindowReport window_report(const std::vector<BlockRecord>& records,
                           const std::vector<TradeRecord>& trades,
                           const AnalyzerParams& params);

double efficiency_ratio(double total_empirical_usd, double total_theoretical_usd);

// Serialization. The CSV schema is the exchange format between the
// simulator and the analyzer:
//   block,timestamp,reserve_0..,weight_0..,price_0..,base_fee_gwei,
//   eth_price_usd[,gas_used,priority_fee_gwei,tip_usd]
std::string trace_to_csv(const std::vector<BlockRecord>& records);
std::string trace_to_json(const std::vector<BlockRecord>& records);
std::vector<BlockRecord> sim_trace_records(const SimTrace& trace);

} // namespace tfmm
