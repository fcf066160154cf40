#include "tfmm/cli.hpp"

#include <cmath>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>

#include "json.hpp"
#include "tfmm/bench.hpp"
#include "tfmm/config.hpp"
#include "tfmm/io.hpp"
#include "tfmm/parallel.hpp"

namespace tfmm {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

RunConfig load_config_or_throw_usage(const std::string& path) {
    if (path.empty()) throw std::invalid_argument("no config file given (--config)");
    if (!fs::exists(path)) throw std::invalid_argument("config file not found: " + path);
    return load_run_config(path);
}

std::vector<BlockRecord> load_trace_checked(const CmdOptions& opts) {
    if (opts.trace_path.empty()) throw std::invalid_argument("no trace file given (--trace)");
    if (!fs::exists(opts.trace_path))
        throw std::invalid_argument("trace file not found: " + opts.trace_path);
    TraceFormat format = opts.format;
    if (opts.trace_path.size() >= 5 &&
        opts.trace_path.substr(opts.trace_path.size() - 5) == ".json")
        format = TraceFormat::Json;
    return load_trace(opts.trace_path, format);
}

std::string trades_csv(const SimTrace& trace) {
    std::ostringstream out;
    out << "block,agent,kind,classification,leg,token_in,token_out,amount_in,amount_out,"
           "profit_usd,post_trade_gap_bp\n";
    for (const auto& blk : trace.blocks) {
        for (const auto& ev : blk.trades) {
            for (std::size_t leg = 0; leg < ev.legs.size(); ++leg) {
                const auto& t = ev.legs[leg];
                out << blk.block << ',' << ev.agent_id << ','
                    << (ev.is_strike ? "strike" : "route") << ',' << to_string(ev.classification)
                    << ',' << leg << ',' << trace.token_ids[t.token_in] << ','
                    << trace.token_ids[t.token_out] << ',' << fmt_double(t.amount_in) << ','
                    << fmt_double(t.amount_out) << ',' << fmt_double(t.profit_usd) << ','
                    << fmt_double(t.post_trade_gap_bp) << '\n';
            }
        }
    }
    return out.str();
}

json summary_json(const SimTrace& trace, std::uint64_t seed) {
    double max_drift = 0.0;
    std::size_t wd = 0, pd = 0, ir = 0;
    for (const auto& blk : trace.blocks) {
        max_drift = std::max(max_drift, blk.allocation_drift);
        for (const auto& ev : blk.trades) {
            if (ev.classification == TradeClass::WeightDriven) ++wd;
            if (ev.classification == TradeClass::PriceDriven) ++pd;
            if (ev.classification == TradeClass::IncidentalRouting) ++ir;
        }
    }
    const std::size_t n_trades = trace.n_strikes + trace.n_router_trades;
    json j;
    j["seed"] = seed;
    j["n_blocks"] = trace.blocks.size();
    j["token_ids"] = trace.token_ids;
    j["swap_fee_rate"] = trace.swap_fee_rate;
    j["protocol_fee_share"] = trace.protocol_fee_share;
    j["n_trades"] = n_trades;
    j["n_strikes"] = trace.n_strikes;
    j["n_router_trades"] = trace.n_router_trades;
    j["trades_by_classification"] = {
        {"weight_driven", wd}, {"price_driven", pd}, {"incidental_routing", ir}};
    j["initial_pool_value_usd"] = trace.initial_pool_value_usd;
    j["final_pool_value_usd"] = trace.final_pool_value_usd;
    j["total_empirical_extraction_usd"] = trace.total_empirical_usd;
    j["total_theoretical_extraction_usd"] = trace.total_theoretical_usd;
    j["total_protocol_skim_usd"] = trace.total_skim_usd;
    j["max_allocation_drift"] = max_drift;
    j["extraction_per_trade_usd"] =
        n_trades ? trace.total_empirical_usd / double(n_trades) : 0.0;
    return j;
}

void write_sim_outputs(const SimTrace& trace, const fs::path& dir, TraceFormat format,
                       std::uint64_t seed) {
    fs::create_directories(dir);
    const auto records = sim_trace_records(trace);
    if (format == TraceFormat::Csv)
        write_file_atomic((dir / "trace.csv").string(), trace_to_csv(records));
    else
        write_file_atomic((dir / "trace.json").string(), trace_to_json(records));
    write_file_atomic((dir / "trades.csv").string(), trades_csv(trace));
    write_file_atomic((dir / "summary.json").string(), summary_json(trace, seed).dump(2) + "\n");
}

struct SweepRow {
    double value = 0.0;
    SimTrace trace;
};

int run_usage_guarded(const std::function<int()>& body) {
    try {
        return body();
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
}

} // namespace

int cmd_simulate(const CmdOptions& opts) {
    RunConfig cfg;
    try {
        cfg = load_config_or_throw_usage(opts.config_path);
        if (!cfg.has_simulate)
            throw std::invalid_argument("config has no 'simulate' section");
        if (opts.seed) cfg.simulate.seed = *opts.seed;
        if (opts.out_dir.empty()) throw std::invalid_argument("no output directory given (--out)");
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return run_usage_guarded([&] {
        const SimTrace trace = run(cfg.simulate);
        write_sim_outputs(trace, opts.out_dir, opts.format, cfg.simulate.seed);
        return kExitOk;
    });
}

int cmd_analyze(const CmdOptions& opts) {
    AnalyzerParams params;
    std::vector<BlockRecord> records;
    try {
        if (!opts.config_path.empty()) params = load_config_or_throw_usage(opts.config_path).analyze;
        if (opts.workers > 0) params.workers = opts.workers;
        if (opts.out_dir.empty()) throw std::invalid_argument("no output directory given (--out)");
        if (opts.trace_path.empty()) throw std::invalid_argument("no trace file given (--trace)");
        if (!fs::exists(opts.trace_path))
            throw std::invalid_argument("trace file not found: " + opts.trace_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return run_usage_guarded([&] {
        records = load_trace_checked(opts);
        const auto trades = detect_trades(records, params);
        const WindowReport report = window_report(records, trades, params);
        if (records.empty()) std::cerr << "warning: empty trace, report contains zeros\n";

        fs::create_directories(opts.out_dir);
        json j;
        j["n_blocks"] = records.size();
        j["n_trades"] = report.n_trades;
        j["n_weight_driven"] = report.n_weight_driven;
        j["n_price_driven"] = report.n_price_driven;
        j["n_incidental"] = report.n_incidental;
        j["extraction_per_trade_usd"] = report.extraction_per_trade_usd;
        j["total_empirical_usd"] = report.total_empirical_usd;
        j["total_theoretical_usd"] = report.total_theoretical_usd;
        j["efficiency_ratio"] = report.efficiency_ratio;
        j["max_allocation_drift"] = report.max_allocation_drift;
        j["mean_blocks_between_trades"] = report.mean_blocks_between_trades;
        j["fraction_below_threshold"] = report.fraction_below_threshold;
        j["flags"] = report.flags;
        j["params"] = {{"swap_fee_rate", params.swap_fee_rate},
                       {"protocol_fee_share", params.protocol_fee_share},
                       {"gas_units", params.gas_units},
                       {"markup", params.markup},
                       {"incidental_cutoff_usd", params.classify.incidental_cutoff_usd},
                       {"stale_opportunity_dust_usd", params.classify.stale_opportunity_dust_usd},
                       {"include_price_driven_in_efficiency",
                        params.include_price_driven_in_efficiency},
                       {"markout_blocks", params.markout_blocks}};
        write_file_atomic((fs::path(opts.out_dir) / "report.json").string(), j.dump(2) + "\n");

        std::ostringstream csv;
        csv << "block,timestamp,allocation_drift,opportunity_usd,threshold_usd,n_trades,"
               "trades_profit_usd,cum_empirical_usd,cum_theoretical_usd\n";
        std::size_t k = 0;
        for (std::size_t t = 0; t < records.size(); ++t) {
            std::size_t n_here = 0;
            double profit_here = 0.0;
            while (k < trades.size() && trades[k].row == t) {
                ++n_here;
                profit_here += trades[k].empirical_profit_usd;
                ++k;
            }
            csv << records[t].block << ',' << fmt_double(records[t].timestamp) << ','
                << fmt_double(report.drift[t]) << ',' << fmt_double(report.opportunity_usd[t])
                << ',' << fmt_double(report.threshold_usd[t]) << ',' << n_here << ','
                << fmt_double(profit_here) << ',' << fmt_double(report.cum_empirical_usd[t]) << ','
                << fmt_double(report.cum_theoretical_usd[t]) << '\n';
        }
        write_file_atomic((fs::path(opts.out_dir) / "per_block.csv").string(), csv.str());

        if (opts.svg && !records.empty()) {
            write_file_atomic(
                (fs::path(opts.out_dir) / "drift.svg").string(),
                svg_line_chart("allocation drift",
                               {{"drift", "#2a7de1", report.drift},
                                {"threshold_usd", "#d08a00", report.threshold_usd}}));
            write_file_atomic(
                (fs::path(opts.out_dir) / "extraction.svg").string(),
                svg_line_chart("cumulative extraction (USD)",
                               {{"empirical", "#2a7de1", report.cum_empirical_usd},
                                {"theoretical", "#2aa84a", report.cum_theoretical_usd}}));
        }
        return kExitOk;
    });
}

int cmd_benchmark(const CmdOptions& opts) {
    BenchmarkParams params;
    try {
        if (!opts.config_path.empty())
            params = load_config_or_throw_usage(opts.config_path).benchmark;
        if (opts.out_dir.empty()) throw std::invalid_argument("no output directory given (--out)");
        if (opts.trace_path.empty()) throw std::invalid_argument("no trace file given (--trace)");
        if (!fs::exists(opts.trace_path))
            throw std::invalid_argument("trace file not found: " + opts.trace_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return run_usage_guarded([&] {
        const auto records = load_trace_checked(opts);
        if (records.empty()) throw std::runtime_error("benchmark needs a non-empty trace");
        std::vector<std::vector<double>> weights, prices;
        std::vector<double> pool_values;
        for (const auto& rec : records) {
            weights.push_back(rec.weights);
            prices.push_back(rec.prices);
            double v = 0.0;
            for (std::size_t i = 0; i < rec.reserves.size(); ++i)
                v += rec.reserves[i] * rec.prices[i];
            pool_values.push_back(v);
        }
        const BenchmarkSeries series = benchmark_series(weights, prices, pool_values, params);

        fs::create_directories(opts.out_dir);
        std::ostringstream csv;
        csv << "block,timestamp,pool_value_usd,lvr_value_usd,rvr_value_usd,rel_perf_vs_lvr_pp,"
               "rel_perf_vs_rvr_pp\n";
        for (std::size_t t = 0; t < records.size(); ++t) {
            csv << records[t].block << ',' << fmt_double(records[t].timestamp) << ','
                << fmt_double(series.pool_value_usd[t]) << ',' << fmt_double(series.lvr_value_usd[t])
                << ',' << fmt_double(series.rvr_value_usd[t]) << ','
                << fmt_double(series.rel_perf_vs_lvr_pp[t]) << ','
                << fmt_double(series.rel_perf_vs_rvr_pp[t]) << '\n';
        }
        write_file_atomic((fs::path(opts.out_dir) / "benchmark.csv").string(), csv.str());

        json j;
        j["params"] = {{"commission_rate", params.commission_rate},
                       {"half_spread_rate", params.half_spread_rate},
                       {"rebalance_cadence_blocks", params.rebalance_cadence_blocks}};
        j["final_rel_perf_vs_lvr_pp"] = series.rel_perf_vs_lvr_pp.back();
        j["final_rel_perf_vs_rvr_pp"] = series.rel_perf_vs_rvr_pp.back();
        write_file_atomic((fs::path(opts.out_dir) / "benchmark.json").string(), j.dump(2) + "\n");
        return kExitOk;
    });
}

int cmd_sweep(const CmdOptions& opts) {
    RunConfig cfg;
    try {
        cfg = load_config_or_throw_usage(opts.config_path);
        if (!cfg.has_simulate || !cfg.has_sweep)
            throw std::invalid_argument("sweep config needs 'simulate' and 'sweep' sections");
        if (opts.seed) cfg.simulate.seed = *opts.seed;
        if (opts.out_dir.empty()) throw std::invalid_argument("no output directory given (--out)");
        // Validate every point up front so a bad grid fails before work starts.
        for (double v : cfg.sweep.values) apply_sweep_point(cfg.simulate, cfg.sweep.parameter, v);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return run_usage_guarded([&] {
        const int workers = opts.workers > 0 ? opts.workers : default_workers();
        const std::size_t n_points = cfg.sweep.values.size();
        std::vector<SweepRow> rows(n_points);
        fs::create_directories(opts.out_dir);

        // Points are independent; each writes only its own directory.
        parallel_for(static_cast<std::int64_t>(n_points), workers, [&](std::int64_t k) {
            const double value = cfg.sweep.values[static_cast<std::size_t>(k)];
            const SimConfig point = apply_sweep_point(cfg.simulate, cfg.sweep.parameter, value);
            SimTrace trace = run(point);
            char name[32];
            std::snprintf(name, sizeof(name), "point_%03lld", static_cast<long long>(k));
            write_sim_outputs(trace, fs::path(opts.out_dir) / name, opts.format, point.seed);
            rows[static_cast<std::size_t>(k)] = SweepRow{value, std::move(trace)};
        });

        double delta_w = 0.0;
        if (!cfg.simulate.trajectory.updates().empty()) {
            const auto start = cfg.simulate.trajectory.initial_weights();
            const auto& target = cfg.simulate.trajectory.updates().front().target_weights;
            for (std::size_t i = 0; i < start.size(); ++i)
                delta_w += std::abs(target[i] - start[i]);
            delta_w /= 2.0;
        }

        std::ostringstream csv;
        csv << "point,parameter,value,seed,n_blocks,n_trades,n_strikes,total_empirical_usd,"
               "extraction_per_trade_usd,total_theoretical_usd,total_skim_usd,"
               "final_pool_value_usd";
        const bool is_steps = cfg.sweep.parameter == "n_steps";
        if (is_steps) csv << ",split_cost_ratio";
        csv << '\n';
        for (std::size_t k = 0; k < n_points; ++k) {
            const auto& trace = rows[k].trace;
            const std::size_t n_trades = trace.n_strikes + trace.n_router_trades;
            csv << k << ',' << cfg.sweep.parameter << ',' << fmt_double(rows[k].value) << ','
                << cfg.simulate.seed << ',' << trace.blocks.size() << ',' << n_trades << ','
                << trace.n_strikes << ',' << fmt_double(trace.total_empirical_usd) << ','
                << fmt_double(n_trades ? trace.total_empirical_usd / double(n_trades) : 0.0) << ','
                << fmt_double(trace.total_theoretical_usd) << ','
                << fmt_double(trace.total_skim_usd) << ','
                << fmt_double(trace.final_pool_value_usd);
            if (is_steps)
                csv << ',' << fmt_double(split_cost_ratio(delta_w, static_cast<int>(rows[k].value)));
            csv << '\n';
        }
        write_file_atomic((fs::path(opts.out_dir) / "sweep.csv").string(), csv.str());
        return kExitOk;
    });
}

} // namespace tfmm
