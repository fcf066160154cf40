// tfmm-lab: batch driver for simulations, trace analysis, benchmarks and
// parameter sweeps.
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "tfmm/cli.hpp"
#include "tfmm/config.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Dynamic-weight pool laboratory: simulate block-level rebalancing auctions, "
                 "analyze pool traces, and benchmark against CEX rebalancers"};
    app.require_subcommand(1);

    tfmm::CmdOptions opts;
    std::string format = "csv";
    std::int64_t seed = -1;

    auto add_common = [&](CLI::App* cmd, bool needs_config, bool needs_trace) {
        auto* config = cmd->add_option("--config", opts.config_path, "JSON config file");
        if (needs_config) config->required();
        if (needs_trace)
            cmd->add_option("--trace", opts.trace_path, "input trace (csv or json)")->required();
        cmd->add_option("--out", opts.out_dir, "output directory")->required();
        cmd->add_option("--seed", seed, "override the config seed");
        cmd->add_option("--format", format, "trace format: csv|json")
            ->check(CLI::IsMember({"csv", "json"}));
        cmd->add_option("--workers", opts.workers,
                        "worker threads (default: TFMM_WORKERS env or all cores)");
    };

    auto* simulate = app.add_subcommand("simulate", "run one simulation and export its trace");
    add_common(simulate, true, false);
    auto* analyze = app.add_subcommand("analyze", "detect, classify and report trades in a trace");
    add_common(analyze, false, true);
    analyze->add_flag("--svg", opts.svg, "also emit SVG line charts");
    auto* benchmark = app.add_subcommand("benchmark", "LVR/RVR counterfactuals for a trace");
    add_common(benchmark, false, true);
    auto* sweep = app.add_subcommand("sweep", "run a parameter grid of simulations");
    add_common(sweep, true, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (seed >= 0) opts.seed = static_cast<std::uint64_t>(seed);
    opts.format = (format == "json") ? tfmm::TraceFormat::Json : tfmm::TraceFormat::Csv;

    if (simulate->parsed()) return tfmm::cmd_simulate(opts);
    if (analyze->parsed()) return tfmm::cmd_analyze(opts);
    if (benchmark->parsed()) return tfmm::cmd_benchmark(opts);
    if (sweep->parsed()) return tfmm::cmd_sweep(opts);
    return 2;
}
