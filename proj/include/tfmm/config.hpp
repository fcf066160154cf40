// Run configuration: JSON file -> validated module configs, with named
// presets and a parameter-grid sweep description.
#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "tfmm/bench.hpp"
#include "tfmm/sim.hpp"
#include "tfmm/trace.hpp"

namespace tfmm {

struct SweepSpec {
    std::string parameter; // n_steps | markup | base_fee_gwei | swap_fee_rate | vol_scale
    std::vector<double> values;
};

struct RunConfig {
    SimConfig simulate;
    bool has_simulate = false;
    AnalyzerParams analyze;
    BenchmarkParams benchmark;
    SweepSpec sweep;
    bool has_sweep = false;
};

// Named parameter sets for the studied chains; returned as a config object
// the user file is merged over.
nlohmann::json preset_config(const std::string& name);
std::vector<std::string> preset_names();

RunConfig parse_run_config(const nlohmann::json& j);
RunConfig load_run_config(const std::string& path);

// Applies one sweep point to a base simulation config.
SimConfig apply_sweep_point(const SimConfig& base, const std::string& parameter, double value);

} // namespace tfmm
