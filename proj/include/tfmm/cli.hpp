// Batch commands behind the tfmm-lab binary. Implemented as library calls
// so they are directly testable; each returns a process exit status
// (0 success, 1 runtime/domain error, 2 usage/config error).
#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "tfmm/trace.hpp"

namespace tfmm {

struct CmdOptions {
    std::string config_path;
    std::string trace_path; // analyze/benchmark input
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    TraceFormat format = TraceFormat::Csv;
    bool svg = false;
    int workers = 0; // 0 = TFMM_WORKERS env or OpenMP default
};

int cmd_simulate(const CmdOptions& opts);
int cmd_analyze(const CmdOptions& opts);
int cmd_benchmark(const CmdOptions& opts);
int cmd_sweep(const CmdOptions& opts);

} // namespace tfmm
