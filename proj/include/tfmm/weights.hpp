// Per-block weight trajectories: target updates interpolated linearly.
#pragma once

#include <cstdint>
#include <vector>

namespace tfmm {

struct WeightUpdate {
    std::int64_t activation_block = 0;
    std::vector<double> target_weights;
    std::int64_t interpolation_blocks = 1;
};

// Compiled form of one update window.
struct InterpolationPlan {
    std::vector<double> per_block_delta;
    std::int64_t start_block = 0;
    std::int64_t end_block = 0;
};

// Piecewise-linear weight schedule. Weights are constant before the first
// update, within each block, and after the last window ends. Windows may
// not overlap; evaluation renormalizes so components always sum to 1.
class WeightTrajectory {
public:
    explicit WeightTrajectory(std::vector<double> initial_weights,
                              std::vector<WeightUpdate> updates = {});

    std::vector<double> weights_at(std::int64_t block) const;

    // Weights at the start of the interpolation window containing `block`
    // (the stale reference for trade classification); current weights when
    // no window is active.
    std::vector<double> window_start_weights(std::int64_t block) const;

    bool in_window(std::int64_t block) const;
    std::int64_t last_change_block() const;

    InterpolationPlan plan_for(std::size_t update_index) const;

    const std::vector<double>& initial_weights() const { return initial_; }
    const std::vector<WeightUpdate>& updates() const { return updates_; }

    // Rebuilds a trajectory from observed per-block weights (e.g. a loaded
    // trace): each block-to-block change becomes a one-block window.
    static WeightTrajectory from_weight_series(const std::vector<std::vector<double>>& series);

private:
    std::vector<double> initial_;
    std::vector<WeightUpdate> updates_;
};

// Leading-order ratio of total arbitrage cost when a single weight jump is
// split into n_steps equal increments: 1 / n_steps.
double split_cost_ratio(double delta_w, int n_steps);

} // namespace tfmm
