#include "tfmm/weights.hpp"

#include <cmath>
#include <stdexcept>

namespace tfmm {

namespace {

void validate_weight_vector(const std::vector<double>& w) {
    if (w.size() < 2) throw std::invalid_argument("weight vector needs at least two tokens");
    double sum = 0.0;
    for (double x : w) {
        if (!(x > 0.0 && x < 1.0))
            throw std::invalid_argument("weights must lie strictly in (0,1)");
        sum += x;
    }
    if (std::abs(sum - 1.0) > 1e-12) throw std::invalid_argument("weights must sum to 1");
}

std::vector<double> renormalized(std::vector<double> w) {
    double sum = 0.0;
    for (double x : w) sum += x;
    for (double& x : w) x /= sum;
    return w;
}

} // namespace

WeightTrajectory::WeightTrajectory(std::vector<double> initial_weights,
                                   std::vector<WeightUpdate> updates)
    : initial_(std::move(initial_weights)), updates_(std::move(updates)) {
    validate_weight_vector(initial_);
    std::int64_t prev_end = -1;
    std::int64_t prev_activation = -1;
    for (const auto& u : updates_) {
        validate_weight_vector(u.target_weights);
        if (u.target_weights.size() != initial_.size())
            throw std::invalid_argument("update weight dimension mismatch");
        if (u.interpolation_blocks < 1)
            throw std::invalid_argument("interpolation_blocks must be positive");
        if (u.activation_block <= prev_activation)
            throw std::invalid_argument("activation blocks must be strictly increasing");
        if (u.activation_block < prev_end)
            throw std::invalid_argument("interpolation windows may not overlap");
        prev_activation = u.activation_block;
        prev_end = u.activation_block + u.interpolation_blocks;
    }
}

std::vector<double> WeightTrajectory::weights_at(std::int64_t block) const {
    if (block < 0) throw std::invalid_argument("block precedes trajectory start");
    const std::vector<double>* start = &initial_;
    for (const auto& u : updates_) {
        if (block < u.activation_block) break;
        if (block >= u.activation_block + u.interpolation_blocks) {
            start = &u.target_weights;
            continue;
        }
        // Inside this window: linear between the window's start vector and
        // its target.
        const double frac = static_cast<double>(block - u.activation_block) /
                            static_cast<double>(u.interpolation_blocks);
        std::vector<double> w(start->size());
        for (std::size_t i = 0; i < w.size(); ++i)
            w[i] = (*start)[i] + frac * (u.target_weights[i] - (*start)[i]);
        return renormalized(std::move(w));
    }
    return renormalized(*start);
}

std::vector<double> WeightTrajectory::window_start_weights(std::int64_t block) const {
    if (block < 0) throw std::invalid_argument("block precedes trajectory start");
    const std::vector<double>* start = &initial_;
    for (const auto& u : updates_) {
        if (block < u.activation_block) break;
        if (block >= u.activation_block + u.interpolation_blocks) {
            start = &u.target_weights;
            continue;
        }
        return renormalized(*start);
    }
    return weights_at(block);
}

bool WeightTrajectory::in_window(std::int64_t block) const {
    for (const auto& u : updates_) {
        if (block >= u.activation_block && block < u.activation_block + u.interpolation_blocks)
            return true;
    }
    return false;
}

std::int64_t WeightTrajectory::last_change_block() const {
    if (updates_.empty()) return 0;
    const auto& last = updates_.back();
    return last.activation_block + last.interpolation_blocks;
}

InterpolationPlan WeightTrajectory::plan_for(std::size_t update_index) const {
    if (update_index >= updates_.size()) throw std::invalid_argument("update index out of range");
    const auto& u = updates_[update_index];
    const std::vector<double> start = weights_at(u.activation_block);
    InterpolationPlan plan;
    plan.start_block = u.activation_block;
    plan.end_block = u.activation_block + u.interpolation_blocks;
    plan.per_block_delta.resize(start.size());
    for (std::size_t i = 0; i < start.size(); ++i)
        plan.per_block_delta[i] = (u.target_weights[i] - start[i]) /
                                  static_cast<double>(u.interpolation_blocks);
    return plan;
}

WeightTrajectory WeightTrajectory::from_weight_series(
    const std::vector<std::vector<double>>& series) {
    if (series.empty()) throw std::invalid_argument("empty weight series");
    std::vector<WeightUpdate> updates;
    for (std::size_t t = 1; t < series.size(); ++t) {
        if (series[t].size() != series[0].size())
            throw std::invalid_argument("weight series dimension mismatch");
        bool changed = false;
        for (std::size_t i = 0; i < series[t].size(); ++i)
            if (series[t][i] != series[t - 1][i]) changed = true;
        if (changed)
            updates.push_back({static_cast<std::int64_t>(t) - 1, series[t], 1});
    }
    return WeightTrajectory(series[0], std::move(updates));
}

double split_cost_ratio(double /*delta_w*/, int n_steps) {
    if (n_steps < 1) throw std::invalid_argument("n_steps must be positive");
    return 1.0 / static_cast<double>(n_steps);
}

} // namespace tfmm
