// Arbitrageur cost model: per-block profitability threshold from gas data.
#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace tfmm {

// A per-block scalar that is either a constant or an explicit series.
class PerBlockSeries {
public:
    PerBlockSeries() = default;
    PerBlockSeries(double constant) : constant_(constant) {} // NOLINT(google-explicit-constructor)
    explicit PerBlockSeries(std::vector<double> series) : series_(std::move(series)) {}

    double at(std::int64_t block) const {
        if (series_.empty()) return constant_;
        if (block < 0 || static_cast<std::size_t>(block) >= series_.size())
            throw std::invalid_argument("block outside series range");
        return series_[static_cast<std::size_t>(block)];
    }

    bool is_series() const { return !series_.empty(); }
    std::size_t series_length() const { return series_.size(); }
    double constant_value() const { return constant_; }
    const std::vector<double>& series() const { return series_; }

private:
    double constant_ = 0.0;
    std::vector<double> series_;
};

struct GasModel {
    PerBlockSeries base_fee_gwei{0.0};
    std::int64_t gas_units = 450000;
    PerBlockSeries eth_price_usd{0.0};
    double markup = 1.5; // calibrated multiple over raw gas cost

    void validate() const {
        if (gas_units <= 0) throw std::invalid_argument("gas_units must be positive");
        if (markup < 1.0) throw std::invalid_argument("markup must be >= 1");
    }
};

// threshold(b) = baseFee(b) * G * p_ETH(b) * markup / 1e9, in USD.
inline double threshold_usd(double base_fee_gwei, double gas_units, double eth_price_usd,
                            double markup) {
    return base_fee_gwei * gas_units * eth_price_usd * markup / 1e9;
}

inline double threshold_usd(const GasModel& gas, std::int64_t block) {
    return threshold_usd(gas.base_fee_gwei.at(block), static_cast<double>(gas.gas_units),
                         gas.eth_price_usd.at(block), gas.markup);
}

} // namespace tfmm
