// Trade classification shared by the simulator and the trace analyzer.
#pragma once

#include <stdexcept>
#include <string>

namespace tfmm {

enum class TradeClass { WeightDriven, PriceDriven, IncidentalRouting };

struct ClassifyParams {
    // A trade is price-driven when an opportunity above this dust level
    // still exists under stale weights (the "what for" test).
    double stale_opportunity_dust_usd = 0.01;
    // Trades extracting no more than this are incidental routing.
    double incidental_cutoff_usd = 0.01;
};

// Precedence: price-driven beats incidental beats weight-driven.
inline TradeClass classify_rule(double empirical_profit_usd, double stale_opportunity_usd,
                                const ClassifyParams& params) {
    if (stale_opportunity_usd > params.stale_opportunity_dust_usd)
        return TradeClass::PriceDriven;
    if (empirical_profit_usd <= params.incidental_cutoff_usd)
        return TradeClass::IncidentalRouting;
    return TradeClass::WeightDriven;
}

inline const char* to_string(TradeClass c) {
    switch (c) {
        case TradeClass::WeightDriven: return "weight_driven";
        case TradeClass::PriceDriven: return "price_driven";
        case TradeClass::IncidentalRouting: return "incidental_routing";
    }
    return "unknown";
}

inline TradeClass trade_class_from_string(const std::string& s) {
    if (s == "weight_driven") return TradeClass::WeightDriven;
    if (s == "price_driven") return TradeClass::PriceDriven;
    if (s == "incidental_routing") return TradeClass::IncidentalRouting;
    throw std::invalid_argument("unknown trade class: " + s);
}

} // namespace tfmm
