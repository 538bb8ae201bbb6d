#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "echelon/chain.hpp"
#include "echelon/errors.hpp"
#include "echelon/features.hpp"
#include "echelon/mathutil.hpp"

namespace echelon::policy {

enum class Rounding { ceil_to_batch, nearest_batch };

struct PolicyParams {
    double safety_stock_base = 10.0;  // tunable 5..20
    double ss_factor = 1.0;
    std::size_t demand_lookback = 10;
    double candidate_step = 80.0;
    double batch_size = 16.0;
    double demand_multiplier = 1.5;
    std::size_t lookahead_horizon = 7;
    Rounding rounding = Rounding::ceil_to_batch;

    void validate() const {
        if (safety_stock_base < 0.0) throw ConfigError("safety_stock_base must be non-negative");
        if (ss_factor < 0.0) throw ConfigError("ss_factor must be non-negative");
        if (demand_lookback == 0) throw ConfigError("demand_lookback must be positive");
        if (candidate_step <= 0.0) throw ConfigError("candidate_step must be positive");
        if (batch_size < 1.0) throw ConfigError("batch_size must be at least 1");
        if (demand_multiplier <= 0.0) throw ConfigError("demand_multiplier must be positive");
        if (lookahead_horizon == 0 || lookahead_horizon > features::kForecastHorizon) {
            throw ConfigError("lookahead_horizon must be in 1..7");
        }
    }
};

struct OrderDecision {
    std::vector<double> candidates;
    std::vector<double> projections;
    double chosen = 0.0;
    double best_candidate = 0.0;
    double forecast_used = 0.0;
};

// SS = base + factor * population sd of the trailing demand window.
inline double safety_stock(double base, const std::vector<double>& demand_history, double ss_factor = 1.0) {
    if (demand_history.empty()) throw DomainError("safety stock needs demand history");
    return base + ss_factor * math::population_sd(demand_history);
}

// Candidates from the order-up-to lower bound upward in fixed steps, capped
// by the coverage bound 1.5 * avg demand * horizon - inventory.
inline std::vector<double> candidate_orders(double forecast_point, double inventory, double avg_demand_10,
                                            double safety_stock_units, const PolicyParams& params,
                                            std::optional<double> max_inventory = std::nullopt) {
    const double lower = std::max(0.0, forecast_point + safety_stock_units - inventory);
    double upper = params.demand_multiplier * avg_demand_10 * static_cast<double>(params.lookahead_horizon) - inventory;
    if (max_inventory) upper = std::min(upper, *max_inventory - inventory);
    upper = std::max(lower, upper);
    std::vector<double> out;
    out.push_back(lower);
    if (upper > lower) {
        for (double q = lower + params.candidate_step; q < upper; q += params.candidate_step) out.push_back(q);
        out.push_back(upper);
    }
    return out;
}

// Ledger over the lookahead horizon using the chain's cost rules: the
// candidate is purchased now, arrives after lead_time, demand follows the
// raw 7-day forecast, unmet demand is lost.
inline double project_profit(double candidate, const features::Target& forecasts, const chain::LayerState& state,
                             std::int64_t t, const chain::ChainConfig& cfg, std::size_t layer,
                             std::size_t horizon = features::kForecastHorizon) {
    if (candidate < 0.0) throw DomainError("candidate order must be non-negative");
    if (layer < 1 || layer >= chain::kNumLayers) throw DomainError("policy layers are 1..3");

    double inventory = state.inventory;
    double revenue = 0.0, holding = 0.0, shortage = 0.0;
    for (std::size_t k = 0; k < horizon; ++k) {
        const std::int64_t day = t + static_cast<std::int64_t>(k);
        auto it = state.pipeline.find(day);
        const double start = inventory + (it == state.pipeline.end() ? 0.0 : it->second) +
                             (static_cast<std::int64_t>(k) == cfg.lead_time ? candidate : 0.0);
        inventory = start;
        const double d = forecasts[k];
        const double sold = std::min(inventory, d);
        inventory -= sold;
        revenue += cfg.unit_price[layer] * sold;
        shortage += cfg.shortage_charge(layer) * (d - sold);
        const double base = cfg.holding_basis == chain::HoldingBasis::end_of_day ? inventory : 0.5 * (start + inventory);
        holding += cfg.holding_charge(layer) * base;
    }
    return revenue - cfg.unit_cost[layer] * candidate - holding - shortage;
}

// Round the winning candidate up to a batch multiple (ceil form); the
// nearest-multiple variant sits behind the params flag.
inline double round_to_batch(double q, double batch, Rounding mode) {
    if (q <= 0.0) return 0.0;
    const double ratio = q / batch;
    double units = 0.0;
    if (mode == Rounding::ceil_to_batch) {
        units = std::ceil(ratio - 1e-9);
    } else {
        units = std::round(ratio);
    }
    return std::max(0.0, units) * batch;
}

inline OrderDecision choose_order(const std::vector<double>& candidates, const std::vector<double>& projections,
                                  double batch_size, Rounding mode = Rounding::ceil_to_batch) {
    if (candidates.empty() || candidates.size() != projections.size()) {
        throw DomainError("choose_order needs matching non-empty candidates and projections");
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i < candidates.size(); ++i) {
        // ties go to the smaller quantity; candidates arrive sorted ascending
        if (projections[i] > projections[best]) best = i;
    }
    OrderDecision d;
    d.candidates = candidates;
    d.projections = projections;
    d.best_candidate = candidates[best];
    d.chosen = round_to_batch(candidates[best], batch_size, mode);
    return d;
}

}  // namespace echelon::policy
