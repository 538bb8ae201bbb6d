#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>

#include "echelon/errors.hpp"

namespace echelon::chain {

// Layer 0 is the consumer (pure demand source); 1 retailer, 2 distributor,
// 3 manufacturer. Cost/price arrays are indexed by layer.
inline constexpr std::size_t kNumLayers = 4;

enum class CostMode { absolute, fraction_of_unit_cost };
enum class HoldingBasis { end_of_day, midday };

struct ChainConfig {
    std::array<double, kNumLayers> unit_cost{0.0, 30.0, 45.0, 60.0};
    std::array<double, kNumLayers> unit_price{0.0, 70.0, 100.0, 130.0};
    double holding_rate = 0.03;
    double shortage_rate = 0.03;
    std::int64_t lead_time = 1;
    double initial_inventory = 100.0;
    double batch_size = 16.0;
    std::optional<double> max_inventory;
    // Interpretation of the 0.03/unit/day rates; absolute currency by default.
    CostMode cost_mode = CostMode::absolute;
    // Holding cost base: end-of-day inventory, or (start+end)/2 with start
    // taken after arrivals.
    HoldingBasis holding_basis = HoldingBasis::end_of_day;

    void validate() const {
        for (std::size_t i = 1; i < kNumLayers; ++i) {
            if (unit_price[i] <= unit_cost[i]) throw ConfigError("unit_price must exceed unit_cost for layers 1..3");
        }
        if (lead_time < 1) throw ConfigError("lead_time must be at least 1 day");
        if (batch_size < 1.0) throw ConfigError("batch_size must be at least 1");
        if (holding_rate < 0.0 || shortage_rate < 0.0) throw ConfigError("cost rates must be non-negative");
        if (initial_inventory < 0.0) throw ConfigError("initial_inventory must be non-negative");
        if (max_inventory && *max_inventory <= 0.0) throw ConfigError("max_inventory must be positive when set");
    }

    // Per-unit holding/shortage charge for a layer under the active mode.
    double holding_charge(std::size_t layer) const {
        return cost_mode == CostMode::absolute ? holding_rate : holding_rate * unit_cost[layer];
    }
    double shortage_charge(std::size_t layer) const {
        return cost_mode == CostMode::absolute ? shortage_rate : shortage_rate * unit_cost[layer];
    }
};

struct LayerState {
    double inventory = 0.0;
    std::map<std::int64_t, double> pipeline;  // arrival day -> units in transit
    double cumulative_profit = 0.0;
};

// One simulated day, all layers; index 0 stays zero (consumers keep no books).
struct DayRecord {
    std::int64_t day = 0;
    std::array<double, kNumLayers> demand{};
    std::array<double, kNumLayers> order{};
    std::array<double, kNumLayers> sales{};
    std::array<double, kNumLayers> revenue{};
    std::array<double, kNumLayers> purchase_cost{};
    std::array<double, kNumLayers> holding_cost{};
    std::array<double, kNumLayers> shortage_cost{};
    std::array<double, kNumLayers> profit{};
    std::array<double, kNumLayers> inventory_start{};  // after arrivals, before sales
    std::array<double, kNumLayers> inventory_end{};
};

// D_i(t) = O_{i-1}(t): each layer's demand is the order placed by the layer
// below it, with consumers ordering exactly their demand.
inline std::array<double, kNumLayers> propagate_demand(const std::array<double, kNumLayers>& downstream_orders) {
    std::array<double, kNumLayers> d{};
    for (std::size_t i = 1; i < kNumLayers; ++i) d[i] = downstream_orders[i - 1];
    return d;
}

inline double profit(double revenue, double purchase_cost, double holding_cost, double shortage_cost) {
    return revenue - purchase_cost - holding_cost - shortage_cost;
}

// Perfect-fulfillment, zero-holding profit ceiling: D * (P - C).
inline double theoretical_profit(double dmd, std::size_t layer, const ChainConfig& cfg) {
    if (layer < 1 || layer >= kNumLayers) throw DomainError("theoretical_profit defined for layers 1..3");
    return dmd * (cfg.unit_price[layer] - cfg.unit_cost[layer]);
}

class Chain {
public:
    explicit Chain(const ChainConfig& cfg) : config_(cfg) {
        cfg.validate();
        reset();
    }

    void reset() {
        for (auto& st : states_) st = LayerState{};
        for (std::size_t i = 1; i < kNumLayers; ++i) states_[i].inventory = config_.initial_inventory;
    }

    const ChainConfig& config() const { return config_; }
    const LayerState& state(std::size_t layer) const { return states_[layer]; }
    LayerState& state(std::size_t layer) { return states_[layer]; }

    // Total units scheduled to arrive at `layer` on day `t`.
    double pipeline_at(std::size_t layer, std::int64_t t) const {
        auto it = states_[layer].pipeline.find(t);
        return it == states_[layer].pipeline.end() ? 0.0 : it->second;
    }

    // One day, per layer: arrivals in, sales out (lost sales beyond stock),
    // order placed and charged, holding on what remains.
    // orders[i] is O_i(t) for i = 1..3; demand0 is consumer demand D_0(t).
    DayRecord step(const std::array<double, kNumLayers>& orders, double demand0, std::int64_t t) {
        if (demand0 < 0.0) throw DomainError("negative consumer demand");
        for (std::size_t i = 1; i < kNumLayers; ++i) {
            if (orders[i] < 0.0) throw DomainError("negative order quantity");
        }

        DayRecord rec;
        rec.day = t;
        auto orders_in = orders;
        orders_in[0] = demand0;
        rec.demand = propagate_demand(orders_in);
        rec.order = orders;
        rec.order[0] = 0.0;

        for (std::size_t i = 1; i < kNumLayers; ++i) {
            LayerState& st = states_[i];

            auto due = st.pipeline.find(t);
            if (due != st.pipeline.end()) {
                st.inventory += due->second;
                st.pipeline.erase(due);
            }
            const double start_inventory = st.inventory;

            const double d = rec.demand[i];
            const double sold = std::min(st.inventory, d);
            st.inventory -= sold;
            const double unmet = d - sold;

            const double q = rec.order[i];
            if (q > 0.0) st.pipeline[t + config_.lead_time] += q;

            rec.sales[i] = sold;
            rec.revenue[i] = config_.unit_price[i] * sold;
            rec.purchase_cost[i] = config_.unit_cost[i] * q;
            rec.shortage_cost[i] = config_.shortage_charge(i) * unmet;
            const double holding_base =
                config_.holding_basis == HoldingBasis::end_of_day ? st.inventory : 0.5 * (start_inventory + st.inventory);
            rec.holding_cost[i] = config_.holding_charge(i) * holding_base;
            rec.profit[i] = profit(rec.revenue[i], rec.purchase_cost[i], rec.holding_cost[i], rec.shortage_cost[i]);
            rec.inventory_start[i] = start_inventory;
            rec.inventory_end[i] = st.inventory;
            st.cumulative_profit += rec.profit[i];
        }
        return rec;
    }

private:
    ChainConfig config_;
    std::array<LayerState, kNumLayers> states_;
};

}  // namespace echelon::chain
