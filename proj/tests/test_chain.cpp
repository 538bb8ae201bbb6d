#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <cmath>

#include "echelon/chain.hpp"
#include "echelon/errors.hpp"

using namespace echelon;
using Catch::Matchers::WithinAbs;

namespace {

chain::ChainConfig simple_config() {
    chain::ChainConfig cfg;
    cfg.initial_inventory = 100.0;
    return cfg;
}

}  // namespace

TEST_CASE("demand propagates one layer up", "[chain]") {
    const std::array<double, 4> orders{37.0, 11.0, 22.0, 33.0};
    const auto d = chain::propagate_demand(orders);
    REQUIRE(d[0] == 0.0);
    REQUIRE(d[1] == 37.0);
    REQUIRE(d[2] == 11.0);
    REQUIRE(d[3] == 22.0);
}

TEST_CASE("single day books every ledger entry", "[chain]") {
    chain::Chain sim(simple_config());
    const auto rec = sim.step({0.0, 48.0, 32.0, 16.0}, 40.0, 0);

    // retailer: sells 40 of 100, orders 48 at cost 30, holds 60 units
    REQUIRE(rec.demand[1] == 40.0);
    REQUIRE(rec.sales[1] == 40.0);
    REQUIRE(rec.revenue[1] == 40.0 * 70.0);
    REQUIRE(rec.purchase_cost[1] == 48.0 * 30.0);
    REQUIRE(rec.shortage_cost[1] == 0.0);
    REQUIRE_THAT(rec.holding_cost[1], WithinAbs(0.03 * 60.0, 1e-12));
    REQUIRE(rec.profit[1] == rec.revenue[1] - rec.purchase_cost[1] - rec.holding_cost[1] - rec.shortage_cost[1]);
    REQUIRE(rec.inventory_start[1] == 100.0);
    REQUIRE(rec.inventory_end[1] == 60.0);

    // distributor demand is the retailer order
    REQUIRE(rec.demand[2] == 48.0);
    REQUIRE(rec.sales[2] == 48.0);
    REQUIRE(rec.inventory_end[2] == 52.0);

    REQUIRE(rec.demand[3] == 32.0);
    REQUIRE(sim.state(1).cumulative_profit == rec.profit[1]);
}

TEST_CASE("orders arrive after the lead time", "[chain]") {
    chain::Chain sim(simple_config());
    sim.step({0.0, 24.0, 0.0, 0.0}, 0.0, 0);
    REQUIRE(sim.pipeline_at(1, 1) == 24.0);
    REQUIRE(sim.state(1).inventory == 100.0);

    const auto rec = sim.step({0.0, 0.0, 0.0, 0.0}, 0.0, 1);
    REQUIRE(rec.inventory_start[1] == 124.0);
    REQUIRE(sim.state(1).inventory == 124.0);
    REQUIRE(sim.pipeline_at(1, 1) == 0.0);
}

TEST_CASE("longer lead times hold goods in transit", "[chain]") {
    auto cfg = simple_config();
    cfg.lead_time = 3;
    chain::Chain sim(cfg);
    sim.step({0.0, 16.0, 0.0, 0.0}, 0.0, 0);
    REQUIRE(sim.pipeline_at(1, 3) == 16.0);
    sim.step({0.0, 0.0, 0.0, 0.0}, 0.0, 1);
    sim.step({0.0, 0.0, 0.0, 0.0}, 0.0, 2);
    REQUIRE(sim.state(1).inventory == 100.0);
    sim.step({0.0, 0.0, 0.0, 0.0}, 0.0, 3);
    REQUIRE(sim.state(1).inventory == 116.0);
}

TEST_CASE("excess demand is lost and charged", "[chain]") {
    chain::Chain sim(simple_config());
    const auto rec = sim.step({0.0, 0.0, 0.0, 0.0}, 130.0, 0);
    REQUIRE(rec.sales[1] == 100.0);
    REQUIRE(rec.inventory_end[1] == 0.0);
    REQUIRE_THAT(rec.shortage_cost[1], WithinAbs(0.03 * 30.0, 1e-12));
    REQUIRE(rec.holding_cost[1] == 0.0);

    // the lost 30 units do not reappear later
    const auto next = sim.step({0.0, 0.0, 0.0, 0.0}, 0.0, 1);
    REQUIRE(next.sales[1] == 0.0);
    REQUIRE(next.inventory_start[1] == 0.0);
}

TEST_CASE("midday holding averages start and end inventory", "[chain]") {
    auto cfg = simple_config();
    cfg.holding_basis = chain::HoldingBasis::midday;
    chain::Chain sim(cfg);
    const auto rec = sim.step({0.0, 0.0, 0.0, 0.0}, 40.0, 0);
    REQUIRE_THAT(rec.holding_cost[1], WithinAbs(0.03 * 0.5 * (100.0 + 60.0), 1e-12));
}

TEST_CASE("fractional cost mode scales by unit cost", "[chain]") {
    auto cfg = simple_config();
    cfg.cost_mode = chain::CostMode::fraction_of_unit_cost;
    chain::Chain sim(cfg);
    const auto rec = sim.step({0.0, 0.0, 0.0, 0.0}, 130.0, 0);
    REQUIRE_THAT(rec.shortage_cost[1], WithinAbs(0.03 * 30.0 * 30.0, 1e-9));
    const auto rec2 = sim.step({0.0, 0.0, 0.0, 0.0}, 0.0, 1);
    REQUIRE(rec2.holding_cost[2] == Catch::Approx(0.03 * 45.0 * 100.0));
}

TEST_CASE("cumulative profit is the running sum of daily profits", "[chain]") {
    chain::Chain sim(simple_config());
    double expected = 0.0;
    for (int t = 0; t < 50; ++t) {
        const auto rec = sim.step({0.0, 20.0, 20.0, 20.0}, 18.0 + (t % 5), t);
        expected += rec.profit[2];
        REQUIRE(rec.profit[2] ==
                chain::profit(rec.revenue[2], rec.purchase_cost[2], rec.holding_cost[2], rec.shortage_cost[2]));
    }
    REQUIRE_THAT(sim.state(2).cumulative_profit, WithinAbs(expected, 1e-9));
}

TEST_CASE("inventory never goes negative", "[chain]") {
    chain::Chain sim(simple_config());
    for (int t = 0; t < 30; ++t) {
        sim.step({0.0, 5.0, 5.0, 5.0}, 80.0, t);
        for (std::size_t i = 1; i < chain::kNumLayers; ++i) REQUIRE(sim.state(i).inventory >= 0.0);
    }
}

TEST_CASE("theoretical profit is demand times margin", "[chain]") {
    const auto cfg = simple_config();
    REQUIRE(chain::theoretical_profit(10.0, 1, cfg) == 400.0);
    REQUIRE(chain::theoretical_profit(10.0, 3, cfg) == 700.0);
    REQUIRE_THROWS_AS(chain::theoretical_profit(10.0, 0, cfg), DomainError);
}

TEST_CASE("reset restores the initial state", "[chain]") {
    chain::Chain sim(simple_config());
    sim.step({0.0, 10.0, 10.0, 10.0}, 25.0, 0);
    sim.reset();
    REQUIRE(sim.state(1).inventory == 100.0);
    REQUIRE(sim.state(1).cumulative_profit == 0.0);
    REQUIRE(sim.state(1).pipeline.empty());
}

TEST_CASE("chain rejects bad input", "[chain]") {
    chain::Chain sim(simple_config());
    REQUIRE_THROWS_AS(sim.step({0.0, -1.0, 0.0, 0.0}, 10.0, 0), DomainError);
    REQUIRE_THROWS_AS(sim.step({0.0, 0.0, 0.0, 0.0}, -5.0, 0), DomainError);

    auto bad = simple_config();
    bad.unit_price[1] = 10.0;  // below cost
    REQUIRE_THROWS_AS(chain::Chain(bad), ConfigError);
    auto bad2 = simple_config();
    bad2.lead_time = 0;
    REQUIRE_THROWS_AS(chain::Chain(bad2), ConfigError);
}
