#include <catch2/catch_amalgamated.hpp>

#include <optional>
#include <vector>

#include "echelon/chain.hpp"
#include "echelon/errors.hpp"
#include "echelon/policy.hpp"

using namespace echelon;
using Catch::Matchers::WithinAbs;

TEST_CASE("safety stock adds scaled demand spread", "[policy]") {
    const std::vector<double> hist{60.0, 70.0, 80.0, 90.0, 100.0};
    REQUIRE_THAT(policy::safety_stock(10.0, hist), WithinAbs(10.0 + 14.142135623730951, 1e-12));
    REQUIRE_THAT(policy::safety_stock(10.0, hist, 2.0), WithinAbs(10.0 + 2.0 * 14.142135623730951, 1e-12));
    REQUIRE(policy::safety_stock(5.0, {42.0}) == 5.0);
    REQUIRE_THROWS_AS(policy::safety_stock(10.0, {}), DomainError);
}

TEST_CASE("candidate grid spans lower to coverage bound", "[policy]") {
    policy::PolicyParams p;
    const auto c = policy::candidate_orders(100.0, 10.0, 50.0, 20.0, p);
    // lower = 100 + 20 - 10, upper = 1.5 * 50 * 7 - 10
    REQUIRE(c == std::vector<double>{110.0, 190.0, 270.0, 350.0, 430.0, 510.0, 515.0});
}

TEST_CASE("well-stocked layers get a single zero candidate", "[policy]") {
    policy::PolicyParams p;
    const auto c = policy::candidate_orders(40.0, 1000.0, 50.0, 10.0, p);
    REQUIRE(c == std::vector<double>{0.0});
}

TEST_CASE("inventory cap tightens the upper bound", "[policy]") {
    policy::PolicyParams p;
    const auto c = policy::candidate_orders(100.0, 50.0, 50.0, 20.0, p, 200.0);
    // upper = min(1.5 * 50 * 7, 200) - 50
    REQUIRE(c.front() == 70.0);
    REQUIRE(c.back() == 150.0);
    REQUIRE(c == std::vector<double>{70.0, 150.0});
}

TEST_CASE("batch rounding in both modes", "[policy]") {
    using policy::round_to_batch;
    const auto ceil_mode = policy::Rounding::ceil_to_batch;
    const auto near_mode = policy::Rounding::nearest_batch;

    REQUIRE(round_to_batch(1.0, 16.0, ceil_mode) == 16.0);
    REQUIRE(round_to_batch(16.0, 16.0, ceil_mode) == 16.0);
    REQUIRE(round_to_batch(16.0 * (1.0 + 1e-12), 16.0, ceil_mode) == 16.0);
    REQUIRE(round_to_batch(17.0, 16.0, ceil_mode) == 32.0);
    REQUIRE(round_to_batch(0.0, 16.0, ceil_mode) == 0.0);
    REQUIRE(round_to_batch(-3.0, 16.0, ceil_mode) == 0.0);

    REQUIRE(round_to_batch(7.0, 16.0, near_mode) == 0.0);
    REQUIRE(round_to_batch(8.0, 16.0, near_mode) == 16.0);
    REQUIRE(round_to_batch(23.0, 16.0, near_mode) == 16.0);
    REQUIRE(round_to_batch(25.0, 16.0, near_mode) == 32.0);
}

TEST_CASE("order choice is argmax with ties to the smaller quantity", "[policy]") {
    const std::vector<double> cands{0.0, 80.0, 160.0};
    const auto d = policy::choose_order(cands, {1.0, 5.0, 2.0}, 16.0);
    REQUIRE(d.best_candidate == 80.0);
    REQUIRE(d.chosen == 80.0);

    const auto tie = policy::choose_order(cands, {5.0, 5.0, 5.0}, 16.0);
    REQUIRE(tie.best_candidate == 0.0);

    const auto rounded = policy::choose_order({10.0}, {1.0}, 16.0);
    REQUIRE(rounded.chosen == 16.0);
    const auto nearest = policy::choose_order({10.0}, {1.0}, 16.0, policy::Rounding::nearest_batch);
    REQUIRE(nearest.chosen == 16.0);

    REQUIRE_THROWS_AS(policy::choose_order({}, {}, 16.0), DomainError);
    REQUIRE_THROWS_AS(policy::choose_order({1.0}, {1.0, 2.0}, 16.0), DomainError);
}

TEST_CASE("profit projection walks the lookahead ledger", "[policy]") {
    chain::ChainConfig cfg;
    chain::LayerState st;
    st.inventory = 50.0;
    st.pipeline[101] = 10.0;
    features::Target fc{};
    fc.fill(40.0);

    // day 100: sell 40 of 50; day 101: 10 + 10 arriving + 30 ordered, sell 40;
    // day 102: sell the last 10, 30 lost
    const double got = policy::project_profit(30.0, fc, st, 100, cfg, 1, 3);
    const double revenue = 70.0 * (40.0 + 40.0 + 10.0);
    const double purchase = 30.0 * 30.0;
    const double holding = 0.03 * (10.0 + 10.0 + 0.0);
    const double shortage = 0.03 * 30.0;
    REQUIRE_THAT(got, WithinAbs(revenue - purchase - holding - shortage, 1e-9));

    chain::ChainConfig mid = cfg;
    mid.holding_basis = chain::HoldingBasis::midday;
    const double got_mid = policy::project_profit(30.0, fc, st, 100, mid, 1, 3);
    const double holding_mid = 0.03 * (30.0 + 30.0 + 5.0);
    REQUIRE_THAT(got_mid, WithinAbs(revenue - purchase - holding_mid - shortage, 1e-9));

    REQUIRE_THROWS_AS(policy::project_profit(-1.0, fc, st, 100, cfg, 1), DomainError);
    REQUIRE_THROWS_AS(policy::project_profit(10.0, fc, st, 100, cfg, 0), DomainError);
    REQUIRE_THROWS_AS(policy::project_profit(10.0, fc, st, 100, cfg, 4), DomainError);
}

TEST_CASE("projection prefers restocking when margins dominate", "[policy]") {
    chain::ChainConfig cfg;
    chain::LayerState st;
    st.inventory = 0.0;
    features::Target fc{};
    fc.fill(40.0);
    // price 70 vs cost 30 at layer 1: ordering a day of demand beats idling
    const double none = policy::project_profit(0.0, fc, st, 10, cfg, 1);
    const double restock = policy::project_profit(40.0, fc, st, 10, cfg, 1);
    REQUIRE(restock > none);
}

TEST_CASE("policy parameter validation", "[policy]") {
    policy::PolicyParams p;
    p.safety_stock_base = -1.0;
    REQUIRE_THROWS_AS(p.validate(), ConfigError);
    p = {};
    p.candidate_step = 0.0;
    REQUIRE_THROWS_AS(p.validate(), ConfigError);
    p = {};
    p.batch_size = 0.5;
    REQUIRE_THROWS_AS(p.validate(), ConfigError);
    p = {};
    p.lookahead_horizon = 8;
    REQUIRE_THROWS_AS(p.validate(), ConfigError);
    p = {};
    REQUIRE_NOTHROW(p.validate());
}
