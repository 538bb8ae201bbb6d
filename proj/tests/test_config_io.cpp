#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <string>

#include "echelon/config_io.hpp"
#include "echelon/errors.hpp"

using namespace echelon;
using nlohmann::json;

namespace {

std::string error_text(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const std::exception& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST_CASE("empty config falls back to defaults", "[config]") {
    const auto cfg = config_io::parse_config(json::object());
    REQUIRE(cfg.horizon == 1095);
    REQUIRE(cfg.train_days == 219);
    REQUIRE(cfg.seeds.size() == 10);
    REQUIRE(cfg.seeds.front() == 42);
    REQUIRE(cfg.forecaster.kind == forecast::Kind::hybrid);
    REQUIRE(cfg.chain_cfg.lead_time == 1);
    REQUIRE(cfg.policy_params.batch_size == 16.0);
    REQUIRE_NOTHROW(cfg.validate());
}

TEST_CASE("every section lands on its config fields", "[config]") {
    const auto j = json::parse(R"({
        "experiment": {"horizon": 300, "train_days": 60, "seeds": [7, 8], "noise_level": 0.5},
        "demand": {"base": 55, "annual_amplitude": 10, "annual_period": 120, "weekly_amplitude": 2,
                   "weekly_period": 5, "noise_sd": 1.5},
        "chain": {"unit_cost": [0, 25, 40, 55], "unit_price": [0, 60, 90, 120], "holding_rate": 0.05,
                  "shortage_rate": 0.02, "lead_time": 2, "initial_inventory": 150, "batch_size": 8,
                  "max_inventory": 600, "cost_mode": "fraction_of_unit_cost", "holding_basis": "midday"},
        "policy": {"safety_stock_base": 12, "ss_factor": 0.5, "demand_lookback": 8, "candidate_step": 40,
                   "batch_size": 8, "demand_multiplier": 2.0, "lookahead_horizon": 5, "rounding": "nearest"},
        "forecaster": {"kind": "gbt", "n_neurons": 32, "alpha_base": 0.4, "kappa": 0.2, "tau": 2.0, "dt": 0.5,
                       "sma_window": 6, "smoothing_alpha": 0.25,
                       "train": {"learning_rate": 0.0005, "epochs": 20, "batch": 4, "weight_decay": 0.001,
                                 "clip_norm": 2.0},
                       "gbt": {"n_trees": 150, "max_depth": 4, "learning_rate": 0.05, "min_leaf": 3}}
    })");
    const auto cfg = config_io::parse_config(j);
    REQUIRE(cfg.horizon == 300);
    REQUIRE(cfg.train_days == 60);
    REQUIRE(cfg.seeds == std::vector<std::uint64_t>{7, 8});
    REQUIRE(cfg.noise_level == 0.5);
    REQUIRE(cfg.demand_cfg.base == 55.0);
    REQUIRE(cfg.demand_cfg.annual_period == 120.0);
    REQUIRE(cfg.chain_cfg.unit_cost[2] == 40.0);
    REQUIRE(cfg.chain_cfg.lead_time == 2);
    REQUIRE(cfg.chain_cfg.max_inventory.has_value());
    REQUIRE(*cfg.chain_cfg.max_inventory == 600.0);
    REQUIRE(cfg.chain_cfg.cost_mode == chain::CostMode::fraction_of_unit_cost);
    REQUIRE(cfg.chain_cfg.holding_basis == chain::HoldingBasis::midday);
    REQUIRE(cfg.policy_params.demand_lookback == 8);
    REQUIRE(cfg.policy_params.rounding == policy::Rounding::nearest_batch);
    REQUIRE(cfg.forecaster.kind == forecast::Kind::gbt);
    REQUIRE(cfg.forecaster.train.epochs == 20);
    REQUIRE(cfg.forecaster.trees.min_leaf == 3);
    REQUIRE(cfg.forecaster.smoothing_alpha == 0.25);
}

TEST_CASE("unknown keys carry their section path", "[config]") {
    const auto top = error_text([] { config_io::parse_config(json::parse(R"({"experment": {}})")); });
    REQUIRE(top.find("experment") != std::string::npos);
    REQUIRE(top.find("config") != std::string::npos);

    const auto nested =
        error_text([] { config_io::parse_config(json::parse(R"({"demand": {"bases": 3}})")); });
    REQUIRE(nested.find("bases") != std::string::npos);
    REQUIRE(nested.find("demand") != std::string::npos);

    const auto train = error_text(
        [] { config_io::parse_config(json::parse(R"({"forecaster": {"train": {"momentum": 0.9}}})")); });
    REQUIRE(train.find("forecaster.train") != std::string::npos);
}

TEST_CASE("type mismatches carry field paths", "[config]") {
    const auto msg =
        error_text([] { config_io::parse_config(json::parse(R"({"experiment": {"horizon": "long"}})")); });
    REQUIRE(msg.find("experiment.horizon") != std::string::npos);
    REQUIRE_THROWS_AS(config_io::parse_config(json::parse(R"({"experiment": {"horizon": "long"}})")), ConfigError);
}

TEST_CASE("enum strings are validated", "[config]") {
    REQUIRE_THROWS_AS(config_io::parse_config(json::parse(R"({"chain": {"cost_mode": "percent"}})")), ConfigError);
    REQUIRE_THROWS_AS(config_io::parse_config(json::parse(R"({"chain": {"holding_basis": "noon"}})")), ConfigError);
    REQUIRE_THROWS_AS(config_io::parse_config(json::parse(R"({"policy": {"rounding": "floor"}})")), ConfigError);
    REQUIRE_THROWS_AS(config_io::parse_config(json::parse(R"({"forecaster": {"kind": "prophet"}})")), ConfigError);

    const auto ceil_cfg = config_io::parse_config(json::parse(R"({"policy": {"rounding": "ceil"}})"));
    REQUIRE(ceil_cfg.policy_params.rounding == policy::Rounding::ceil_to_batch);
    const auto abs_cfg = config_io::parse_config(json::parse(R"({"chain": {"cost_mode": "absolute"}})"));
    REQUIRE(abs_cfg.chain_cfg.cost_mode == chain::CostMode::absolute);
}

TEST_CASE("max_inventory accepts null and numbers only", "[config]") {
    const auto off = config_io::parse_config(json::parse(R"({"chain": {"max_inventory": null}})"));
    REQUIRE_FALSE(off.chain_cfg.max_inventory.has_value());
    const auto on = config_io::parse_config(json::parse(R"({"chain": {"max_inventory": 450}})"));
    REQUIRE(*on.chain_cfg.max_inventory == 450.0);
    REQUIRE_THROWS_AS(config_io::parse_config(json::parse(R"({"chain": {"max_inventory": "lots"}})")), ConfigError);
}

TEST_CASE("config files load and reject garbage", "[config]") {
    namespace fs = std::filesystem;
    const auto dir = fs::temp_directory_path() / "echelon_config_test";
    fs::create_directories(dir);
    const auto good = dir / "good.json";
    {
        std::ofstream out(good);
        out << R"({"experiment": {"horizon": 200, "train_days": 50}})";
    }
    const auto cfg = config_io::load_config_file(good.string());
    REQUIRE(cfg.horizon == 200);

    const auto bad = dir / "bad.json";
    {
        std::ofstream out(bad);
        out << "{not json";
    }
    REQUIRE_THROWS_AS(config_io::load_config_file(bad.string()), ConfigError);
    REQUIRE_THROWS_AS(config_io::load_config_file((dir / "missing.json").string()), ConfigError);
    fs::remove_all(dir);
}

TEST_CASE("chain config echo round-trips", "[config]") {
    chain::ChainConfig cfg;
    cfg.unit_cost = {0.0, 25.0, 40.0, 55.0};
    cfg.unit_price = {0.0, 60.0, 90.0, 120.0};
    cfg.holding_rate = 0.05;
    cfg.shortage_rate = 0.02;
    cfg.lead_time = 3;
    cfg.initial_inventory = 80.0;
    cfg.batch_size = 8.0;
    cfg.max_inventory = 640.0;
    cfg.cost_mode = chain::CostMode::fraction_of_unit_cost;
    cfg.holding_basis = chain::HoldingBasis::midday;

    const auto back = config_io::chain_from_json(config_io::chain_to_json(cfg));
    REQUIRE(back.unit_cost == cfg.unit_cost);
    REQUIRE(back.unit_price == cfg.unit_price);
    REQUIRE(back.holding_rate == cfg.holding_rate);
    REQUIRE(back.shortage_rate == cfg.shortage_rate);
    REQUIRE(back.lead_time == cfg.lead_time);
    REQUIRE(back.initial_inventory == cfg.initial_inventory);
    REQUIRE(back.batch_size == cfg.batch_size);
    REQUIRE(back.max_inventory == cfg.max_inventory);
    REQUIRE(back.cost_mode == cfg.cost_mode);
    REQUIRE(back.holding_basis == cfg.holding_basis);

    chain::ChainConfig open;
    open.max_inventory.reset();
    const auto back2 = config_io::chain_from_json(config_io::chain_to_json(open));
    REQUIRE_FALSE(back2.max_inventory.has_value());
}
