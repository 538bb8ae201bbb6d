#pragma once

#include <fstream>
#include <set>
#include <string>

#include <json.hpp>

#include "echelon/chain.hpp"
#include "echelon/demand.hpp"
#include "echelon/engine.hpp"
#include "echelon/errors.hpp"
#include "echelon/forecast.hpp"
#include "echelon/policy.hpp"

namespace echelon::config_io {

using json = nlohmann::json;

namespace detail {

inline void check_keys(const json& j, const std::string& path, const std::set<std::string>& allowed) {
    if (!j.is_object()) throw ConfigError(path + " must be a JSON object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (!allowed.count(it.key())) throw ConfigError("unknown key '" + it.key() + "' in " + path);
    }
}

template <typename T>
void get_field(const json& j, const char* key, T& out, const std::string& path) {
    if (!j.contains(key)) return;
    try {
        j.at(key).get_to(out);
    } catch (const json::exception& e) {
        throw ConfigError(path + "." + key + ": " + e.what());
    }
}

inline void get_optional(const json& j, const char* key, std::optional<double>& out, const std::string& path) {
    if (!j.contains(key)) return;
    const json& v = j.at(key);
    if (v.is_null()) {
        out.reset();
        return;
    }
    if (!v.is_number()) throw ConfigError(path + "." + key + ": must be a number or null");
    out = v.get<double>();
}

}  // namespace detail

// ===== Section parsers =====

inline void parse_demand(const json& j, demand::DemandConfig& cfg, const std::string& path = "demand") {
    detail::check_keys(j, path,
                       {"base", "annual_amplitude", "annual_period", "weekly_amplitude", "weekly_period", "noise_sd"});
    detail::get_field(j, "base", cfg.base, path);
    detail::get_field(j, "annual_amplitude", cfg.annual_amplitude, path);
    detail::get_field(j, "annual_period", cfg.annual_period, path);
    detail::get_field(j, "weekly_amplitude", cfg.weekly_amplitude, path);
    detail::get_field(j, "weekly_period", cfg.weekly_period, path);
    detail::get_field(j, "noise_sd", cfg.noise_sd, path);
}

inline void parse_chain(const json& j, chain::ChainConfig& cfg, const std::string& path = "chain") {
    detail::check_keys(j, path,
                       {"unit_cost", "unit_price", "holding_rate", "shortage_rate", "lead_time", "initial_inventory",
                        "batch_size", "max_inventory", "cost_mode", "holding_basis"});
    detail::get_field(j, "unit_cost", cfg.unit_cost, path);
    detail::get_field(j, "unit_price", cfg.unit_price, path);
    detail::get_field(j, "holding_rate", cfg.holding_rate, path);
    detail::get_field(j, "shortage_rate", cfg.shortage_rate, path);
    detail::get_field(j, "lead_time", cfg.lead_time, path);
    detail::get_field(j, "initial_inventory", cfg.initial_inventory, path);
    detail::get_field(j, "batch_size", cfg.batch_size, path);
    detail::get_optional(j, "max_inventory", cfg.max_inventory, path);
    if (j.contains("cost_mode")) {
        const std::string mode = j.at("cost_mode").get<std::string>();
        if (mode == "absolute") {
            cfg.cost_mode = chain::CostMode::absolute;
        } else if (mode == "fraction_of_unit_cost") {
            cfg.cost_mode = chain::CostMode::fraction_of_unit_cost;
        } else {
            throw ConfigError(path + ".cost_mode: expected 'absolute' or 'fraction_of_unit_cost'");
        }
    }
    if (j.contains("holding_basis")) {
        const std::string basis = j.at("holding_basis").get<std::string>();
        if (basis == "end_of_day") {
            cfg.holding_basis = chain::HoldingBasis::end_of_day;
        } else if (basis == "midday") {
            cfg.holding_basis = chain::HoldingBasis::midday;
        } else {
            throw ConfigError(path + ".holding_basis: expected 'end_of_day' or 'midday'");
        }
    }
}

inline void parse_policy(const json& j, policy::PolicyParams& cfg, const std::string& path = "policy") {
    detail::check_keys(j, path,
                       {"safety_stock_base", "ss_factor", "demand_lookback", "candidate_step", "batch_size",
                        "demand_multiplier", "lookahead_horizon", "rounding"});
    detail::get_field(j, "safety_stock_base", cfg.safety_stock_base, path);
    detail::get_field(j, "ss_factor", cfg.ss_factor, path);
    detail::get_field(j, "demand_lookback", cfg.demand_lookback, path);
    detail::get_field(j, "candidate_step", cfg.candidate_step, path);
    detail::get_field(j, "batch_size", cfg.batch_size, path);
    detail::get_field(j, "demand_multiplier", cfg.demand_multiplier, path);
    detail::get_field(j, "lookahead_horizon", cfg.lookahead_horizon, path);
    if (j.contains("rounding")) {
        const std::string mode = j.at("rounding").get<std::string>();
        if (mode == "ceil") {
            cfg.rounding = policy::Rounding::ceil_to_batch;
        } else if (mode == "nearest") {
            cfg.rounding = policy::Rounding::nearest_batch;
        } else {
            throw ConfigError(path + ".rounding: expected 'ceil' or 'nearest'");
        }
    }
}

inline void parse_forecaster(const json& j, forecast::ForecasterSpec& spec, const std::string& path = "forecaster") {
    detail::check_keys(j, path,
                       {"kind", "n_neurons", "alpha_base", "kappa", "tau", "dt", "sma_window", "smoothing_alpha",
                        "train", "gbt"});
    if (j.contains("kind")) spec.kind = forecast::kind_from_name(j.at("kind").get<std::string>());
    detail::get_field(j, "n_neurons", spec.n_neurons, path);
    detail::get_field(j, "alpha_base", spec.alpha_base, path);
    detail::get_field(j, "kappa", spec.kappa, path);
    detail::get_field(j, "tau", spec.tau, path);
    detail::get_field(j, "dt", spec.dt, path);
    detail::get_field(j, "sma_window", spec.sma_window, path);
    detail::get_field(j, "smoothing_alpha", spec.smoothing_alpha, path);
    if (j.contains("train")) {
        const json& t = j.at("train");
        detail::check_keys(t, path + ".train", {"learning_rate", "epochs", "batch", "weight_decay", "clip_norm"});
        detail::get_field(t, "learning_rate", spec.train.learning_rate, path + ".train");
        detail::get_field(t, "epochs", spec.train.epochs, path + ".train");
        detail::get_field(t, "batch", spec.train.batch, path + ".train");
        detail::get_field(t, "weight_decay", spec.train.weight_decay, path + ".train");
        detail::get_field(t, "clip_norm", spec.train.clip_norm, path + ".train");
    }
    if (j.contains("gbt")) {
        const json& t = j.at("gbt");
        detail::check_keys(t, path + ".gbt", {"n_trees", "max_depth", "learning_rate", "min_leaf"});
        detail::get_field(t, "n_trees", spec.trees.n_trees, path + ".gbt");
        detail::get_field(t, "max_depth", spec.trees.max_depth, path + ".gbt");
        detail::get_field(t, "learning_rate", spec.trees.learning_rate, path + ".gbt");
        detail::get_field(t, "min_leaf", spec.trees.min_leaf, path + ".gbt");
    }
}

inline void parse_experiment(const json& j, engine::ExperimentConfig& cfg, const std::string& path = "experiment") {
    detail::check_keys(j, path, {"horizon", "train_days", "seeds", "noise_level"});
    detail::get_field(j, "horizon", cfg.horizon, path);
    detail::get_field(j, "train_days", cfg.train_days, path);
    detail::get_field(j, "seeds", cfg.seeds, path);
    detail::get_field(j, "noise_level", cfg.noise_level, path);
}

inline engine::ExperimentConfig parse_config(const json& j) {
    engine::ExperimentConfig cfg;
    detail::check_keys(j, "config", {"experiment", "demand", "chain", "policy", "forecaster"});
    if (j.contains("experiment")) parse_experiment(j.at("experiment"), cfg);
    if (j.contains("demand")) parse_demand(j.at("demand"), cfg.demand_cfg);
    if (j.contains("chain")) parse_chain(j.at("chain"), cfg.chain_cfg);
    if (j.contains("policy")) parse_policy(j.at("policy"), cfg.policy_params);
    if (j.contains("forecaster")) parse_forecaster(j.at("forecaster"), cfg.forecaster);
    return cfg;
}

inline engine::ExperimentConfig load_config_file(const std::string& file) {
    std::ifstream in(file);
    if (!in) throw ConfigError("cannot open config file '" + file + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError("config file '" + file + "': " + e.what());
    }
    return parse_config(j);
}

// ===== Writers (config echo) =====

inline json chain_to_json(const chain::ChainConfig& cfg) {
    json j;
    j["unit_cost"] = cfg.unit_cost;
    j["unit_price"] = cfg.unit_price;
    j["holding_rate"] = cfg.holding_rate;
    j["shortage_rate"] = cfg.shortage_rate;
    j["lead_time"] = cfg.lead_time;
    j["initial_inventory"] = cfg.initial_inventory;
    j["batch_size"] = cfg.batch_size;
    j["max_inventory"] = cfg.max_inventory ? json(*cfg.max_inventory) : json(nullptr);
    j["cost_mode"] = cfg.cost_mode == chain::CostMode::absolute ? "absolute" : "fraction_of_unit_cost";
    j["holding_basis"] = cfg.holding_basis == chain::HoldingBasis::end_of_day ? "end_of_day" : "midday";
    return j;
}

inline chain::ChainConfig chain_from_json(const json& j) {
    chain::ChainConfig cfg;
    parse_chain(j, cfg, "result.chain");
    return cfg;
}

}  // namespace echelon::config_io
