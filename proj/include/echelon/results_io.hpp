#pragma once

#include <algorithm>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "echelon/checkpoint.hpp"
#include "echelon/config_io.hpp"
#include "echelon/engine.hpp"
#include "echelon/errors.hpp"

namespace echelon::results_io {

using json = nlohmann::json;

inline json series_to_json(const engine::LayerSeries& s) {
    json j;
    j["demand"] = s.demand;
    j["orders"] = s.orders;
    j["sales"] = s.sales;
    j["inventory_start"] = s.inventory_start;
    j["inventory_end"] = s.inventory_end;
    j["revenue"] = s.revenue;
    j["purchase_cost"] = s.purchase_cost;
    j["holding_cost"] = s.holding_cost;
    j["shortage_cost"] = s.shortage_cost;
    j["profit"] = s.profit;
    j["cumulative_profit"] = s.cumulative_profit;
    j["forecast_day1"] = s.forecast_day1;
    j["forecast_weighted"] = s.forecast_weighted;
    j["forecast_smoothed"] = s.forecast_smoothed;
    j["mae"] = s.mae;
    return j;
}

inline engine::LayerSeries series_from_json(const json& j) {
    engine::LayerSeries s;
    j.at("demand").get_to(s.demand);
    j.at("orders").get_to(s.orders);
    j.at("sales").get_to(s.sales);
    j.at("inventory_start").get_to(s.inventory_start);
    j.at("inventory_end").get_to(s.inventory_end);
    j.at("revenue").get_to(s.revenue);
    j.at("purchase_cost").get_to(s.purchase_cost);
    j.at("holding_cost").get_to(s.holding_cost);
    j.at("shortage_cost").get_to(s.shortage_cost);
    j.at("profit").get_to(s.profit);
    j.at("cumulative_profit").get_to(s.cumulative_profit);
    j.at("forecast_day1").get_to(s.forecast_day1);
    j.at("forecast_weighted").get_to(s.forecast_weighted);
    j.at("forecast_smoothed").get_to(s.forecast_smoothed);
    j.at("mae").get_to(s.mae);
    return s;
}

// Canonical result document: no timestamps or host details, keys sorted by
// the JSON library, so identical runs serialize byte-identically.
inline json run_to_json(const engine::RunResult& r) {
    json j;
    j["version"] = checkpoint::kFormatVersion;
    j["model"] = r.model;
    j["seed"] = r.seed;
    j["noise_level"] = r.noise_level;
    j["train_days"] = r.train_days;
    j["horizon"] = r.horizon;
    j["chain"] = config_io::chain_to_json(r.chain_cfg);
    for (std::size_t layer = 1; layer < chain::kNumLayers; ++layer) {
        j["layers"]["layer_" + std::to_string(layer)] = series_to_json(r.layers[layer]);
    }
    return j;
}

inline engine::RunResult run_from_json(const json& j) {
    engine::RunResult r;
    if (j.at("version").get<int>() != checkpoint::kFormatVersion) throw ConfigError("unsupported result version");
    r.model = j.at("model").get<std::string>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.noise_level = j.at("noise_level").get<double>();
    r.train_days = j.at("train_days").get<std::size_t>();
    r.horizon = j.at("horizon").get<std::size_t>();
    r.chain_cfg = config_io::chain_from_json(j.at("chain"));
    for (std::size_t layer = 1; layer < chain::kNumLayers; ++layer) {
        r.layers[layer] = series_from_json(j.at("layers").at("layer_" + std::to_string(layer)));
    }
    return r;
}

// results/<model>/<seed>.json under the output directory.
inline std::filesystem::path run_path(const std::filesystem::path& results_dir, const engine::RunResult& r) {
    return results_dir / r.model / (std::to_string(r.seed) + ".json");
}

inline void save_run(const std::filesystem::path& results_dir, const engine::RunResult& r) {
    const std::filesystem::path p = run_path(results_dir, r);
    std::filesystem::create_directories(p.parent_path());
    checkpoint::write_json_file(p.string(), run_to_json(r));
}

struct LoadedRuns {
    std::vector<engine::RunResult> runs;
    std::vector<std::string> warnings;  // malformed files, skipped
};

inline LoadedRuns load_runs(const std::filesystem::path& results_dir) {
    if (!std::filesystem::is_directory(results_dir)) {
        throw ConfigError("results directory '" + results_dir.string() + "' does not exist");
    }
    LoadedRuns out;
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::recursive_directory_iterator(results_dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
        try {
            out.runs.push_back(run_from_json(checkpoint::read_json_file(f.string())));
        } catch (const std::exception& e) {
            out.warnings.push_back(f.string() + ": " + e.what());
        }
    }
    if (out.runs.empty()) throw ConfigError("no readable result files under '" + results_dir.string() + "'");
    return out;
}

}  // namespace echelon::results_io
