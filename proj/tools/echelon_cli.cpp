#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "echelon/config_io.hpp"
#include "echelon/engine.hpp"
#include "echelon/errors.hpp"
#include "echelon/eval.hpp"
#include "echelon/report.hpp"
#include "echelon/results_io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string default_output() {
    if (const char* env = std::getenv("ECHELON_OUTPUT")) return env;
    return "out";
}

echelon::engine::ExperimentConfig load_config(const std::string& file) {
    if (file.empty()) return echelon::engine::ExperimentConfig{};
    return echelon::config_io::load_config_file(file);
}

void apply_overrides(echelon::engine::ExperimentConfig& cfg, const std::string& model,
                     const std::vector<std::uint64_t>& seeds, double noise) {
    if (!model.empty()) cfg.forecaster.kind = echelon::forecast::kind_from_name(model);
    if (!seeds.empty()) cfg.seeds = seeds;
    if (noise >= 0.0) cfg.noise_level = noise;
}

echelon::eval::ScoreWeights weights_by_name(const std::string& name) {
    if (name == "default") return echelon::eval::default_weights();
    if (name == "custom") return echelon::eval::custom_weights();
    throw echelon::ConfigError("unknown weight scheme '" + name + "' (expected default or custom)");
}

json trial_params_json(const echelon::engine::TrialParams& p) {
    return {{"n_neurons", p.n_neurons},          {"lnn_learning_rate", p.lnn_lr},
            {"lnn_epochs", p.epochs},            {"lnn_batch", p.batch},
            {"gbt_trees", p.n_trees},            {"gbt_max_depth", p.max_depth},
            {"gbt_learning_rate", p.gbt_lr},     {"safety_stock_base", p.ss_base}};
}

int cmd_simulate(echelon::engine::ExperimentConfig cfg, const std::string& output, std::size_t jobs, int verbosity) {
    const fs::path results_dir = fs::path(output) / "results";
    std::size_t written = 0;
    const auto sink = [&](const echelon::engine::RunResult& r) {
        echelon::results_io::save_run(results_dir, r);
        ++written;
        std::cout << r.model << " seed " << r.seed << " -> " << echelon::results_io::run_path(results_dir, r).string();
        if (verbosity > 0) {
            std::cout << "  (manufacturer profit " << r.layers[3].cumulative_profit.back() << ")";
        }
        std::cout << "\n";
    };
    const auto outcome = echelon::engine::run_experiment(cfg, jobs, sink);
    std::cout << written << " of " << cfg.seeds.size() << " runs written\n";
    if (!outcome.failures.empty()) {
        for (const auto& [seed, msg] : outcome.failures) {
            std::cerr << "seed " << seed << " failed: " << msg << "\n";
        }
        return 1;
    }
    return 0;
}

int cmd_tune(const echelon::engine::ExperimentConfig& cfg, const std::string& output, std::size_t trials,
             const std::string& sampler_name, bool per_seed, int verbosity) {
    echelon::engine::Sampler sampler;
    if (sampler_name == "random") {
        sampler = echelon::engine::Sampler::random;
    } else if (sampler_name == "tpe") {
        sampler = echelon::engine::Sampler::tpe;
    } else {
        throw echelon::ConfigError("unknown sampler '" + sampler_name + "' (expected random or tpe)");
    }

    const echelon::engine::SearchSpace space;
    const auto run_one = [&](const echelon::engine::ExperimentConfig& c, const std::string& suffix) {
        const auto result = echelon::engine::tune(c, space, trials, sampler);
        json log = json::array();
        for (std::size_t i = 0; i < result.log.size(); ++i) {
            log.push_back({{"trial", i},
                           {"params", trial_params_json(result.log[i].params)},
                           {"objective", result.log[i].objective}});
            if (verbosity > 0) {
                std::cout << "trial " << i << ": objective " << result.log[i].objective << "\n";
            }
        }
        const json best = {{"objective", result.best_objective}, {"params", trial_params_json(result.best)}};
        echelon::report::write_text_file(fs::path(output) / ("best_params" + suffix + ".json"),
                                         best.dump(2) + "\n");
        echelon::report::write_text_file(fs::path(output) / ("tune_log" + suffix + ".json"), log.dump(2) + "\n");
        std::cout << "best objective " << result.best_objective << " -> "
                  << (fs::path(output) / ("best_params" + suffix + ".json")).string() << "\n";
    };

    if (per_seed) {
        for (std::uint64_t seed : cfg.seeds) {
            auto c = cfg;
            c.seeds = {seed};
            run_one(c, "_" + std::to_string(seed));
        }
    } else {
        run_one(cfg, "");
    }
    return 0;
}

int cmd_evaluate(const std::string& output, const std::string& results_opt, const std::string& weights_name) {
    const fs::path results_dir = results_opt.empty() ? fs::path(output) / "results" : fs::path(results_opt);
    const auto loaded = echelon::results_io::load_runs(results_dir);
    for (const auto& w : loaded.warnings) std::cerr << "warning: " << w << "\n";
    const auto files = echelon::report::write_evaluation(loaded.runs, output, weights_by_name(weights_name),
                                                         weights_name);
    std::cout << "evaluated " << loaded.runs.size() << " runs\n";
    std::cout << "  " << files.report_csv.string() << "\n";
    std::cout << "  " << files.scores_csv.string() << "\n";
    std::cout << "  " << files.stats_json.string() << "\n";
    std::cout << "  " << files.curves_csv.string() << "\n";
    for (const auto& p : files.svgs) std::cout << "  " << p.string() << "\n";
    return 0;
}

int cmd_robustness(const echelon::engine::ExperimentConfig& cfg, const std::string& output,
                   const std::vector<double>& levels) {
    const auto cells = echelon::eval::robustness_sweep(cfg, levels);
    const std::string summary = echelon::report::robustness_csv(cells);
    echelon::report::write_text_file(fs::path(output) / "robustness.csv", summary);
    echelon::report::write_text_file(fs::path(output) / "robustness_detail.csv",
                                     echelon::report::robustness_detail_csv(cells));
    const auto table = echelon::report::parse_robustness_csv(summary);
    echelon::report::write_text_file(fs::path(output) / "robustness.svg",
                                     echelon::report::render_robustness_svg(table));
    std::cout << summary;
    std::cout << "robustness tables in " << output << "\n";
    return 0;
}

int cmd_report(const std::string& output) {
    bool any = false;
    const fs::path curves_path = fs::path(output) / "profit_curves.csv";
    if (fs::exists(curves_path)) {
        std::ifstream in(curves_path, std::ios::binary);
        std::stringstream buf;
        buf << in.rdbuf();
        const auto table = echelon::report::parse_profit_curves(buf.str());
        for (std::size_t layer = 1; layer < echelon::chain::kNumLayers; ++layer) {
            const fs::path p = fs::path(output) / ("profit_layer_" + std::to_string(layer) + ".svg");
            echelon::report::write_text_file(p, echelon::report::render_profit_svg(table, layer));
            std::cout << "  " << p.string() << "\n";
        }
        any = true;
    }
    const fs::path rob_path = fs::path(output) / "robustness.csv";
    if (fs::exists(rob_path)) {
        std::ifstream in(rob_path, std::ios::binary);
        std::stringstream buf;
        buf << in.rdbuf();
        const auto table = echelon::report::parse_robustness_csv(buf.str());
        const fs::path p = fs::path(output) / "robustness.svg";
        echelon::report::write_text_file(p, echelon::report::render_robustness_svg(table));
        std::cout << "  " << p.string() << "\n";
        any = true;
    }
    if (!any) {
        throw echelon::ConfigError("no profit_curves.csv or robustness.csv found in " + output);
    }
    return 0;
}

int cmd_demo(const std::string& output) {
    echelon::engine::ExperimentConfig base;
    base.horizon = 120;
    base.train_days = 40;
    base.seeds = {42};
    base.forecaster.n_neurons = 16;
    base.forecaster.train.epochs = 10;
    base.forecaster.train.batch = 4;
    base.forecaster.trees.n_trees = 20;
    base.forecaster.trees.max_depth = 3;

    const fs::path dir = fs::path(output) / "demo";
    const fs::path results_dir = dir / "results";
    for (const auto kind :
         {echelon::forecast::Kind::hybrid, echelon::forecast::Kind::gbt, echelon::forecast::Kind::sma}) {
        auto cfg = base;
        cfg.forecaster.kind = kind;
        const auto run = echelon::engine::run_single(cfg, base.seeds.front());
        echelon::results_io::save_run(results_dir, run);
        std::cout << run.model << ": manufacturer profit " << run.layers[3].cumulative_profit.back() << "\n";
    }
    const auto loaded = echelon::results_io::load_runs(results_dir);
    echelon::report::write_evaluation(loaded.runs, dir, echelon::eval::default_weights(), "default");
    std::cout << "demo artifacts in " << dir.string() << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multi-echelon supply-chain simulator with hybrid demand forecasting"};
    app.require_subcommand(1);

    std::string config_file;
    std::string output = default_output();
    std::string model;
    std::string weights = "default";
    std::string sampler = "random";
    std::string results_dir;
    std::vector<std::uint64_t> seeds;
    std::vector<double> levels{0.1, 0.5, 1.0};
    double noise = -1.0;
    std::size_t jobs = std::max(1u, std::thread::hardware_concurrency());
    std::size_t trials = 10;
    bool per_seed = false;
    int verbosity = 0;

    const auto add_common = [&](CLI::App* sc, bool with_config) {
        if (with_config) sc->add_option("-c,--config", config_file, "configuration file (JSON)");
        sc->add_option("-o,--output", output, "output directory (env ECHELON_OUTPUT overrides the default)")
            ->capture_default_str();
        sc->add_flag("-v,--verbose", verbosity, "more progress output");
    };

    auto* sim = app.add_subcommand("simulate", "Run the experiment over the configured seeds and write result files");
    add_common(sim, true);
    sim->add_option("--model", model, "forecaster kind: hybrid, gbt, sma");
    sim->add_option("--seeds", seeds, "comma-separated run seeds")->delimiter(',');
    sim->add_option("--noise", noise, "validation noise level");
    sim->add_option("--jobs", jobs, "parallel seed workers")->capture_default_str();

    auto* tun = app.add_subcommand("tune", "Search forecaster and policy hyperparameters");
    add_common(tun, true);
    tun->add_option("--model", model, "forecaster kind: hybrid, gbt, sma");
    tun->add_option("--seeds", seeds, "comma-separated run seeds")->delimiter(',');
    tun->add_option("--trials", trials, "number of trials")->capture_default_str();
    tun->add_option("--sampler", sampler, "trial sampler: random or tpe")->capture_default_str();
    tun->add_flag("--per-seed", per_seed, "repeat the search for every seed instead of the first only");

    auto* eva = app.add_subcommand("evaluate", "Score saved runs and write report tables, stats, and plots");
    add_common(eva, false);
    eva->add_option("--results", results_dir, "results directory (default <output>/results)");
    eva->add_option("--weights", weights, "weight scheme: default or custom")->capture_default_str();

    auto* rob = app.add_subcommand("robustness", "Re-run validation under noise levels and tabulate profits");
    add_common(rob, true);
    rob->add_option("--model", model, "forecaster kind: hybrid, gbt, sma");
    rob->add_option("--seeds", seeds, "comma-separated run seeds")->delimiter(',');
    rob->add_option("--levels", levels, "comma-separated noise levels")->delimiter(',')->capture_default_str();

    auto* rep = app.add_subcommand("report", "Re-render SVG plots from existing CSV tables");
    add_common(rep, false);

    auto* dem = app.add_subcommand("demo", "Run a small end-to-end experiment with all three models");
    add_common(dem, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (sim->parsed()) {
            auto cfg = load_config(config_file);
            apply_overrides(cfg, model, seeds, noise);
            cfg.validate();
            return cmd_simulate(cfg, output, jobs, verbosity);
        }
        if (tun->parsed()) {
            auto cfg = load_config(config_file);
            apply_overrides(cfg, model, seeds, -1.0);
            cfg.validate();
            return cmd_tune(cfg, output, trials, sampler, per_seed, verbosity);
        }
        if (eva->parsed()) return cmd_evaluate(output, results_dir, weights);
        if (rob->parsed()) {
            auto cfg = load_config(config_file);
            apply_overrides(cfg, model, seeds, -1.0);
            cfg.validate();
            return cmd_robustness(cfg, output, levels);
        }
        if (rep->parsed()) return cmd_report(output);
        if (dem->parsed()) return cmd_demo(output);
    } catch (const echelon::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
