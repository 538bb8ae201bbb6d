#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "echelon/errors.hpp"
#include "echelon/report.hpp"

using namespace echelon;
using Catch::Matchers::WithinAbs;

namespace {

engine::RunResult make_run(const std::string& model, std::uint64_t seed, std::size_t days = 8) {
    engine::RunResult r;
    r.model = model;
    r.seed = seed;
    r.train_days = 10;
    r.horizon = 10 + days;
    for (std::size_t layer = 1; layer < chain::kNumLayers; ++layer) {
        auto& s = r.layers[layer];
        const double base = static_cast<double>(seed % 10) * 10.0 + static_cast<double>(layer);
        double cum = 0.0;
        for (std::size_t t = 0; t < days; ++t) {
            const double tt = static_cast<double>(t);
            s.demand.push_back(40.0 + tt);
            s.sales.push_back(36.0 + tt);
            s.inventory_start.push_back(90.0 + base + tt);
            s.inventory_end.push_back(50.0 + base);
            s.orders.push_back(32.0 + base + 3.0 * tt);
            s.holding_cost.push_back(1.5 + 0.1 * base);
            s.shortage_cost.push_back(0.2);
            s.mae.push_back(t == 0 ? 0.0 : 2.0 + 0.05 * base);
            const double p = 100.0 + base + 5.0 * tt;
            s.profit.push_back(p);
            cum += p;
            s.cumulative_profit.push_back(cum);
            s.revenue.push_back(p + 50.0);
            s.purchase_cost.push_back(48.0);
            s.forecast_day1.push_back(41.0);
            s.forecast_weighted.push_back(40.5);
            s.forecast_smoothed.push_back(40.2);
        }
    }
    return r;
}

report::MetricRow metric_row(const std::string& model, std::uint64_t seed, std::size_t layer, double profit,
                             double turnover, double service, double cost, double mae) {
    return {model, seed, layer, eval::MetricSet{profit, turnover, service, cost, mae, 0.0, {}, {}}};
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

}  // namespace

TEST_CASE("metric collection walks runs then layers", "[report]") {
    const std::vector<engine::RunResult> runs{make_run("hybrid", 42), make_run("sma", 42)};
    const auto rows = report::collect_metrics(runs);
    REQUIRE(rows.size() == 6);
    REQUIRE(rows[0].model == "hybrid");
    REQUIRE(rows[0].layer == 1);
    REQUIRE(rows[2].layer == 3);
    REQUIRE(rows[3].model == "sma");
    REQUIRE_THROWS_AS(report::collect_metrics({}), DomainError);
}

TEST_CASE("per-run metric table has a fixed column order", "[report]") {
    const std::vector<engine::RunResult> runs{make_run("hybrid", 42)};
    const auto csv = report::report_csv(report::collect_metrics(runs));
    const auto rows = report::detail::parse_csv(csv);
    REQUIRE(rows.size() == 4);
    REQUIRE(rows[0] == std::vector<std::string>{"model", "seed", "layer", "cumulative_profit", "inventory_turnover",
                                                "service_level", "total_cost", "prediction_mae", "order_volatility",
                                                "mean_efficiency_ma"});
    REQUIRE(rows[1][0] == "hybrid");
    REQUIRE(rows[1][1] == "42");
    REQUIRE(rows[1][2] == "1");
    for (const auto& r : rows) REQUIRE(r.size() == 10);
}

TEST_CASE("normalization uses global extrema across all rows", "[report]") {
    std::vector<report::MetricRow> rows;
    rows.push_back(metric_row("a", 1, 1, 0.0, 1.0, 0.5, 3.0, 2.0));
    rows.push_back(metric_row("a", 1, 2, 5.0, 2.0, 0.7, 4.0, 3.0));
    rows.push_back(metric_row("b", 1, 1, 10.0, 3.0, 0.9, 5.0, 4.0));
    const auto norm = report::normalize_rows(rows);
    REQUIRE(norm[0].norm.profit == 0.0);
    REQUIRE(norm[1].norm.profit == 0.5);
    REQUIRE(norm[2].norm.profit == 1.0);
    REQUIRE(norm[0].norm.turnover == 0.0);
    REQUIRE(norm[2].norm.service == 1.0);
    REQUIRE(norm[1].norm.cost == 0.5);
    REQUIRE(norm[2].norm.mae == 1.0);
    REQUIRE_THROWS_AS(report::normalize_rows({}), DomainError);
}

TEST_CASE("extreme runs score the documented bounds", "[report]") {
    std::vector<report::MetricRow> rows;
    for (std::size_t layer = 1; layer <= 3; ++layer) {
        rows.push_back(metric_row("top", 1, layer, 10.0, 5.0, 1.0, 9.0, 7.0));
        rows.push_back(metric_row("bottom", 1, layer, 0.0, 0.0, 0.0, 0.0, 0.0));
    }
    const auto scores = report::score_runs(report::normalize_rows(rows), eval::default_weights());
    REQUIRE(scores.size() == 2);
    REQUIRE(scores[0].model == "top");
    REQUIRE(scores[0].layer_scores[1] == 0.7);
    REQUIRE(scores[0].total == 0.7);
    REQUIRE(scores[1].total == 0.0);

    const auto custom = report::score_runs(report::normalize_rows(rows), eval::custom_weights());
    REQUIRE(custom[0].total == 0.6);
}

TEST_CASE("model summary ranks by mean default score", "[report]") {
    std::vector<report::MetricRow> rows;
    for (std::size_t layer = 1; layer <= 3; ++layer) {
        rows.push_back(metric_row("weak", 7, layer, 0.0, 0.0, 0.0, 9.0, 7.0));
        rows.push_back(metric_row("strong", 7, layer, 10.0, 5.0, 1.0, 0.0, 0.0));
    }
    const auto summary = report::summarize_scores(rows);
    REQUIRE(summary.size() == 2);
    REQUIRE(summary[0].model == "strong");
    REQUIRE(summary[0].runs == 1);
    REQUIRE(summary[0].sd_default == 0.0);
    REQUIRE(summary[0].mean_default > summary[1].mean_default);

    const auto csv = report::scores_csv(summary);
    const auto parsed = report::detail::parse_csv(csv);
    REQUIRE(parsed[0] == std::vector<std::string>{"model", "runs", "mean_score_default", "sd_score_default",
                                                  "mean_score_custom", "sd_score_custom"});
    REQUIRE(parsed[1][0] == "strong");
    REQUIRE(parsed.size() == 3);
}

TEST_CASE("stats report degrades gracefully below two models", "[report]") {
    const std::vector<engine::RunResult> runs{make_run("solo", 42), make_run("solo", 43)};
    const auto j = report::stats_json(report::collect_metrics(runs), eval::default_weights(), "default");
    REQUIRE(j["weight_scheme"] == "default");
    REQUIRE(j["note"] == "statistical tests need at least two models");
    REQUIRE(j["pairwise"].empty());
    REQUIRE(j["anova"].is_null());
    REQUIRE(j["ranking"].size() == 1);
}

TEST_CASE("stats report needs two runs per model", "[report]") {
    const std::vector<engine::RunResult> runs{make_run("a", 42), make_run("b", 43)};
    const auto j = report::stats_json(report::collect_metrics(runs), eval::default_weights(), "default");
    REQUIRE(j["note"] == "statistical tests need at least two runs per model");
    REQUIRE(j["pairwise"].empty());
}

TEST_CASE("stats report emits pairwise tests and anova", "[report]") {
    const std::vector<engine::RunResult> runs{make_run("a", 42), make_run("a", 45), make_run("b", 43),
                                              make_run("b", 48)};
    const auto j = report::stats_json(report::collect_metrics(runs), eval::default_weights(), "default");
    REQUIRE(j["pairwise"].size() == 1);
    const auto& pair = j["pairwise"][0];
    REQUIRE(pair["models"].size() == 2);
    REQUIRE(pair.contains("t"));
    REQUIRE(pair.contains("p"));
    REQUIRE(pair["p_holm"] == pair["p"]);  // a single pair stays unadjusted
    REQUIRE(j["anova"].contains("f"));
    REQUIRE(j["ranking"].size() == 2);
    const double first = j["ranking"][0]["mean_total_score"].get<double>();
    const double second = j["ranking"][1]["mean_total_score"].get<double>();
    REQUIRE(first >= second);
}

TEST_CASE("identical models skip anova with a note", "[report]") {
    // seeds 42/52/62/72 share a metric fixture, so every total coincides
    const std::vector<engine::RunResult> runs{make_run("a", 42), make_run("a", 52), make_run("b", 62),
                                              make_run("b", 72)};
    const auto j = report::stats_json(report::collect_metrics(runs), eval::default_weights(), "default");
    REQUIRE(j["anova"].is_null());
    REQUIRE(j.contains("note"));
}

TEST_CASE("profit curves aggregate across seeds at common length", "[report]") {
    auto a = make_run("m", 1, 2);
    auto b = make_run("m", 11, 3);
    const auto csv = report::profit_curves_csv({a, b});
    const auto rows = report::detail::parse_csv(csv);
    REQUIRE(rows[0] == std::vector<std::string>{"model", "layer", "day", "mean_cumulative_profit",
                                                "sd_cumulative_profit"});
    // 3 layers x 2 common days
    REQUIRE(rows.size() == 1 + 6);
    REQUIRE(rows[1][0] == "m");
    REQUIRE(rows[1][1] == "1");
    REQUIRE(rows[1][2] == "0");
    const double day0_mean = std::stod(rows[1][3]);
    const double expect = 0.5 * (a.layers[1].cumulative_profit[0] + b.layers[1].cumulative_profit[0]);
    REQUIRE_THAT(day0_mean, WithinAbs(expect, 1e-6));

    const auto table = report::parse_profit_curves(csv);
    const auto* e = table.find("m", 1);
    REQUIRE(e != nullptr);
    REQUIRE(e->mean.size() == 2);
    REQUIRE_THAT(e->mean[0], WithinAbs(expect, 1e-6));
    REQUIRE(table.find("m", 3) != nullptr);
    REQUIRE(table.find("x", 1) == nullptr);
    REQUIRE_THROWS_AS(report::parse_profit_curves("model,layer\n"), ConfigError);
}

TEST_CASE("profit svg renders bands and labels", "[report]") {
    const auto csv = report::profit_curves_csv({make_run("hybrid", 1), make_run("hybrid", 11), make_run("sma", 2)});
    const auto table = report::parse_profit_curves(csv);
    const auto svg_text = report::render_profit_svg(table, 1);
    REQUIRE(svg_text.find("<svg") != std::string::npos);
    REQUIRE(svg_text.find("polyline") != std::string::npos);
    REQUIRE(svg_text.find("hybrid") != std::string::npos);
    REQUIRE(svg_text.find("retailer") != std::string::npos);
    REQUIRE(svg_text.find("\xc2\xb1") != std::string::npos);
    REQUIRE_THROWS_AS(report::render_profit_svg(table, 0), DomainError);

    report::CurveTable sparse;
    sparse.entries.push_back({"m", 1, {1.0, 2.0}, {0.0, 0.0}});
    REQUIRE_THROWS_AS(report::render_profit_svg(sparse, 2), DomainError);
}

TEST_CASE("robustness tables order levels and average seeds", "[report]") {
    std::vector<eval::RobustnessCell> cells;
    for (std::uint64_t seed : {42u, 43u}) {
        for (double lv : {0.5, 0.0}) {
            eval::RobustnessCell c;
            c.seed = seed;
            c.level = lv;
            c.layer_profit = {0.0, 100.0 + lv * 10.0 + static_cast<double>(seed - 42), 200.0, 300.0};
            c.total = c.layer_profit[1] + c.layer_profit[2] + c.layer_profit[3];
            cells.push_back(c);
        }
    }

    const auto detail_csv = report::robustness_detail_csv(cells);
    const auto detail_rows = report::detail::parse_csv(detail_csv);
    REQUIRE(detail_rows[0] == std::vector<std::string>{"level", "seed", "profit_layer_1", "profit_layer_2",
                                                       "profit_layer_3", "total"});
    REQUIRE(detail_rows.size() == 5);
    REQUIRE(detail_rows[1][1] == "42");

    const auto csv = report::robustness_csv(cells);
    const auto rows = report::detail::parse_csv(csv);
    REQUIRE(rows.size() == 3);
    REQUIRE(rows[1][0] == "0");  // baseline row first
    REQUIRE_THAT(std::stod(rows[1][1]), WithinAbs(100.5, 1e-9));
    REQUIRE_THAT(std::stod(rows[2][1]), WithinAbs(105.5, 1e-9));

    const auto table = report::parse_robustness_csv(csv);
    REQUIRE(table.levels == std::vector<double>{0.0, 0.5});
    REQUIRE_THAT(table.layer_profit[1][1], WithinAbs(105.5, 1e-9));
    REQUIRE(table.total.size() == 2);

    const auto svg_text = report::render_robustness_svg(table);
    REQUIRE(svg_text.find("<svg") != std::string::npos);
    REQUIRE(svg_text.find("level 0.5") != std::string::npos);
    REQUIRE(svg_text.find("total") != std::string::npos);

    REQUIRE_THROWS_AS(report::robustness_csv({}), DomainError);
    REQUIRE_THROWS_AS(report::parse_robustness_csv("level\n"), ConfigError);
}

TEST_CASE("evaluation bundle writes every artifact deterministically", "[report]") {
    const auto dir = std::filesystem::temp_directory_path() / "echelon_report_test";
    std::filesystem::remove_all(dir);
    const std::vector<engine::RunResult> runs{make_run("hybrid", 42), make_run("hybrid", 43), make_run("sma", 42),
                                              make_run("sma", 43)};
    const auto files = report::write_evaluation(runs, dir, eval::default_weights(), "default");
    REQUIRE(std::filesystem::exists(files.report_csv));
    REQUIRE(std::filesystem::exists(files.scores_csv));
    REQUIRE(std::filesystem::exists(files.stats_json));
    REQUIRE(std::filesystem::exists(files.curves_csv));
    REQUIRE(files.svgs.size() == 3);
    for (const auto& p : files.svgs) REQUIRE(std::filesystem::exists(p));

    const auto parsed = nlohmann::json::parse(slurp(files.stats_json));
    REQUIRE(parsed["weight_scheme"] == "default");

    const auto first = slurp(files.report_csv) + slurp(files.scores_csv) + slurp(files.stats_json);
    report::write_evaluation(runs, dir, eval::default_weights(), "default");
    const auto second = slurp(files.report_csv) + slurp(files.scores_csv) + slurp(files.stats_json);
    REQUIRE(first == second);
    std::filesystem::remove_all(dir);
}
