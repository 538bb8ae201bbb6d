#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "echelon/engine.hpp"
#include "echelon/errors.hpp"
#include "echelon/eval.hpp"
#include "echelon/mathutil.hpp"
#include "echelon/svg.hpp"

namespace echelon::report {

using json = nlohmann::json;

namespace detail {

inline std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

inline std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, sep)) out.push_back(field);
    return out;
}

inline std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        rows.push_back(split(line, ','));
    }
    return rows;
}

inline double sd_or_zero(const std::vector<double>& v) {
    return v.size() < 2 ? 0.0 : std::sqrt(math::sample_variance(v));
}

// Model names in first-appearance order keeps every table deterministic.
inline std::vector<std::string> model_order(const std::vector<engine::RunResult>& runs) {
    std::vector<std::string> order;
    for (const auto& r : runs) {
        if (std::find(order.begin(), order.end(), r.model) == order.end()) order.push_back(r.model);
    }
    return order;
}

}  // namespace detail

inline void write_text_file(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot open " + path.string() + " for writing");
    out << content;
    if (!out) throw ConfigError("failed writing " + path.string());
}

// ===== Metric table =====

struct MetricRow {
    std::string model;
    std::uint64_t seed = 0;
    std::size_t layer = 1;
    eval::MetricSet metrics;
};

inline std::vector<MetricRow> collect_metrics(const std::vector<engine::RunResult>& runs) {
    if (runs.empty()) throw DomainError("no runs to evaluate");
    std::vector<MetricRow> rows;
    rows.reserve(runs.size() * 3);
    for (const auto& r : runs) {
        for (std::size_t layer = 1; layer < chain::kNumLayers; ++layer) {
            rows.push_back({r.model, r.seed, layer, eval::compute_metrics(r, layer)});
        }
    }
    return rows;
}

inline std::string report_csv(const std::vector<MetricRow>& rows) {
    std::ostringstream out;
    out << "model,seed,layer,cumulative_profit,inventory_turnover,service_level,total_cost,"
           "prediction_mae,order_volatility,mean_efficiency_ma\n";
    for (const auto& r : rows) {
        const auto& m = r.metrics;
        const double eff = m.efficiency_ma.empty() ? 0.0 : math::mean(m.efficiency_ma);
        out << r.model << "," << r.seed << "," << r.layer << "," << detail::num(m.cumulative_profit) << ","
            << detail::num(m.inventory_turnover) << "," << detail::num(m.service_level) << ","
            << detail::num(m.total_cost) << "," << detail::num(m.prediction_mae) << ","
            << detail::num(m.order_volatility) << "," << detail::num(eff) << "\n";
    }
    return out.str();
}

// ===== Normalization and per-run scores =====

struct NormalizedRow {
    std::string model;
    std::uint64_t seed = 0;
    std::size_t layer = 1;
    eval::NormalizedMetrics norm;
};

// Extrema are global across every model, run, and layer in the table.
inline std::vector<NormalizedRow> normalize_rows(const std::vector<MetricRow>& rows) {
    if (rows.empty()) throw DomainError("no metric rows to normalize");
    const std::size_t n = rows.size();
    std::vector<double> profit(n), turnover(n), service(n), cost(n), mae(n);
    for (std::size_t i = 0; i < n; ++i) {
        profit[i] = rows[i].metrics.cumulative_profit;
        turnover[i] = rows[i].metrics.inventory_turnover;
        service[i] = rows[i].metrics.service_level;
        cost[i] = rows[i].metrics.total_cost;
        mae[i] = rows[i].metrics.prediction_mae;
    }
    profit = eval::minmax_normalize(profit);
    turnover = eval::minmax_normalize(turnover);
    service = eval::minmax_normalize(service);
    cost = eval::minmax_normalize(cost);
    mae = eval::minmax_normalize(mae);

    std::vector<NormalizedRow> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        out[i].model = rows[i].model;
        out[i].seed = rows[i].seed;
        out[i].layer = rows[i].layer;
        out[i].norm = {profit[i], turnover[i], service[i], cost[i], mae[i]};
    }
    return out;
}

struct RunScore {
    std::string model;
    std::uint64_t seed = 0;
    std::array<double, chain::kNumLayers> layer_scores{};
    double total = 0.0;
};

inline std::vector<RunScore> score_runs(const std::vector<NormalizedRow>& rows, const eval::ScoreWeights& weights) {
    std::vector<RunScore> scores;
    for (const auto& r : rows) {
        auto it = std::find_if(scores.begin(), scores.end(),
                               [&](const RunScore& s) { return s.model == r.model && s.seed == r.seed; });
        if (it == scores.end()) {
            scores.push_back({r.model, r.seed, {}, 0.0});
            it = std::prev(scores.end());
        }
        it->layer_scores[r.layer] = eval::layer_score(r.norm, weights);
    }
    for (auto& s : scores) s.total = eval::total_score(s.layer_scores);
    return scores;
}

// ===== Per-model summary and ranking =====

struct ModelSummary {
    std::string model;
    std::size_t runs = 0;
    double mean_default = 0.0, sd_default = 0.0;
    double mean_custom = 0.0, sd_custom = 0.0;
};

inline std::vector<ModelSummary> summarize_scores(const std::vector<MetricRow>& rows) {
    const auto normalized = normalize_rows(rows);
    const auto def = score_runs(normalized, eval::default_weights());
    const auto cus = score_runs(normalized, eval::custom_weights());

    std::vector<std::string> order;
    for (const auto& s : def) {
        if (std::find(order.begin(), order.end(), s.model) == order.end()) order.push_back(s.model);
    }
    std::vector<ModelSummary> out;
    for (const auto& name : order) {
        std::vector<double> d, c;
        for (const auto& s : def) {
            if (s.model == name) d.push_back(s.total);
        }
        for (const auto& s : cus) {
            if (s.model == name) c.push_back(s.total);
        }
        ModelSummary ms;
        ms.model = name;
        ms.runs = d.size();
        ms.mean_default = math::mean(d);
        ms.sd_default = detail::sd_or_zero(d);
        ms.mean_custom = math::mean(c);
        ms.sd_custom = detail::sd_or_zero(c);
        out.push_back(ms);
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const ModelSummary& a, const ModelSummary& b) { return a.mean_default > b.mean_default; });
    return out;
}

inline std::string scores_csv(const std::vector<ModelSummary>& summary) {
    std::ostringstream out;
    out << "model,runs,mean_score_default,sd_score_default,mean_score_custom,sd_score_custom\n";
    for (const auto& s : summary) {
        out << s.model << "," << s.runs << "," << detail::num(s.mean_default) << "," << detail::num(s.sd_default)
            << "," << detail::num(s.mean_custom) << "," << detail::num(s.sd_custom) << "\n";
    }
    return out.str();
}

// ===== Statistical report =====

// Pairwise Welch tests with Holm correction plus one-way ANOVA over
// per-run total scores under the selected weight scheme.
inline json stats_json(const std::vector<MetricRow>& rows, const eval::ScoreWeights& weights,
                       const std::string& scheme_name) {
    const auto scores = score_runs(normalize_rows(rows), weights);

    std::vector<std::string> order;
    for (const auto& s : scores) {
        if (std::find(order.begin(), order.end(), s.model) == order.end()) order.push_back(s.model);
    }
    std::map<std::string, std::vector<double>> totals;
    for (const auto& s : scores) totals[s.model].push_back(s.total);

    json ranking = json::array();
    {
        std::vector<std::pair<std::string, double>> means;
        for (const auto& name : order) means.emplace_back(name, math::mean(totals[name]));
        std::stable_sort(means.begin(), means.end(),
                         [](const auto& a, const auto& b) { return a.second > b.second; });
        for (const auto& [name, m] : means) ranking.push_back({{"model", name}, {"mean_total_score", m}});
    }

    json out;
    out["weight_scheme"] = scheme_name;
    out["ranking"] = ranking;
    out["pairwise"] = json::array();
    out["anova"] = nullptr;

    if (order.size() < 2) {
        out["note"] = "statistical tests need at least two models";
        return out;
    }
    bool enough = true;
    for (const auto& name : order) {
        if (totals[name].size() < 2) enough = false;
    }
    if (!enough) {
        out["note"] = "statistical tests need at least two runs per model";
        return out;
    }

    std::vector<json> pairs;
    std::vector<double> raw_p;
    for (std::size_t i = 0; i < order.size(); ++i) {
        for (std::size_t j = i + 1; j < order.size(); ++j) {
            const eval::TestResult t = eval::welch_ttest(totals[order[i]], totals[order[j]]);
            pairs.push_back({{"models", {order[i], order[j]}}, {"t", t.statistic}, {"p", t.p_value}});
            raw_p.push_back(t.p_value);
        }
    }
    const std::vector<double> adjusted = eval::holm_adjust(raw_p);
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        pairs[i]["p_holm"] = adjusted[i];
        out["pairwise"].push_back(pairs[i]);
    }

    try {
        std::vector<std::vector<double>> groups;
        for (const auto& name : order) groups.push_back(totals[name]);
        const eval::TestResult f = eval::anova(groups);
        out["anova"] = {{"f", f.statistic}, {"p", f.p_value}};
    } catch (const DomainError& e) {
        out["anova"] = nullptr;
        out["note"] = std::string("anova skipped: ") + e.what();
    }
    return out;
}

// ===== Profit trajectories =====

// Per model and layer, mean and sd of the cumulative profit series across
// seeds; day is the offset into the validation span.
inline std::string profit_curves_csv(const std::vector<engine::RunResult>& runs) {
    if (runs.empty()) throw DomainError("no runs for profit curves");
    std::ostringstream out;
    out << "model,layer,day,mean_cumulative_profit,sd_cumulative_profit\n";
    for (const auto& name : detail::model_order(runs)) {
        std::vector<const engine::RunResult*> group;
        for (const auto& r : runs) {
            if (r.model == name) group.push_back(&r);
        }
        for (std::size_t layer = 1; layer < chain::kNumLayers; ++layer) {
            std::size_t days = group.front()->layers[layer].cumulative_profit.size();
            for (const auto* r : group) days = std::min(days, r->layers[layer].cumulative_profit.size());
            for (std::size_t t = 0; t < days; ++t) {
                std::vector<double> vals;
                vals.reserve(group.size());
                for (const auto* r : group) vals.push_back(r->layers[layer].cumulative_profit[t]);
                out << name << "," << layer << "," << t << "," << detail::num(math::mean(vals)) << ","
                    << detail::num(detail::sd_or_zero(vals)) << "\n";
            }
        }
    }
    return out.str();
}

struct CurveTable {
    struct Entry {
        std::string model;
        std::size_t layer = 1;
        std::vector<double> mean, sd;
    };
    std::vector<Entry> entries;

    const Entry* find(const std::string& model, std::size_t layer) const {
        for (const auto& e : entries) {
            if (e.model == model && e.layer == layer) return &e;
        }
        return nullptr;
    }
};

inline CurveTable parse_profit_curves(const std::string& csv) {
    const auto rows = detail::parse_csv(csv);
    if (rows.size() < 2) throw ConfigError("profit curve table is empty");
    CurveTable table;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& r = rows[i];
        if (r.size() != 5) throw ConfigError("profit curve row " + std::to_string(i) + " needs 5 fields");
        const std::size_t layer = static_cast<std::size_t>(std::stoul(r[1]));
        CurveTable::Entry* e = nullptr;
        for (auto& cand : table.entries) {
            if (cand.model == r[0] && cand.layer == layer) e = &cand;
        }
        if (e == nullptr) {
            table.entries.push_back({r[0], layer, {}, {}});
            e = &table.entries.back();
        }
        e->mean.push_back(std::stod(r[3]));
        e->sd.push_back(std::stod(r[4]));
    }
    return table;
}

inline std::string render_profit_svg(const CurveTable& table, std::size_t layer) {
    static const char* kLayerNames[chain::kNumLayers] = {"consumer", "retailer", "distributor", "manufacturer"};
    if (layer < 1 || layer >= chain::kNumLayers) throw DomainError("profit plot covers layers 1..3");
    svg::LinePlot plot("Cumulative profit, " + std::string(kLayerNames[layer]) + " (mean \xc2\xb1 sd)",
                       "validation day", "cumulative profit");
    bool any = false;
    for (const auto& e : table.entries) {
        if (e.layer != layer) continue;
        svg::LineSeries s;
        s.label = e.model;
        s.y = e.mean;
        s.band_lo.reserve(e.mean.size());
        s.band_hi.reserve(e.mean.size());
        for (std::size_t i = 0; i < e.mean.size(); ++i) {
            s.band_lo.push_back(e.mean[i] - e.sd[i]);
            s.band_hi.push_back(e.mean[i] + e.sd[i]);
        }
        plot.add(std::move(s));
        any = true;
    }
    if (!any) throw DomainError("no curves for layer " + std::to_string(layer));
    return plot.render();
}

// ===== Robustness tables =====

inline std::string robustness_detail_csv(const std::vector<eval::RobustnessCell>& cells) {
    std::ostringstream out;
    out << "level,seed,profit_layer_1,profit_layer_2,profit_layer_3,total\n";
    for (const auto& c : cells) {
        out << detail::num(c.level) << "," << c.seed << "," << detail::num(c.layer_profit[1]) << ","
            << detail::num(c.layer_profit[2]) << "," << detail::num(c.layer_profit[3]) << ","
            << detail::num(c.total) << "\n";
    }
    return out.str();
}

// One row per noise level, profits averaged across seeds; the level-0
// baseline row comes first.
inline std::string robustness_csv(const std::vector<eval::RobustnessCell>& cells) {
    if (cells.empty()) throw DomainError("no robustness cells");
    std::vector<double> levels;
    for (const auto& c : cells) {
        if (std::find(levels.begin(), levels.end(), c.level) == levels.end()) levels.push_back(c.level);
    }
    std::sort(levels.begin(), levels.end());

    std::ostringstream out;
    out << "level,profit_layer_1,profit_layer_2,profit_layer_3,total\n";
    for (double lv : levels) {
        std::array<std::vector<double>, chain::kNumLayers> per_layer;
        std::vector<double> totals;
        for (const auto& c : cells) {
            if (c.level != lv) continue;
            for (std::size_t layer = 1; layer < chain::kNumLayers; ++layer) {
                per_layer[layer].push_back(c.layer_profit[layer]);
            }
            totals.push_back(c.total);
        }
        out << detail::num(lv) << "," << detail::num(math::mean(per_layer[1])) << ","
            << detail::num(math::mean(per_layer[2])) << "," << detail::num(math::mean(per_layer[3])) << ","
            << detail::num(math::mean(totals)) << "\n";
    }
    return out.str();
}

struct RobustnessTable {
    std::vector<double> levels;
    std::vector<std::array<double, chain::kNumLayers>> layer_profit;  // per level
    std::vector<double> total;
};

inline RobustnessTable parse_robustness_csv(const std::string& csv) {
    const auto rows = detail::parse_csv(csv);
    if (rows.size() < 2) throw ConfigError("robustness table is empty");
    RobustnessTable table;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& r = rows[i];
        if (r.size() != 5) throw ConfigError("robustness row " + std::to_string(i) + " needs 5 fields");
        table.levels.push_back(std::stod(r[0]));
        std::array<double, chain::kNumLayers> lp{};
        lp[1] = std::stod(r[1]);
        lp[2] = std::stod(r[2]);
        lp[3] = std::stod(r[3]);
        table.layer_profit.push_back(lp);
        table.total.push_back(std::stod(r[4]));
    }
    return table;
}

inline std::string render_robustness_svg(const RobustnessTable& table) {
    if (table.levels.empty()) throw DomainError("no robustness rows to plot");
    svg::BarChart chart("Cumulative profit by noise level", "cumulative profit");
    std::vector<std::string> cats;
    for (double lv : table.levels) cats.push_back("level " + detail::num(lv));
    chart.set_categories(cats);
    for (std::size_t layer = 1; layer < chain::kNumLayers; ++layer) {
        std::vector<double> vals;
        for (const auto& lp : table.layer_profit) vals.push_back(lp[layer]);
        chart.add("layer " + std::to_string(layer), vals);
    }
    chart.add("total", table.total);
    return chart.render();
}

// ===== Full evaluation bundle =====

struct EvaluationFiles {
    std::filesystem::path report_csv;
    std::filesystem::path scores_csv;
    std::filesystem::path stats_json;
    std::filesystem::path curves_csv;
    std::vector<std::filesystem::path> svgs;
};

inline EvaluationFiles write_evaluation(const std::vector<engine::RunResult>& runs, const std::filesystem::path& dir,
                                        const eval::ScoreWeights& weights, const std::string& scheme_name) {
    const auto rows = collect_metrics(runs);

    EvaluationFiles files;
    files.report_csv = dir / "report.csv";
    write_text_file(files.report_csv, report_csv(rows));
    files.scores_csv = dir / "scores.csv";
    write_text_file(files.scores_csv, scores_csv(summarize_scores(rows)));
    files.stats_json = dir / "stats.json";
    write_text_file(files.stats_json, stats_json(rows, weights, scheme_name).dump(2) + "\n");
    files.curves_csv = dir / "profit_curves.csv";
    const std::string curves = profit_curves_csv(runs);
    write_text_file(files.curves_csv, curves);

    const CurveTable table = parse_profit_curves(curves);
    for (std::size_t layer = 1; layer < chain::kNumLayers; ++layer) {
        const auto path = dir / ("profit_layer_" + std::to_string(layer) + ".svg");
        write_text_file(path, render_profit_svg(table, layer));
        files.svgs.push_back(path);
    }
    return files;
}

}  // namespace echelon::report
