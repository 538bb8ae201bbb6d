#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "echelon/engine.hpp"
#include "echelon/errors.hpp"
#include "echelon/features.hpp"
#include "echelon/forecast.hpp"
#include "echelon/mathutil.hpp"
#include "echelon/rng.hpp"

namespace echelon::eval {

// ===== Metrics =====

struct MetricSet {
    double cumulative_profit = 0.0;
    double inventory_turnover = 0.0;
    double service_level = 0.0;
    double total_cost = 0.0;
    double prediction_mae = 0.0;
    double order_volatility = 0.0;
    std::vector<double> efficiency;
    std::vector<double> efficiency_ma;  // entry j covers days j..j+6
};

struct EfficiencyResult {
    std::vector<double> series;
    std::vector<double> ma;
};

// e(t) = profit / theoretical profit (demand x margin); zero denominator
// maps to 0. The moving average starts once 7 days exist.
inline EfficiencyResult efficiency(const std::vector<double>& profit_series, const std::vector<double>& demand_series,
                                   std::size_t layer, const chain::ChainConfig& cfg) {
    if (profit_series.size() != demand_series.size()) throw DomainError("efficiency series length mismatch");
    EfficiencyResult out;
    out.series.reserve(profit_series.size());
    for (std::size_t t = 0; t < profit_series.size(); ++t) {
        const double denom = chain::theoretical_profit(demand_series[t], layer, cfg);
        out.series.push_back(denom == 0.0 ? 0.0 : profit_series[t] / denom);
    }
    if (out.series.size() >= 7) {
        out.ma.reserve(out.series.size() - 6);
        double window_sum = 0.0;
        for (std::size_t t = 0; t < out.series.size(); ++t) {
            window_sum += out.series[t];
            if (t >= 7) window_sum -= out.series[t - 7];
            if (t >= 6) out.ma.push_back(window_sum / 7.0);
        }
    }
    return out;
}

inline MetricSet compute_metrics(const engine::RunResult& run, std::size_t layer) {
    if (layer < 1 || layer >= chain::kNumLayers) throw DomainError("metrics defined for layers 1..3");
    const engine::LayerSeries& s = run.layers[layer];
    const std::size_t n = s.profit.size();
    if (n == 0 || s.sales.size() != n || s.demand.size() != n || s.inventory_start.size() != n ||
        s.inventory_end.size() != n || s.holding_cost.size() != n || s.shortage_cost.size() != n ||
        s.orders.size() != n || s.mae.size() != n || s.cumulative_profit.size() != n) {
        throw DomainError("run result is missing series for layer " + std::to_string(layer));
    }

    MetricSet m;
    m.cumulative_profit = s.cumulative_profit.back();

    double turnover_sum = 0.0, service_sum = 0.0, cost_sum = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
        const double avg_inv = 0.5 * (s.inventory_start[t] + s.inventory_end[t]);
        turnover_sum += s.sales[t] / std::max(1e-9, avg_inv);
        service_sum += s.demand[t] == 0.0 ? 1.0 : s.sales[t] / s.demand[t];
        cost_sum += s.holding_cost[t] + s.shortage_cost[t];
    }
    m.inventory_turnover = turnover_sum / static_cast<double>(n);
    m.service_level = service_sum / static_cast<double>(n);
    m.total_cost = cost_sum;

    double mae_sum = 0.0;
    std::size_t mae_count = 0;
    for (double v : s.mae) {
        if (v != 0.0) {
            mae_sum += v;
            ++mae_count;
        }
    }
    m.prediction_mae = mae_count == 0 ? 0.0 : mae_sum / static_cast<double>(mae_count);
    m.order_volatility = math::population_sd(s.orders);

    const EfficiencyResult eff = efficiency(s.profit, s.demand, layer, run.chain_cfg);
    m.efficiency = eff.series;
    m.efficiency_ma = eff.ma;
    return m;
}

// ===== Normalization and scoring =====

inline std::vector<double> minmax_normalize(const std::vector<double>& values) {
    if (values.empty()) throw DomainError("cannot normalize an empty set");
    const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
    const double lo = *lo_it, hi = *hi_it;
    std::vector<double> out(values.size(), 0.0);
    if (hi == lo) return out;
    for (std::size_t i = 0; i < values.size(); ++i) out[i] = (values[i] - lo) / (hi - lo);
    return out;
}

struct ScoreWeights {
    double profit = 0.5;
    double turnover = 0.2;
    double service = 0.2;
    double cost = -0.1;
    double mae = -0.1;
};

inline ScoreWeights default_weights() { return ScoreWeights{0.5, 0.2, 0.2, -0.1, -0.1}; }
inline ScoreWeights custom_weights() { return ScoreWeights{0.4, 0.1, 0.3, -0.1, -0.1}; }

inline constexpr std::array<double, chain::kNumLayers> kLayerWeights{0.0, 0.4, 0.3, 0.3};

struct NormalizedMetrics {
    double profit = 0.0;
    double turnover = 0.0;
    double service = 0.0;
    double cost = 0.0;
    double mae = 0.0;
};

// Cost and MAE keep their negative weights on the normalized value itself.
inline double layer_score(const NormalizedMetrics& m, const ScoreWeights& w) {
    return (w.profit * m.profit + w.turnover * m.turnover) + (w.cost * m.cost + w.mae * m.mae) +
           w.service * m.service;
}

// Affine form anchored at layer 3: the layer weights sum to one, so equal
// layer scores pass through exactly instead of picking up rounding.
inline double total_score(const std::array<double, chain::kNumLayers>& layer_scores) {
    return layer_scores[3] + (kLayerWeights[1] * (layer_scores[1] - layer_scores[3]) +
                              kLayerWeights[2] * (layer_scores[2] - layer_scores[3]));
}

// ===== Statistical tests =====

struct TestResult {
    double statistic = 0.0;
    double p_value = 1.0;
};

// Welch's t with Welch-Satterthwaite degrees of freedom, two-sided.
inline TestResult welch_ttest(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() < 2 || b.size() < 2) throw DomainError("welch_ttest needs at least 2 values per sample");
    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    const double ma = math::mean(a), mb = math::mean(b);
    const double va = math::sample_variance(a), vb = math::sample_variance(b);
    const double se2 = va / na + vb / nb;
    if (se2 == 0.0) {
        if (ma == mb) return {0.0, 1.0};
        return {ma > mb ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity(), 0.0};
    }
    const double t = (ma - mb) / std::sqrt(se2);
    const double df = se2 * se2 / ((va / na) * (va / na) / (na - 1.0) + (vb / nb) * (vb / nb) / (nb - 1.0));
    return {t, math::t_two_sided_p(t, df)};
}

inline TestResult anova(const std::vector<std::vector<double>>& groups) {
    if (groups.size() < 2) throw DomainError("anova needs at least 2 groups");
    std::size_t total_n = 0;
    double grand_sum = 0.0;
    bool all_identical = true;
    const double first = groups.front().empty() ? 0.0 : groups.front().front();
    for (const auto& g : groups) {
        if (g.size() < 2) throw DomainError("anova groups need at least 2 values each");
        total_n += g.size();
        for (double v : g) {
            grand_sum += v;
            if (v != first) all_identical = false;
        }
    }
    if (all_identical) throw DomainError("anova undefined for identical values");

    const double grand_mean = grand_sum / static_cast<double>(total_n);
    double ssb = 0.0, ssw = 0.0;
    for (const auto& g : groups) {
        const double m = math::mean(g);
        ssb += static_cast<double>(g.size()) * (m - grand_mean) * (m - grand_mean);
        for (double v : g) ssw += (v - m) * (v - m);
    }
    const double d1 = static_cast<double>(groups.size() - 1);
    const double d2 = static_cast<double>(total_n - groups.size());
    if (ssw == 0.0) return {std::numeric_limits<double>::infinity(), 0.0};
    const double f = (ssb / d1) / (ssw / d2);
    return {f, math::f_sf(f, d1, d2)};
}

// Holm step-down adjustment; returns adjusted p-values in input order.
inline std::vector<double> holm_adjust(const std::vector<double>& p) {
    const std::size_t m = p.size();
    std::vector<std::size_t> order(m);
    for (std::size_t i = 0; i < m; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return p[a] < p[b]; });
    std::vector<double> adj(m, 0.0);
    double running = 0.0;
    for (std::size_t rank = 0; rank < m; ++rank) {
        const double scaled = static_cast<double>(m - rank) * p[order[rank]];
        running = std::max(running, std::min(1.0, scaled));
        adj[order[rank]] = running;
    }
    return adj;
}

inline double bullwhip_ratio(const std::vector<double>& orders, const std::vector<double>& demand0) {
    const double dv = math::population_variance(demand0);
    if (dv == 0.0) throw DomainError("bullwhip ratio undefined for constant demand");
    return math::population_variance(orders) / dv;
}

// ===== Permutation feature importance =====

// Mean MSE increase over 5 seeded shuffles when one feature's values are
// permuted across windows. SMA ignores the window, so its scores are zero.
inline std::array<double, features::kFeatureDim> permutation_importance(const forecast::Forecaster& model,
                                                                        const features::WindowDataset& ds,
                                                                        std::uint64_t seed,
                                                                        std::size_t n_shuffles = 5) {
    std::array<double, features::kFeatureDim> scores{};
    if (model.kind == forecast::Kind::sma) return scores;
    if (ds.size() == 0) throw DomainError("permutation importance needs windows");

    const std::vector<double> no_demand;
    const auto dataset_mse = [&](const std::vector<features::Window>& inputs) {
        double total = 0.0;
        for (std::size_t i = 0; i < inputs.size(); ++i) {
            const features::Target pred = forecast::predict(model, inputs[i], no_demand);
            double mse = 0.0;
            for (std::size_t k = 0; k < features::kForecastHorizon; ++k) {
                const double d = pred[k] - ds.targets[i][k];
                mse += d * d;
            }
            total += mse / static_cast<double>(features::kForecastHorizon);
        }
        return total / static_cast<double>(inputs.size());
    };

    const double baseline = dataset_mse(ds.inputs);
    rng::Generator gen(rng::derive_seed(seed, rng::Channel::shuffle));
    std::vector<std::size_t> perm(ds.size());
    for (std::size_t f = 0; f < features::kFeatureDim; ++f) {
        double sum = 0.0;
        for (std::size_t s = 0; s < n_shuffles; ++s) {
            for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
            gen.shuffle(perm);
            std::vector<features::Window> permuted = ds.inputs;
            for (std::size_t i = 0; i < permuted.size(); ++i) {
                for (std::size_t t = 0; t < features::kWindowLength; ++t) {
                    permuted[i][t][f] = ds.inputs[perm[i]][t][f];
                }
            }
            sum += dataset_mse(permuted) - baseline;
        }
        scores[f] = sum / static_cast<double>(n_shuffles);
    }
    return scores;
}

// ===== Robustness sweep =====

struct RobustnessCell {
    std::uint64_t seed = 0;
    double level = 0.0;
    std::array<double, chain::kNumLayers> layer_profit{};
    double total = 0.0;
};

// Clean training per seed, then one validation re-run per noise level.
// Level 0 always leads the sweep as the baseline row.
inline std::vector<RobustnessCell> robustness_sweep(const engine::ExperimentConfig& config,
                                                    std::vector<double> levels = {0.1, 0.5, 1.0}) {
    config.validate();
    for (double lv : levels) {
        if (lv < 0.0) throw ConfigError("noise levels must be non-negative");
    }
    if (std::find(levels.begin(), levels.end(), 0.0) == levels.end()) levels.insert(levels.begin(), 0.0);

    std::vector<RobustnessCell> cells;
    for (std::uint64_t seed : config.seeds) {
        engine::ExperimentConfig train_cfg = config;
        train_cfg.noise_level = 0.0;
        const engine::FittedState fitted = engine::run_training_phase(train_cfg, seed);
        for (double lv : levels) {
            engine::ExperimentConfig run_cfg = config;
            run_cfg.noise_level = lv;
            const engine::RunResult r = engine::run_validation_phase(run_cfg, fitted, seed);
            RobustnessCell cell;
            cell.seed = seed;
            cell.level = lv;
            for (std::size_t layer = 1; layer < chain::kNumLayers; ++layer) {
                cell.layer_profit[layer] = r.layers[layer].cumulative_profit.back();
                cell.total += cell.layer_profit[layer];
            }
            cells.push_back(cell);
        }
    }
    return cells;
}

}  // namespace echelon::eval
