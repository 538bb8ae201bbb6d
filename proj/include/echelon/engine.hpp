#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "echelon/chain.hpp"
#include "echelon/demand.hpp"
#include "echelon/errors.hpp"
#include "echelon/features.hpp"
#include "echelon/forecast.hpp"
#include "echelon/mathutil.hpp"
#include "echelon/policy.hpp"
#include "echelon/rng.hpp"

namespace echelon::engine {

// ===== Configuration =====

struct ExperimentConfig {
    std::size_t horizon = 1095;
    std::size_t train_days = 219;
    std::vector<std::uint64_t> seeds = {42, 43, 44, 45, 46, 47, 48, 49, 50, 51};
    demand::DemandConfig demand_cfg;
    chain::ChainConfig chain_cfg;
    policy::PolicyParams policy_params;
    forecast::ForecasterSpec forecaster;
    double noise_level = 0.0;

    void validate() const {
        demand_cfg.validate();
        chain_cfg.validate();
        policy_params.validate();
        forecaster.validate();
        if (horizon == 0) throw ConfigError("horizon must be positive");
        if (train_days >= horizon) throw ConfigError("train_days must be below horizon");
        if (train_days < features::kWindowLength + features::kForecastHorizon) {
            throw ConfigError("train_days too short to form one training window");
        }
        if (train_days < policy_params.demand_lookback + 1) {
            throw ConfigError("train_days must cover the policy lookback");
        }
        if (seeds.empty()) throw ConfigError("at least one seed is required");
        if (noise_level < 0.0) throw ConfigError("noise_level must be non-negative");
    }

    features::FeatureParams feature_params() const {
        features::FeatureParams fp;
        fp.seasonal_period = demand_cfg.annual_period;
        fp.horizon_days = static_cast<double>(horizon);
        return fp;
    }
};

// ===== Results =====

struct LayerSeries {
    std::vector<double> demand, orders, sales, inventory_start, inventory_end, revenue, purchase_cost, holding_cost,
        shortage_cost, profit, cumulative_profit, forecast_day1, forecast_weighted, forecast_smoothed, mae;
};

struct RunResult {
    std::string model;
    std::uint64_t seed = 0;
    double noise_level = 0.0;
    std::size_t train_days = 0;
    std::size_t horizon = 0;
    chain::ChainConfig chain_cfg;  // echoed so metrics need no side channel
    std::array<LayerSeries, chain::kNumLayers> layers;

    std::size_t validation_days() const { return horizon - train_days; }
};

// ===== Training phase =====

struct LayerArtifacts {
    features::SeriesHistory history;
    std::vector<features::FeatureVector> scaled;
    features::Scaler scaler;
    forecast::Forecaster model;
};

struct FittedState {
    chain::Chain sim;  // chain state at the end of the training phase
    std::array<LayerArtifacts, chain::kNumLayers> layers;
    std::vector<double> demand0;  // clean consumer demand, full horizon

    explicit FittedState(const chain::ChainConfig& cfg) : sim(cfg) {}
};

// Days 0..train_days-1 under pass-through ordering (every layer orders its
// observed demand), then per-layer scaler fit and forecaster training.
// Validation days volunteer nothing here; that is the leakage boundary.
inline FittedState run_training_phase(const ExperimentConfig& config, std::uint64_t run_seed) {
    config.validate();
    FittedState fs(config.chain_cfg);
    fs.demand0 = demand::generate(config.demand_cfg, config.horizon, run_seed);

    for (std::size_t t = 0; t < config.train_days; ++t) {
        const double d0 = fs.demand0[t];
        const std::array<double, chain::kNumLayers> orders{0.0, d0, d0, d0};
        const chain::DayRecord rec = fs.sim.step(orders, d0, static_cast<std::int64_t>(t));
        for (std::size_t layer = 1; layer < chain::kNumLayers; ++layer) {
            auto& h = fs.layers[layer].history;
            h.demand.push_back(rec.demand[layer]);
            h.orders.push_back(rec.order[layer]);
            h.inventory.push_back(rec.inventory_end[layer]);
            h.sales.push_back(rec.sales[layer]);
        }
    }

    const features::FeatureParams fp = config.feature_params();
    for (std::size_t layer = 1; layer < chain::kNumLayers; ++layer) {
        auto& art = fs.layers[layer];
        std::vector<features::FeatureVector> raw;
        raw.reserve(config.train_days);
        for (std::size_t t = 0; t < config.train_days; ++t) {
            raw.push_back(features::build_feature_vector(art.history, static_cast<std::int64_t>(t), fp));
        }
        art.scaler = features::Scaler::fit(raw);
        art.scaled.reserve(raw.size());
        for (const auto& r : raw) art.scaled.push_back(art.scaler.apply(r));
        const features::WindowDataset ds = features::make_windows(art.scaled, art.history.demand);
        try {
            art.model = forecast::fit_forecaster(config.forecaster, ds,
                                                 rng::derive_seed(run_seed, rng::Channel::model_init, layer));
        } catch (const std::exception& e) {
            throw TrainingError("layer " + std::to_string(layer) + ": " + e.what());
        }
    }
    return fs;
}

// ===== Validation phase =====

// Forecast, order, and step the chain for each remaining day, continuing
// from the training-phase chain state. noise_level perturbs only the
// validation slice of the demand series.
inline RunResult run_validation_phase(const ExperimentConfig& config, const FittedState& fitted,
                                      std::uint64_t run_seed) {
    RunResult out;
    out.model = forecast::kind_name(config.forecaster.kind);
    out.seed = run_seed;
    out.noise_level = config.noise_level;
    out.train_days = config.train_days;
    out.horizon = config.horizon;
    out.chain_cfg = config.chain_cfg;

    chain::Chain sim = fitted.sim;
    std::array<features::SeriesHistory, chain::kNumLayers> hist;
    std::array<std::vector<features::FeatureVector>, chain::kNumLayers> scaled;
    std::array<forecast::Smoother, chain::kNumLayers> smoothers{
        forecast::Smoother(config.forecaster.smoothing_alpha), forecast::Smoother(config.forecaster.smoothing_alpha),
        forecast::Smoother(config.forecaster.smoothing_alpha), forecast::Smoother(config.forecaster.smoothing_alpha)};
    for (std::size_t layer = 1; layer < chain::kNumLayers; ++layer) {
        hist[layer] = fitted.layers[layer].history;
        scaled[layer] = fitted.layers[layer].scaled;
    }

    std::vector<double> demand_val(fitted.demand0.begin() + static_cast<std::ptrdiff_t>(config.train_days),
                                   fitted.demand0.end());
    if (config.noise_level > 0.0) demand_val = demand::inject_noise(demand_val, config.noise_level, run_seed);

    const features::FeatureParams fp = config.feature_params();
    const auto& pp = config.policy_params;
    std::array<double, chain::kNumLayers> prev_day1{};
    std::array<double, chain::kNumLayers> cumulative{};

    for (std::size_t vi = 0; vi < demand_val.size(); ++vi) {
        const std::int64_t t = static_cast<std::int64_t>(config.train_days + vi);
        const double d0 = demand_val[vi];
        std::array<double, chain::kNumLayers> orders{};
        std::array<forecast::Forecast, chain::kNumLayers> fcs;
        double downstream = d0;

        for (std::size_t layer = 1; layer < chain::kNumLayers; ++layer) {
            auto& h = hist[layer];
            h.demand.push_back(downstream);
            const features::FeatureVector fv = features::build_feature_vector(h, t, fp);
            scaled[layer].push_back(fitted.layers[layer].scaler.apply(fv));

            features::Window w;
            const std::size_t end = scaled[layer].size();
            for (std::size_t k = 0; k < features::kWindowLength; ++k) {
                w[k] = scaled[layer][end - features::kWindowLength + k];
            }

            forecast::Forecast fc;
            try {
                fc.raw = forecast::predict(fitted.layers[layer].model, w, h.demand);
            } catch (const std::exception& e) {
                throw NumericError("day " + std::to_string(t) + " layer " + std::to_string(layer) + ": " + e.what());
            }
            fc.weighted_point = forecast::weight_horizon(fc.raw);
            fc.smoothed_point = smoothers[layer].apply(fc.weighted_point);

            const std::vector<double> trailing(h.demand.end() - static_cast<std::ptrdiff_t>(pp.demand_lookback) - 1,
                                               h.demand.end() - 1);
            const double ss = policy::safety_stock(pp.safety_stock_base, trailing, pp.ss_factor);
            const double avg10 = math::mean(trailing);
            const auto candidates = policy::candidate_orders(fc.smoothed_point, sim.state(layer).inventory, avg10, ss,
                                                             pp, config.chain_cfg.max_inventory);
            std::vector<double> projections;
            projections.reserve(candidates.size());
            for (double q : candidates) {
                projections.push_back(policy::project_profit(q, fc.raw, sim.state(layer), t, config.chain_cfg, layer,
                                                             pp.lookahead_horizon));
            }
            const policy::OrderDecision dec =
                policy::choose_order(candidates, projections, pp.batch_size, pp.rounding);
            orders[layer] = dec.chosen;
            fcs[layer] = fc;
            downstream = dec.chosen;
        }

        const chain::DayRecord rec = sim.step(orders, d0, t);
        for (std::size_t layer = 1; layer < chain::kNumLayers; ++layer) {
            auto& h = hist[layer];
            h.orders.push_back(rec.order[layer]);
            h.inventory.push_back(rec.inventory_end[layer]);
            h.sales.push_back(rec.sales[layer]);

            LayerSeries& s = out.layers[layer];
            s.demand.push_back(rec.demand[layer]);
            s.orders.push_back(rec.order[layer]);
            s.sales.push_back(rec.sales[layer]);
            s.inventory_start.push_back(rec.inventory_start[layer]);
            s.inventory_end.push_back(rec.inventory_end[layer]);
            s.revenue.push_back(rec.revenue[layer]);
            s.purchase_cost.push_back(rec.purchase_cost[layer]);
            s.holding_cost.push_back(rec.holding_cost[layer]);
            s.shortage_cost.push_back(rec.shortage_cost[layer]);
            s.profit.push_back(rec.profit[layer]);
            cumulative[layer] += rec.profit[layer];
            s.cumulative_profit.push_back(cumulative[layer]);
            s.forecast_day1.push_back(fcs[layer].raw[0]);
            s.forecast_weighted.push_back(fcs[layer].weighted_point);
            s.forecast_smoothed.push_back(fcs[layer].smoothed_point);
            // day-ahead error: yesterday's first horizon value vs today's
            // realized demand; the first day has no prior forecast
            s.mae.push_back(vi == 0 ? 0.0 : std::fabs(prev_day1[layer] - rec.demand[layer]));
            prev_day1[layer] = fcs[layer].raw[0];
        }
    }
    return out;
}

inline RunResult run_single(const ExperimentConfig& config, std::uint64_t run_seed) {
    const FittedState fitted = run_training_phase(config, run_seed);
    return run_validation_phase(config, fitted, run_seed);
}

// ===== Multi-seed experiments =====

struct ExperimentOutcome {
    std::vector<RunResult> results;
    std::vector<std::pair<std::uint64_t, std::string>> failures;
};

// Independent runs over the configured seeds. A failed seed is recorded and
// the rest continue. The sink (if any) sees results in seed order.
inline ExperimentOutcome run_experiment(const ExperimentConfig& config, std::size_t n_jobs = 1,
                                        const std::function<void(const RunResult&)>& sink = nullptr) {
    config.validate();
    const std::size_t n = config.seeds.size();
    std::vector<std::optional<RunResult>> slots(n);
    std::vector<std::optional<std::string>> errors(n);

    if (n_jobs <= 1 || n == 1) {
        for (std::size_t i = 0; i < n; ++i) {
            try {
                slots[i] = run_single(config, config.seeds[i]);
            } catch (const std::exception& e) {
                errors[i] = e.what();
            }
        }
    } else {
        std::mutex next_mutex;
        std::size_t next = 0;
        auto worker = [&]() {
            for (;;) {
                std::size_t i;
                {
                    std::lock_guard<std::mutex> lock(next_mutex);
                    if (next >= n) return;
                    i = next++;
                }
                try {
                    slots[i] = run_single(config, config.seeds[i]);
                } catch (const std::exception& e) {
                    errors[i] = e.what();
                }
            }
        };
        std::vector<std::thread> pool;
        const std::size_t workers = std::min(n_jobs, n);
        pool.reserve(workers);
        for (std::size_t k = 0; k < workers; ++k) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    ExperimentOutcome out;
    for (std::size_t i = 0; i < n; ++i) {
        if (slots[i]) {
            if (sink) sink(*slots[i]);
            out.results.push_back(std::move(*slots[i]));
        } else {
            out.failures.emplace_back(config.seeds[i], errors[i] ? *errors[i] : "unknown failure");
        }
    }
    return out;
}

// ===== Hyperparameter search =====

struct SearchSpace {
    std::pair<std::size_t, std::size_t> n_neurons{64, 64};  // multiples of 64; full range tops out at 1024
    std::pair<double, double> lnn_lr{1e-5, 1e-3};           // sampled log-uniform
    std::pair<std::size_t, std::size_t> epochs{50, 100};
    std::vector<std::size_t> batch{4, 8};
    std::pair<std::size_t, std::size_t> n_trees{100, 300};
    std::pair<std::size_t, std::size_t> max_depth{3, 7};
    std::pair<double, double> gbt_lr{0.01, 0.3};
    std::pair<double, double> ss_base{5.0, 20.0};

    void validate() const {
        if (n_neurons.first == 0 || n_neurons.first % 64 != 0 || n_neurons.second % 64 != 0 ||
            n_neurons.first > n_neurons.second) {
            throw ConfigError("n_neurons range must be ordered multiples of 64");
        }
        if (lnn_lr.first <= 0.0 || lnn_lr.first > lnn_lr.second) throw ConfigError("bad lnn_lr range");
        if (epochs.first == 0 || epochs.first > epochs.second) throw ConfigError("bad epochs range");
        if (batch.empty()) throw ConfigError("batch choices empty");
        if (n_trees.first == 0 || n_trees.first > n_trees.second) throw ConfigError("bad n_trees range");
        if (max_depth.first == 0 || max_depth.first > max_depth.second) throw ConfigError("bad max_depth range");
        if (gbt_lr.first <= 0.0 || gbt_lr.first > gbt_lr.second) throw ConfigError("bad gbt_lr range");
        if (ss_base.first < 0.0 || ss_base.first > ss_base.second) throw ConfigError("bad ss_base range");
    }
};

struct TrialParams {
    std::size_t n_neurons = 64;
    double lnn_lr = 1e-3;
    std::size_t epochs = 50;
    std::size_t batch = 8;
    std::size_t n_trees = 100;
    std::size_t max_depth = 3;
    double gbt_lr = 0.1;
    double ss_base = 10.0;
};

struct Trial {
    TrialParams params;
    double objective = 0.0;
};

struct TuneResult {
    TrialParams best;
    double best_objective = 0.0;
    std::vector<Trial> log;
};

enum class Sampler { random, tpe };

namespace detail {

inline constexpr std::size_t kTuneDims = 8;

// Every sampler draws points in the unit cube; this maps them onto the
// mixed discrete/continuous space.
inline TrialParams denormalize(const std::array<double, kTuneDims>& u, const SearchSpace& sp) {
    TrialParams p;
    const std::size_t neuron_steps = (sp.n_neurons.second - sp.n_neurons.first) / 64 + 1;
    const auto pick = [](double x, std::size_t count) {
        const auto idx = static_cast<std::size_t>(x * static_cast<double>(count));
        return std::min(idx, count - 1);
    };
    p.n_neurons = sp.n_neurons.first + pick(u[0], neuron_steps) * 64;
    p.lnn_lr = std::pow(10.0, std::log10(sp.lnn_lr.first) +
                                  u[1] * (std::log10(sp.lnn_lr.second) - std::log10(sp.lnn_lr.first)));
    p.epochs = sp.epochs.first + pick(u[2], sp.epochs.second - sp.epochs.first + 1);
    p.batch = sp.batch[pick(u[3], sp.batch.size())];
    p.n_trees = sp.n_trees.first + pick(u[4], sp.n_trees.second - sp.n_trees.first + 1);
    p.max_depth = sp.max_depth.first + pick(u[5], sp.max_depth.second - sp.max_depth.first + 1);
    p.gbt_lr = sp.gbt_lr.first + u[6] * (sp.gbt_lr.second - sp.gbt_lr.first);
    p.ss_base = sp.ss_base.first + u[7] * (sp.ss_base.second - sp.ss_base.first);
    return p;
}

// Univariate Parzen mixture density on [0,1] samples.
inline double parzen_density(double x, const std::vector<double>& centers, double bandwidth) {
    double s = 0.0;
    for (double c : centers) {
        const double z = (x - c) / bandwidth;
        s += std::exp(-0.5 * z * z);
    }
    return s / (static_cast<double>(centers.size()) * bandwidth * 2.5066282746310002) + 1e-12;
}

}  // namespace detail

inline ExperimentConfig apply_trial(const ExperimentConfig& base, const TrialParams& p) {
    ExperimentConfig cfg = base;
    cfg.forecaster.n_neurons = p.n_neurons;
    cfg.forecaster.train.learning_rate = p.lnn_lr;
    cfg.forecaster.train.epochs = p.epochs;
    cfg.forecaster.train.batch = p.batch;
    cfg.forecaster.trees.n_trees = p.n_trees;
    cfg.forecaster.trees.max_depth = p.max_depth;
    cfg.forecaster.trees.learning_rate = p.gbt_lr;
    cfg.policy_params.safety_stock_base = p.ss_base;
    return cfg;
}

// Maximizes the manufacturer-layer final cumulative profit on the first
// configured seed. Random search by default; the TPE-style mode models
// good/bad trial densities per dimension after 5 startup trials and picks
// the best of 24 candidates by density ratio.
inline TuneResult tune(const ExperimentConfig& config, const SearchSpace& space, std::size_t n_trials = 10,
                       Sampler sampler = Sampler::random) {
    config.validate();
    space.validate();
    if (n_trials == 0) throw ConfigError("n_trials must be positive");
    const std::uint64_t tune_seed = rng::derive_seed(config.seeds.front(), rng::Channel::tuning);
    rng::Generator gen(tune_seed);

    constexpr std::size_t kStartup = 5;
    constexpr std::size_t kCandidates = 24;
    constexpr double kGamma = 0.25;

    std::vector<std::array<double, detail::kTuneDims>> points;
    TuneResult out;
    bool any_success = false;

    for (std::size_t trial = 0; trial < n_trials; ++trial) {
        std::array<double, detail::kTuneDims> u{};
        if (sampler == Sampler::random || trial < kStartup || !any_success) {
            for (double& x : u) x = gen.uniform();
        } else {
            // split evaluated trials by objective into good/bad quantiles
            std::vector<std::size_t> order(points.size());
            for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
            std::sort(order.begin(), order.end(),
                      [&](std::size_t a, std::size_t b) { return out.log[a].objective > out.log[b].objective; });
            const std::size_t n_good =
                std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(kGamma * static_cast<double>(order.size()))));
            std::array<std::vector<double>, detail::kTuneDims> good, bad;
            for (std::size_t rank = 0; rank < order.size(); ++rank) {
                auto& dst = rank < n_good ? good : bad;
                for (std::size_t d = 0; d < detail::kTuneDims; ++d) dst[d].push_back(points[order[rank]][d]);
            }
            const double bw_good = std::max(0.1, 1.0 / std::sqrt(static_cast<double>(n_good)));
            const double bw_bad = std::max(0.1, 1.0 / std::sqrt(static_cast<double>(order.size() - n_good + 1)));
            double best_score = -1e300;
            for (std::size_t c = 0; c < kCandidates; ++c) {
                std::array<double, detail::kTuneDims> cand{};
                double score = 0.0;
                for (std::size_t d = 0; d < detail::kTuneDims; ++d) {
                    const double center = good[d][gen.index(good[d].size())];
                    cand[d] = math::clamp(center + bw_good * gen.gaussian(), 0.0, 1.0);
                    const double g = detail::parzen_density(cand[d], good[d], bw_good);
                    const double b = bad[d].empty() ? 1.0 : detail::parzen_density(cand[d], bad[d], bw_bad);
                    score += std::log(g) - std::log(b);
                }
                if (score > best_score) {
                    best_score = score;
                    u = cand;
                }
            }
        }

        const TrialParams params = detail::denormalize(u, space);
        ExperimentConfig trial_cfg = apply_trial(config, params);
        trial_cfg.seeds = {config.seeds.front()};
        double objective;
        try {
            const RunResult r = run_single(trial_cfg, trial_cfg.seeds.front());
            objective = r.layers[3].cumulative_profit.back();
        } catch (const std::exception&) {
            objective = -std::numeric_limits<double>::infinity();
        }
        points.push_back(u);
        out.log.push_back(Trial{params, objective});
        if (std::isfinite(objective) && (!any_success || objective > out.best_objective)) {
            out.best = params;
            out.best_objective = objective;
            any_success = true;
        }
    }
    if (!any_success) throw TrainingError("all tuning trials failed");
    return out;
}

}  // namespace echelon::engine
