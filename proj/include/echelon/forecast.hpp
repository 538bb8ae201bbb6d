#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "echelon/errors.hpp"
#include "echelon/features.hpp"
#include "echelon/gbt.hpp"
#include "echelon/lnn.hpp"
#include "echelon/mathutil.hpp"

namespace echelon::forecast {

using features::Target;
using features::Window;
using features::WindowDataset;
using features::kForecastHorizon;
using features::kWindowLength;

enum class Kind { hybrid, gbt, sma };

inline std::string kind_name(Kind k) {
    switch (k) {
        case Kind::hybrid: return "hybrid";
        case Kind::gbt: return "gbt";
        case Kind::sma: return "sma";
    }
    throw DomainError("unknown forecaster kind");
}

inline Kind kind_from_name(const std::string& s) {
    if (s == "hybrid") return Kind::hybrid;
    if (s == "gbt") return Kind::gbt;
    if (s == "sma") return Kind::sma;
    throw ConfigError("unknown model kind '" + s + "'");
}

struct ForecasterSpec {
    Kind kind = Kind::hybrid;
    std::size_t n_neurons = 64;
    double alpha_base = 0.5;
    double kappa = 0.1;
    double tau = 1.0;
    double dt = 1.0;
    lnn::TrainHyper train;
    gbt::GbtParams trees;
    std::size_t sma_window = 10;
    double smoothing_alpha = 0.3;

    void validate() const {
        train.validate();
        trees.validate();
        if (sma_window == 0) throw ConfigError("sma_window must be positive");
        if (smoothing_alpha <= 0.0 || smoothing_alpha > 1.0) throw ConfigError("smoothing_alpha must be in (0,1]");
    }
};

// A fitted model. hybrid: trained LNN plus 7 per-horizon tree ensembles on
// the flattened 10 x n hidden states. gbt: 7 ensembles on the flattened raw
// window (100 inputs). sma: stateless.
struct Forecaster {
    Kind kind = Kind::sma;
    std::size_t sma_window = 10;
    lnn::LnnParams net;                 // hybrid only
    std::vector<gbt::Ensemble> heads;   // hybrid/gbt: one per horizon step
};

namespace detail {

inline std::vector<double> flatten_hidden(const std::vector<std::vector<double>>& hidden) {
    std::vector<double> flat;
    flat.reserve(hidden.size() * hidden[0].size());
    for (const auto& h : hidden) flat.insert(flat.end(), h.begin(), h.end());
    return flat;
}

inline std::vector<double> flatten_window(const Window& w) {
    std::vector<double> flat;
    flat.reserve(kWindowLength * features::kFeatureDim);
    for (const auto& f : w) flat.insert(flat.end(), f.begin(), f.end());
    return flat;
}

inline std::vector<gbt::Ensemble> fit_heads(const std::vector<std::vector<double>>& rows, const WindowDataset& ds,
                                            const gbt::GbtParams& params, std::uint64_t seed) {
    const gbt::Dataset X = gbt::Dataset::build(rows);
    std::vector<gbt::Ensemble> heads;
    heads.reserve(kForecastHorizon);
    std::vector<double> y(ds.size());
    for (std::size_t k = 0; k < kForecastHorizon; ++k) {
        for (std::size_t i = 0; i < ds.size(); ++i) y[i] = ds.targets[i][k];
        heads.push_back(gbt::fit(X, y, params, seed));
    }
    return heads;
}

}  // namespace detail

inline Forecaster fit_forecaster(const ForecasterSpec& spec, const WindowDataset& ds, std::uint64_t seed) {
    spec.validate();
    Forecaster f;
    f.kind = spec.kind;
    f.sma_window = spec.sma_window;
    if (spec.kind == Kind::sma) return f;
    if (ds.size() == 0) throw DomainError("cannot fit a forecaster on an empty dataset");

    if (spec.kind == Kind::gbt) {
        std::vector<std::vector<double>> rows;
        rows.reserve(ds.size());
        for (const auto& w : ds.inputs) rows.push_back(detail::flatten_window(w));
        f.heads = detail::fit_heads(rows, ds, spec.trees, seed);
        return f;
    }

    lnn::LnnParams init = lnn::init_xavier(spec.n_neurons, seed, spec.alpha_base, spec.kappa, spec.tau, spec.dt);
    f.net = lnn::train(std::move(init), ds, spec.train);
    std::vector<std::vector<double>> rows;
    rows.reserve(ds.size());
    for (const auto& w : ds.inputs) rows.push_back(detail::flatten_hidden(lnn::forward(f.net, w).hidden));
    f.heads = detail::fit_heads(rows, ds, spec.trees, seed);
    return f;
}

// recent_demand is the trailing raw demand the SMA averages (its last
// sma_window entries); model kinds read only the scaled window.
inline Target predict(const Forecaster& f, const Window& scaled_window, const std::vector<double>& recent_demand) {
    Target raw{};
    switch (f.kind) {
        case Kind::sma: {
            if (recent_demand.empty()) throw DomainError("sma needs demand history");
            const std::size_t n = std::min(f.sma_window, recent_demand.size());
            double s = 0.0;
            for (std::size_t i = recent_demand.size() - n; i < recent_demand.size(); ++i) s += recent_demand[i];
            const double avg = s / static_cast<double>(n);
            raw.fill(avg);
            break;
        }
        case Kind::gbt: {
            const std::vector<double> flat = detail::flatten_window(scaled_window);
            for (std::size_t k = 0; k < kForecastHorizon; ++k) raw[k] = f.heads[k].predict(flat);
            break;
        }
        case Kind::hybrid: {
            const std::vector<double> flat = detail::flatten_hidden(lnn::forward(f.net, scaled_window).hidden);
            for (std::size_t k = 0; k < kForecastHorizon; ++k) raw[k] = f.heads[k].predict(flat);
            break;
        }
    }
    for (double& v : raw) v = std::max(0.0, v);
    return raw;
}

// Linear horizon weights 1.0 down to 0.5; the result is the weighted mean,
// keeping the point forecast in demand units.
inline double weight_horizon(const Target& raw) {
    double num = 0.0, den = 0.0;
    for (std::size_t k = 0; k < kForecastHorizon; ++k) {
        const double w = 1.0 - 0.5 * static_cast<double>(k) / 6.0;
        num += w * raw[k];
        den += w;
    }
    return num / den;
}

// Exponential smoothing; the first observation passes through unchanged.
class Smoother {
public:
    explicit Smoother(double alpha = 0.3) : alpha_(alpha) {
        if (alpha <= 0.0 || alpha > 1.0) throw ConfigError("smoothing alpha must be in (0,1]");
    }

    double apply(double weighted_point) {
        if (!prev_) {
            prev_ = weighted_point;
        } else {
            prev_ = alpha_ * weighted_point + (1.0 - alpha_) * *prev_;
        }
        return *prev_;
    }

    void reset() { prev_.reset(); }
    double alpha() const { return alpha_; }

private:
    double alpha_;
    std::optional<double> prev_;
};

struct Forecast {
    Target raw{};
    double weighted_point = 0.0;
    double smoothed_point = 0.0;
};

}  // namespace echelon::forecast
