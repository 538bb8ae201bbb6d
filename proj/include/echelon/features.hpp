#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <vector>

#include "echelon/errors.hpp"
#include "echelon/mathutil.hpp"

namespace echelon::features {

inline constexpr std::size_t kFeatureDim = 10;
inline constexpr std::size_t kWindowLength = 10;
inline constexpr std::size_t kForecastHorizon = 7;

using FeatureVector = std::array<double, kFeatureDim>;

struct FeatureParams {
    double seasonal_period = 90.0;
    double horizon_days = 1095.0;
    std::size_t sd_window = 5;
};

// Recorded per-layer series the features are built from. demand must cover
// day t; the others only need to reach t-1.
struct SeriesHistory {
    std::vector<double> demand;
    std::vector<double> orders;
    std::vector<double> inventory;
    std::vector<double> sales;
};

namespace detail {

// Early history is padded by repeating the earliest recorded value.
inline double lag(const std::vector<double>& v, std::int64_t idx) {
    if (v.empty()) throw DomainError("feature lag on empty series");
    if (idx < 0) idx = 0;
    return v[static_cast<std::size_t>(idx)];
}

// Population sd over the window ending at t-1, padded at the front.
inline double trailing_sd(const std::vector<double>& v, std::int64_t t, std::size_t window) {
    std::vector<double> w;
    w.reserve(window);
    for (std::int64_t k = t - static_cast<std::int64_t>(window); k < t; ++k) w.push_back(lag(v, k));
    return math::population_sd(w);
}

}  // namespace detail

// The 10 entries, in order: demand_t, order_{t-1}, order_{t-2},
// inventory_{t-1}, inventory_{t-2}, sales_{t-1}, order_sd_5, demand_sd_5,
// season, time_norm.
inline FeatureVector build_feature_vector(const SeriesHistory& h, std::int64_t t, const FeatureParams& params = {}) {
    if (t < 0) throw DomainError("feature day must be non-negative");
    if (static_cast<std::size_t>(t) >= h.demand.size()) throw DomainError("demand history does not cover day t");
    FeatureVector f{};
    f[0] = h.demand[static_cast<std::size_t>(t)];
    f[1] = detail::lag(h.orders, t - 1);
    f[2] = detail::lag(h.orders, t - 2);
    f[3] = detail::lag(h.inventory, t - 1);
    f[4] = detail::lag(h.inventory, t - 2);
    f[5] = detail::lag(h.sales, t - 1);
    f[6] = detail::trailing_sd(h.orders, t, params.sd_window);
    f[7] = detail::trailing_sd(h.demand, t, params.sd_window);
    f[8] = std::sin(2.0 * std::numbers::pi * static_cast<double>(t) / params.seasonal_period);
    f[9] = static_cast<double>(t) / params.horizon_days;
    return f;
}

// Min-max scaler fit on the training slice and frozen afterwards.
// Validation inputs outside the training range scale outside [0,1]; they are
// deliberately not clipped.
struct Scaler {
    FeatureVector min{};
    FeatureVector max{};

    static Scaler fit(const std::vector<FeatureVector>& rows) {
        if (rows.empty()) throw DomainError("scaler fit on empty matrix");
        Scaler s;
        s.min = rows[0];
        s.max = rows[0];
        for (const auto& r : rows) {
            for (std::size_t j = 0; j < kFeatureDim; ++j) {
                s.min[j] = std::min(s.min[j], r[j]);
                s.max[j] = std::max(s.max[j], r[j]);
            }
        }
        return s;
    }

    FeatureVector apply(const FeatureVector& x) const {
        FeatureVector out{};
        for (std::size_t j = 0; j < kFeatureDim; ++j) {
            const double range = max[j] - min[j];
            out[j] = range == 0.0 ? 0.0 : (x[j] - min[j]) / range;
        }
        return out;
    }

    FeatureVector invert(const FeatureVector& x) const {
        FeatureVector out{};
        for (std::size_t j = 0; j < kFeatureDim; ++j) {
            const double range = max[j] - min[j];
            out[j] = range == 0.0 ? min[j] : x[j] * range + min[j];
        }
        return out;
    }
};

using Window = std::array<FeatureVector, kWindowLength>;
using Target = std::array<double, kForecastHorizon>;

struct WindowDataset {
    std::vector<Window> inputs;
    std::vector<Target> targets;

    std::size_t size() const { return inputs.size(); }
};

// Sliding windows: input = features[s..s+10), target = demand[s+10..s+17).
inline WindowDataset make_windows(const std::vector<FeatureVector>& feats, const std::vector<double>& demand,
                                  std::size_t window = kWindowLength, std::size_t horizon = kForecastHorizon) {
    if (window != kWindowLength || horizon != kForecastHorizon) {
        throw DomainError("window/horizon fixed at 10/7 in this build");
    }
    if (feats.size() != demand.size()) throw DomainError("feature and demand series lengths differ");
    if (feats.size() < window + horizon) throw DomainError("series too short for one window");
    WindowDataset ds;
    const std::size_t count = feats.size() - window - horizon + 1;
    ds.inputs.reserve(count);
    ds.targets.reserve(count);
    for (std::size_t s = 0; s < count; ++s) {
        Window w;
        for (std::size_t k = 0; k < window; ++k) w[k] = feats[s + k];
        Target tgt;
        for (std::size_t k = 0; k < horizon; ++k) tgt[k] = demand[s + window + k];
        ds.inputs.push_back(w);
        ds.targets.push_back(tgt);
    }
    return ds;
}

}  // namespace echelon::features
