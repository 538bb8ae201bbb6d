#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include "echelon/errors.hpp"
#include "echelon/mathutil.hpp"
#include "echelon/rng.hpp"

namespace echelon::demand {

struct DemandConfig {
    double base = 50.0;
    double annual_amplitude = 20.0;
    double annual_period = 90.0;
    double weekly_amplitude = 5.0;
    double weekly_period = 7.0;
    double noise_sd = 3.0;

    void validate() const {
        if (annual_period <= 0.0 || weekly_period <= 0.0) throw ConfigError("demand periods must be positive");
        if (annual_amplitude < 0.0 || weekly_amplitude < 0.0) throw ConfigError("demand amplitudes must be non-negative");
        if (noise_sd < 0.0) throw ConfigError("demand noise_sd must be non-negative");
    }
};

// Deterministic part of D(t); the floor at zero applies after noise.
inline double seasonal_component(const DemandConfig& cfg, std::int64_t t) {
    const double tt = static_cast<double>(t);
    return cfg.base + cfg.annual_amplitude * std::sin(2.0 * std::numbers::pi * tt / cfg.annual_period) +
           cfg.weekly_amplitude * std::sin(2.0 * std::numbers::pi * tt / cfg.weekly_period);
}

// D(t) = max(0, base + A_a sin(2 pi t / P_a) + A_w sin(2 pi t / P_w) + eps),
// eps ~ N(0, noise_sd^2), t = 0..days-1.
inline std::vector<double> generate(const DemandConfig& cfg, std::size_t days, std::uint64_t seed) {
    cfg.validate();
    if (days == 0) throw DomainError("demand series needs at least one day");
    rng::Generator gen(rng::derive_seed(seed, rng::Channel::demand));
    std::vector<double> out(days);
    for (std::size_t t = 0; t < days; ++t) {
        const double eps = cfg.noise_sd * gen.gaussian();
        out[t] = std::max(0.0, seasonal_component(cfg, static_cast<std::int64_t>(t)) + eps);
    }
    return out;
}

// Perturbs a series in place for robustness runs: v' = clamp(v + e, 0, 2 max(series)),
// e ~ N(0, (level * sd(series))^2). sd and max come from the unperturbed input.
inline std::vector<double> inject_noise(const std::vector<double>& series, double level, std::uint64_t seed) {
    if (series.empty()) throw DomainError("inject_noise on empty series");
    if (level < 0.0) throw ConfigError("noise level must be non-negative");
    if (level == 0.0) return series;
    const double sd = math::population_sd(series);
    const double cap = 2.0 * *std::max_element(series.begin(), series.end());
    rng::Generator gen(rng::derive_seed(seed, rng::Channel::noise));
    std::vector<double> out(series.size());
    for (std::size_t i = 0; i < series.size(); ++i) {
        const double e = gen.gaussian(0.0, level * sd);
        out[i] = math::clamp(series[i] + e, 0.0, cap);
    }
    return out;
}

}  // namespace echelon::demand
