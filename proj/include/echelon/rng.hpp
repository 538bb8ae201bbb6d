#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

namespace echelon::rng {

// One stream per stochastic purpose, so enabling one channel (e.g. demand
// noise injection) never shifts the draws of another (e.g. weight init).
enum class Channel : std::uint64_t {
    demand = 0x64656d616e640001ull,
    noise = 0x6e6f697365000002ull,
    model_init = 0x6d6f64656c000003ull,
    tuning = 0x74756e6500000004ull,
    shuffle = 0x7368756600000005ull,
};

// splitmix64 finalizer; decorrelates adjacent run seeds (42..51).
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// Channel seed = mix(run_seed ^ channel_salt ^ mix(index)); index separates
// per-layer or per-trial sub-streams within one channel.
inline std::uint64_t derive_seed(std::uint64_t run_seed, Channel ch, std::uint64_t index = 0) {
    return mix64(run_seed ^ static_cast<std::uint64_t>(ch) ^ mix64(index));
}

// mt19937_64 (output sequence fixed by the standard, portable across
// platforms) with Box-Muller gaussians drawn from the same stream.
class Generator {
public:
    explicit Generator(std::uint64_t seed) : engine_(seed) {}

    // uniform in [0, 1)
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    double gaussian() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = 1.0 - uniform();  // (0, 1]: keeps log finite
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(theta);
        has_spare_ = true;
        return r * std::cos(theta);
    }

    double gaussian(double mean, double sd) { return mean + sd * gaussian(); }

    std::uint64_t next_u64() { return engine_(); }

    // integer in [0, n)
    std::size_t index(std::size_t n) { return static_cast<std::size_t>(uniform() * static_cast<double>(n)) % n; }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::swap(v[i - 1], v[index(i)]);
        }
    }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace echelon::rng
