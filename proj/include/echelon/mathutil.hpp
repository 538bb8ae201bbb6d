#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "echelon/errors.hpp"

namespace echelon::math {

inline double mean(const std::vector<double>& v) {
    if (v.empty()) throw DomainError("mean of empty vector");
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

// Population variance (divide by N).
inline double population_variance(const std::vector<double>& v) {
    if (v.empty()) throw DomainError("variance of empty vector");
    const double m = mean(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return s / static_cast<double>(v.size());
}

inline double population_sd(const std::vector<double>& v) { return std::sqrt(population_variance(v)); }

// Sample variance (divide by N-1), used by the significance tests.
inline double sample_variance(const std::vector<double>& v) {
    if (v.size() < 2) throw DomainError("sample variance needs at least 2 values");
    const double m = mean(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return s / static_cast<double>(v.size() - 1);
}

inline double clamp(double v, double lo, double hi) { return std::min(std::max(v, lo), hi); }

// ===== Regularized incomplete beta =====

// log Gamma via Lanczos (g=7, n=9), accurate to ~1e-15 for x > 0.
inline double log_gamma(double x) {
    static const double coef[9] = {
        0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
        771.32342877765313,   -176.61502916214059,   12.507343278686905,
        -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};
    if (x < 0.5) {
        // reflection formula
        const double pi = 3.14159265358979323846;
        return std::log(pi / std::sin(pi * x)) - log_gamma(1.0 - x);
    }
    x -= 1.0;
    double a = coef[0];
    const double t = x + 7.5;
    for (int i = 1; i < 9; ++i) a += coef[i] / (x + static_cast<double>(i));
    return 0.918938533204672742 + (x + 0.5) * std::log(t) - t + std::log(a);
}

namespace detail {

// Lentz's continued fraction for I_x(a,b); converges fast for x < (a+1)/(a+b+2).
inline double betacf(double a, double b, double x) {
    const double tiny = 1e-300;
    const double tol = 1e-12;
    const int max_iter = 500;

    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < tiny) d = tiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= max_iter; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < tol) return h;
    }
    throw NumericError("incomplete beta continued fraction did not converge");
}

}  // namespace detail

// I_x(a, b), regularized incomplete beta function.
inline double incomplete_beta(double a, double b, double x) {
    if (a <= 0.0 || b <= 0.0) throw DomainError("incomplete_beta requires a, b > 0");
    if (x < 0.0 || x > 1.0) throw DomainError("incomplete_beta requires x in [0, 1]");
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;
    // Same prefactor serves both tails: it is symmetric under (a,b,x) -> (b,a,1-x).
    const double front =
        std::exp(log_gamma(a + b) - log_gamma(a) - log_gamma(b) + a * std::log(x) + b * std::log1p(-x));
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return front * detail::betacf(a, b, x) / a;
    }
    return 1.0 - front * detail::betacf(b, a, 1.0 - x) / b;
}

// Two-sided p-value for Student's t with nu degrees of freedom.
inline double t_two_sided_p(double t, double nu) {
    if (nu <= 0.0) throw DomainError("t distribution requires nu > 0");
    const double x = nu / (nu + t * t);
    return incomplete_beta(nu / 2.0, 0.5, x);
}

// Survival function P(F >= f) for the F distribution.
inline double f_sf(double f, double d1, double d2) {
    if (d1 <= 0.0 || d2 <= 0.0) throw DomainError("F distribution requires positive dof");
    if (f <= 0.0) return 1.0;
    const double x = d2 / (d2 + d1 * f);
    return incomplete_beta(d2 / 2.0, d1 / 2.0, x);
}

inline void require_finite(double v, const char* what) {
    if (!std::isfinite(v)) throw NumericError(std::string(what) + " is not finite");
}

}  // namespace echelon::math
