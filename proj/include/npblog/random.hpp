#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <vector>

namespace npblog {

using Rng = std::mt19937_64;

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// Uniform on the open interval (0, 1).
inline double uniform01(Rng& rng) {
    // 53 random bits, shifted off zero
    return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

inline double standard_normal(Rng& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    return normal(rng);
}

inline double log_sum_exp(std::span<const double> xs) {
    double hi = kNegInf;
    for (double x : xs) hi = std::max(hi, x);
    if (hi == kNegInf) return kNegInf;
    double acc = 0.0;
    for (double x : xs) acc += std::exp(x - hi);
    return hi + std::log(acc);
}

inline double log_sum_exp(double a, double b) {
    if (a == kNegInf) return b;
    if (b == kNegInf) return a;
    const double hi = std::max(a, b);
    return hi + std::log(std::exp(a - hi) + std::exp(b - hi));
}

/// log of a Gamma(shape, 1) draw. Shapes below one are boosted to shape + 1 and
/// corrected by U^(1/shape), carried out in log space so tiny shapes do not
/// underflow.
inline double sample_log_gamma(double shape, Rng& rng) {
    if (shape < 1.0) {
        const double boosted = sample_log_gamma(shape + 1.0, rng);
        return boosted + std::log(uniform01(rng)) / shape;
    }
    // Marsaglia & Tsang
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x;
        double v;
        do {
            x = standard_normal(rng);
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = uniform01(rng);
        if (std::log(u) < 0.5 * x * x + d - d * v + d * std::log(v)) return std::log(d) + std::log(v);
    }
}

inline double sample_gamma(double shape, Rng& rng) { return std::exp(sample_log_gamma(shape, rng)); }

struct LogBeta {
    double log_w;
    double log_one_minus_w;
};

/// Beta(a, b) as a ratio of two gamma draws, returned as (log w, log(1 - w)).
/// Beta(1, b) is inverted directly: 1 - w = U^(1/b).
inline LogBeta sample_log_beta(double a, double b, Rng& rng) {
    if (a == 1.0) {
        const double rest = std::log(uniform01(rng)) / b;
        return {std::log(-std::expm1(rest)), rest};
    }
    const double ga = sample_log_gamma(a, rng);
    const double gb = sample_log_gamma(b, rng);
    const double total = log_sum_exp(ga, gb);
    return {ga - total, gb - total};
}

inline double sample_beta(double a, double b, Rng& rng) { return std::exp(sample_log_beta(a, b, rng).log_w); }

/// Dirichlet draw normalised in log space. Zero parameters yield zero mass.
inline std::vector<double> sample_dirichlet(std::span<const double> params, Rng& rng) {
    std::vector<double> logs(params.size(), kNegInf);
    for (std::size_t k = 0; k < params.size(); ++k) {
        if (params[k] > 0.0) logs[k] = sample_log_gamma(params[k], rng);
    }
    const double total = log_sum_exp(logs);
    std::vector<double> out(params.size(), 0.0);
    for (std::size_t k = 0; k < params.size(); ++k) out[k] = std::exp(logs[k] - total);
    return out;
}

/// Index drawn with probability proportional to weights (need not be normalised).
inline std::size_t sample_categorical(std::span<const double> weights, Rng& rng) {
    double total = 0.0;
    for (double w : weights) total += w;
    double u = uniform01(rng) * total;
    for (std::size_t k = 0; k < weights.size(); ++k) {
        u -= weights[k];
        if (u < 0.0) return k;
    }
    for (std::size_t k = weights.size(); k-- > 0;) {
        if (weights[k] > 0.0) return k;
    }
    return weights.size() - 1;
}

/// Index drawn with probability proportional to exp(log_weights). Returns
/// weights.size() when every entry is -inf.
inline std::size_t sample_log_categorical(std::span<const double> log_weights, Rng& rng,
                                          std::vector<double>& scratch) {
    double hi = kNegInf;
    for (double x : log_weights) hi = std::max(hi, x);
    if (hi == kNegInf) return log_weights.size();
    scratch.resize(log_weights.size());
    for (std::size_t k = 0; k < log_weights.size(); ++k) scratch[k] = std::exp(log_weights[k] - hi);
    return sample_categorical(scratch, rng);
}

}  // namespace npblog
