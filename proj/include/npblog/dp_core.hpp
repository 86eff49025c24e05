#pragma once

// Dirichlet-process primitives: truncated stick-breaking, the Polya urn
// predictive, exchangeable partition probabilities and the conjugate updates
// used by the blocked Gibbs sampler.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "npblog/error.hpp"
#include "npblog/random.hpp"

namespace npblog::dp {

/// Truncated stick-breaking weights. The last entry absorbs the residual mass so
/// the vector is an exact probability simplex.
struct StickWeights {
    std::vector<double> weights;
    double alpha = 1.0;

    std::size_t size() const { return weights.size(); }
};

/// Occupancy of each atom.
class ClusterCounts {
  public:
    ClusterCounts() = default;
    explicit ClusterCounts(std::vector<long> counts) : counts_(std::move(counts)) {
        for (long c : counts_) {
            if (c < 0) throw Error(ErrorCode::InvalidParam, "cluster counts must be nonnegative");
            total_ += c;
        }
    }
    static ClusterCounts zeros(std::size_t n) { return ClusterCounts(std::vector<long>(n, 0)); }

    const std::vector<long>& counts() const { return counts_; }
    long total() const { return total_; }
    std::size_t size() const { return counts_.size(); }
    long operator[](std::size_t k) const { return counts_[k]; }

  private:
    std::vector<long> counts_;
    long total_ = 0;
};

/// Assignment of items to blocks; labels are arbitrary.
struct Partition {
    std::vector<int> labels;

    std::size_t size() const { return labels.size(); }

    /// Block sizes in order of first appearance.
    std::vector<long> block_sizes() const {
        std::vector<int> seen;
        std::vector<long> sizes;
        for (int label : labels) {
            auto it = std::find(seen.begin(), seen.end(), label);
            if (it == seen.end()) {
                seen.push_back(label);
                sizes.push_back(1);
            } else {
                ++sizes[static_cast<std::size_t>(it - seen.begin())];
            }
        }
        return sizes;
    }

    /// Blocks as lists of item indices, ordered by first member.
    std::vector<std::vector<std::size_t>> blocks() const {
        std::vector<int> seen;
        std::vector<std::vector<std::size_t>> out;
        for (std::size_t i = 0; i < labels.size(); ++i) {
            auto it = std::find(seen.begin(), seen.end(), labels[i]);
            if (it == seen.end()) {
                seen.push_back(labels[i]);
                out.push_back({i});
            } else {
                out[static_cast<std::size_t>(it - seen.begin())].push_back(i);
            }
        }
        return out;
    }

    /// Relabel blocks 0, 1, ... by first appearance.
    Partition canonical() const {
        std::vector<int> seen;
        Partition out;
        out.labels.reserve(labels.size());
        for (int label : labels) {
            auto it = std::find(seen.begin(), seen.end(), label);
            if (it == seen.end()) {
                out.labels.push_back(static_cast<int>(seen.size()));
                seen.push_back(label);
            } else {
                out.labels.push_back(static_cast<int>(it - seen.begin()));
            }
        }
        return out;
    }
};

inline void require_alpha(double alpha) {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) {
        throw Error(ErrorCode::InvalidParam, "concentration must be positive, got " + std::to_string(alpha));
    }
}

namespace detail {

/// Turns per-stick (log w, log 1-w) draws into weights; the last stick takes the
/// remainder.
inline std::vector<double> weights_from_sticks(std::span<const LogBeta> sticks) {
    const std::size_t kmax = sticks.size() + 1;
    std::vector<double> weights(kmax, 0.0);
    double log_rest = 0.0;
    double used = 0.0;
    for (std::size_t k = 0; k + 1 < kmax; ++k) {
        weights[k] = std::exp(sticks[k].log_w + log_rest);
        used += weights[k];
        log_rest += sticks[k].log_one_minus_w;
    }
    weights[kmax - 1] = std::max(0.0, 1.0 - used);
    return weights;
}

}  // namespace detail

/// pi_k = w_k prod_{j<k}(1 - w_j) with w_k ~ Beta(1, alpha).
inline StickWeights stick_breaking_sample(double alpha, std::size_t kmax, Rng& rng) {
    require_alpha(alpha);
    if (kmax < 1) throw Error(ErrorCode::InvalidParam, "truncation must be at least 1");
    std::vector<LogBeta> sticks;
    sticks.reserve(kmax - 1);
    for (std::size_t k = 0; k + 1 < kmax; ++k) sticks.push_back(sample_log_beta(1.0, alpha, rng));
    return {detail::weights_from_sticks(sticks), alpha};
}

/// Blocked-Gibbs update of the sticks: w_k ~ Beta(1 + n_k, alpha + sum_{j>k} n_j).
inline StickWeights stick_posterior_update(double alpha, const ClusterCounts& counts, Rng& rng) {
    require_alpha(alpha);
    const std::size_t kmax = counts.size();
    if (kmax < 1) throw Error(ErrorCode::InvalidParam, "counts must cover at least one atom");
    std::vector<LogBeta> sticks;
    sticks.reserve(kmax - 1);
    long remaining = counts.total();
    for (std::size_t k = 0; k + 1 < kmax; ++k) {
        remaining -= counts[k];
        sticks.push_back(sample_log_beta(1.0 + static_cast<double>(counts[k]),
                                         alpha + static_cast<double>(remaining), rng));
    }
    return {detail::weights_from_sticks(sticks), alpha};
}

inline void require_distribution(std::span<const double> probs) {
    double total = 0.0;
    for (double p : probs) {
        if (p < 0.0 || !std::isfinite(p)) throw Error(ErrorCode::InvalidParam, "base measure has a negative entry");
        total += p;
    }
    if (std::abs(total - 1.0) > 1e-9) throw Error(ErrorCode::InvalidParam, "base measure is not normalised");
}

/// Discrete-base urn predictive: P(next = k) = (alpha H_k + n_k) / (alpha + N).
inline std::vector<double> polya_predictive(const ClusterCounts& counts, double alpha,
                                            std::span<const double> base) {
    require_alpha(alpha);
    require_distribution(base);
    if (counts.size() != base.size()) {
        throw Error(ErrorCode::InvalidParam, "counts and base measure differ in length");
    }
    const double denom = alpha + static_cast<double>(counts.total());
    std::vector<double> out(base.size());
    for (std::size_t k = 0; k < base.size(); ++k) {
        out[k] = (alpha * base[k] + static_cast<double>(counts[k])) / denom;
    }
    return out;
}

struct ContinuousBase {};
inline constexpr ContinuousBase continuous_base{};

/// Continuous-base urn predictive: existing atom k gets n_k / (alpha + N); the
/// last entry is the new-atom mass alpha / (alpha + N).
inline std::vector<double> polya_predictive(const ClusterCounts& counts, double alpha, ContinuousBase) {
    require_alpha(alpha);
    const double denom = alpha + static_cast<double>(counts.total());
    std::vector<double> out;
    out.reserve(counts.size() + 1);
    for (long c : counts.counts()) out.push_back(static_cast<double>(c) / denom);
    out.push_back(alpha / denom);
    return out;
}

/// log[ alpha^K prod_b (n_b - 1)! / prod_{i<N} (alpha + i) ], via lgamma.
inline double partition_log_prob(const Partition& partition, double alpha) {
    require_alpha(alpha);
    const auto sizes = partition.block_sizes();
    const double n = static_cast<double>(partition.size());
    double lp = static_cast<double>(sizes.size()) * std::log(alpha);
    for (long s : sizes) lp += std::lgamma(static_cast<double>(s));
    lp -= std::lgamma(alpha + n) - std::lgamma(alpha);
    return lp;
}

/// sum_{i<n} alpha / (alpha + i)
inline double expected_num_clusters(double alpha, long n) {
    require_alpha(alpha);
    if (n < 1) throw Error(ErrorCode::InvalidParam, "n must be at least 1");
    double total = 0.0;
    for (long i = 0; i < n; ++i) total += alpha / (alpha + static_cast<double>(i));
    return total;
}

inline void require_sticks(const StickWeights& pi) {
    if (pi.weights.empty()) throw Error(ErrorCode::InvalidParam, "empty stick weights");
    double total = 0.0;
    for (double w : pi.weights) {
        if (w < 0.0) throw Error(ErrorCode::InvalidParam, "negative stick weight");
        total += w;
    }
    if (std::abs(total - 1.0) > 1e-9) throw Error(ErrorCode::InvalidParam, "stick weights do not sum to one");
}

/// phi ~ Dirichlet(alpha_f * pi)
inline std::vector<double> dirichlet_collection_sample(double alpha_f, const StickWeights& pi, Rng& rng) {
    require_alpha(alpha_f);
    require_sticks(pi);
    std::vector<double> params(pi.size());
    for (std::size_t k = 0; k < pi.size(); ++k) params[k] = alpha_f * pi.weights[k];
    return sample_dirichlet(params, rng);
}

/// phi | counts ~ Dirichlet(alpha_f * pi + counts)
inline std::vector<double> dirichlet_collection_posterior(double alpha_f, const StickWeights& pi,
                                                          const ClusterCounts& counts, Rng& rng) {
    require_alpha(alpha_f);
    require_sticks(pi);
    if (counts.size() != pi.size()) throw Error(ErrorCode::InvalidParam, "counts and sticks differ in length");
    std::vector<double> params(pi.size());
    for (std::size_t k = 0; k < pi.size(); ++k) params[k] = alpha_f * pi.weights[k] + static_cast<double>(counts[k]);
    return sample_dirichlet(params, rng);
}

}  // namespace npblog::dp
