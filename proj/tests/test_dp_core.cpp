#include <gtest/gtest.h>

#include <functional>

#include "npblog/dp_core.hpp"

using namespace npblog;
using namespace npblog::dp;

namespace {

struct Moments {
    double mean = 0.0, var = 0.0;
    std::size_t n = 0;
    void add(double x) {
        ++n;
        const double d = x - mean;
        mean += d / static_cast<double>(n);
        var += d * (x - mean);
    }
    double variance() const { return var / static_cast<double>(n - 1); }
    double se() const { return std::sqrt(variance() / static_cast<double>(n)); }
};

// All set partitions of n items as label vectors in restricted-growth form.
std::vector<Partition> set_partitions(int n) {
    std::vector<Partition> out;
    std::vector<int> labels(static_cast<std::size_t>(n), 0);
    std::function<void(int, int)> rec = [&](int i, int blocks) {
        if (i == n) {
            out.push_back({labels});
            return;
        }
        for (int b = 0; b <= blocks; ++b) {
            labels[static_cast<std::size_t>(i)] = b;
            rec(i + 1, std::max(blocks, b + 1));
        }
    };
    rec(0, 0);
    return out;
}

// Chain rule over the continuous-base urn: item i joins block b with n_b/(alpha+i)
// or opens a new block with alpha/(alpha+i).
double sequential_log_prob(const Partition& p, double alpha) {
    std::vector<long> sizes;
    double lp = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const auto b = static_cast<std::size_t>(p.labels[i]);
        const double denom = alpha + static_cast<double>(i);
        if (b >= sizes.size()) {
            lp += std::log(alpha / denom);
            sizes.push_back(1);
        } else {
            lp += std::log(static_cast<double>(sizes[b]) / denom);
            ++sizes[b];
        }
    }
    return lp;
}

long bell(int n) {
    std::vector<std::vector<long>> t{{1}};
    for (int i = 1; i <= n; ++i) {
        std::vector<long> row{t.back().back()};
        for (long x : t.back()) row.push_back(row.back() + x);
        t.push_back(row);
    }
    return t[static_cast<std::size_t>(n)][0];
}

}  // namespace

TEST(Sticks, WeightsSumToOne) {
    Rng rng(1);
    for (double alpha : {0.01, 0.5, 1.0, 5.0, 100.0}) {
        for (std::size_t kmax : {1u, 2u, 10u, 1000u}) {
            const auto pi = stick_breaking_sample(alpha, kmax, rng);
            ASSERT_EQ(pi.size(), kmax);
            double total = 0.0;
            for (double w : pi.weights) {
                EXPECT_GE(w, 0.0);
                total += w;
            }
            EXPECT_NEAR(total, 1.0, 1e-12);
        }
    }
}

TEST(Sticks, LeadingWeightMean) {
    Rng rng(2);
    for (auto [alpha, kmax] : {std::pair{0.05, 50}, std::pair{1.0, 1000}, std::pair{4.0, 50}}) {
        Moments m;
        for (int i = 0; i < 100000; ++i) m.add(stick_breaking_sample(alpha, static_cast<std::size_t>(kmax), rng).weights[0]);
        EXPECT_NEAR(m.mean, 1.0 / (1.0 + alpha), 3.0 * m.se()) << alpha;
    }
}

TEST(Sticks, RejectsBadParameters) {
    Rng rng(3);
    EXPECT_THROW(stick_breaking_sample(0.0, 10, rng), Error);
    EXPECT_THROW(stick_breaking_sample(-1.0, 10, rng), Error);
    EXPECT_THROW(stick_breaking_sample(1.0, 0, rng), Error);
}

TEST(Sticks, ZeroCountsRecoverPrior) {
    // pi_1 = w_1 ~ Beta(1, alpha), CDF 1 - (1 - x)^alpha.
    Rng rng(4);
    const double alpha = 2.5;
    const int n = 100000;
    std::vector<double> xs;
    for (int i = 0; i < n; ++i) xs.push_back(stick_posterior_update(alpha, ClusterCounts::zeros(20), rng).weights[0]);
    std::sort(xs.begin(), xs.end());
    double d = 0.0;
    for (int i = 0; i < n; ++i) {
        const double f = 1.0 - std::pow(1.0 - xs[static_cast<std::size_t>(i)], alpha);
        d = std::max({d, std::abs(f - static_cast<double>(i) / n), std::abs(f - static_cast<double>(i + 1) / n)});
    }
    EXPECT_LT(d, 1.63 / std::sqrt(static_cast<double>(n)));  // KS at p = 0.01
}

TEST(Sticks, PosteriorMeans) {
    Rng rng(5);
    const double alpha = 1.5;
    const std::vector<long> counts = {7, 0, 3, 1, 0};
    std::vector<Moments> m(counts.size());
    for (int i = 0; i < 100000; ++i) {
        const auto pi = stick_posterior_update(alpha, ClusterCounts(counts), rng);
        for (std::size_t k = 0; k < counts.size(); ++k) m[k].add(pi.weights[k]);
    }
    // E[pi_k] = E[w_k] prod_{j<k} E[1 - w_j] with independent Beta sticks.
    double rest = 1.0;
    long tail = 11;
    for (std::size_t k = 0; k + 1 < counts.size(); ++k) {
        tail -= counts[k];
        const double a = 1.0 + static_cast<double>(counts[k]);
        const double b = alpha + static_cast<double>(tail);
        EXPECT_NEAR(m[k].mean, rest * a / (a + b), 3.0 * m[k].se()) << k;
        rest *= b / (a + b);
    }
    EXPECT_NEAR(m.back().mean, rest, 3.0 * m.back().se());
}

TEST(Sticks, AllOnFirstAtom) {
    Rng rng(6);
    const double alpha = 1.0;
    const long N = 500;
    Moments m;
    for (int i = 0; i < 20000; ++i) m.add(stick_posterior_update(alpha, ClusterCounts({N, 0, 0, 0}), rng).weights[0]);
    EXPECT_NEAR(m.mean, (1.0 + N) / (1.0 + N + alpha), 3.0 * m.se());
}

TEST(Urn, DiscreteBaseExample) {
    const std::vector<double> base(4, 0.25);
    const auto p = polya_predictive(ClusterCounts({2, 1, 0, 0}), 2.0, base);
    EXPECT_DOUBLE_EQ(p[0], 0.5);
    EXPECT_DOUBLE_EQ(p[1], (0.5 + 1.0) / 5.0);
    EXPECT_DOUBLE_EQ(p[2], 0.1);
    double total = 0.0;
    for (double x : p) total += x;
    EXPECT_NEAR(total, 1.0, 1e-15);
}

TEST(Urn, EmptyCountsGiveBase) {
    const std::vector<double> base = {0.1, 0.6, 0.3};
    const auto p = polya_predictive(ClusterCounts::zeros(3), 0.7, base);
    for (std::size_t k = 0; k < 3; ++k) EXPECT_NEAR(p[k], base[k], 1e-15);
}

TEST(Urn, ContinuousBaseExample) {
    const auto p = polya_predictive(ClusterCounts({3}), 1.0, continuous_base);
    ASSERT_EQ(p.size(), 2u);
    EXPECT_DOUBLE_EQ(p[0], 0.75);
    EXPECT_DOUBLE_EQ(p[1], 0.25);
}

TEST(Urn, RejectsInvalidInput) {
    const std::vector<double> bad = {0.5, 0.4};
    EXPECT_THROW(polya_predictive(ClusterCounts({1, 0}), 1.0, bad), Error);
    const std::vector<double> base = {0.5, 0.5};
    EXPECT_THROW(polya_predictive(ClusterCounts({1, 0, 0}), 1.0, base), Error);
    EXPECT_THROW(polya_predictive(ClusterCounts({1, 0}), 0.0, base), Error);
    EXPECT_THROW(ClusterCounts({-1}), Error);
}

TEST(Eppf, SmallExamples) {
    EXPECT_NEAR(partition_log_prob({{0, 0, 1}}, 1.0), std::log(1.0 / 6.0), 1e-12);
    for (double alpha : {0.1, 1.0, 7.0}) EXPECT_NEAR(partition_log_prob({{0}}, alpha), 0.0, 1e-12);
}

TEST(Eppf, MatchesChainRuleAndSumsToOne) {
    for (double alpha : {0.3, 1.0, 1.7, 6.0}) {
        for (int n = 1; n <= 6; ++n) {
            const auto parts = set_partitions(n);
            ASSERT_EQ(static_cast<long>(parts.size()), bell(n));
            double total = 0.0;
            for (const auto& p : parts) {
                const double lp = partition_log_prob(p, alpha);
                EXPECT_NEAR(lp, sequential_log_prob(p, alpha), 1e-10);
                total += std::exp(lp);
            }
            EXPECT_NEAR(total, 1.0, 1e-10) << "alpha " << alpha << " n " << n;
        }
    }
}

TEST(Eppf, LabelInvariant) {
    EXPECT_NEAR(partition_log_prob({{5, 5, 2, 9, 2}}, 1.3), partition_log_prob({{0, 0, 1, 2, 1}}, 1.3), 1e-14);
    const Partition p{{5, 5, 2, 9, 2}};
    EXPECT_EQ(p.canonical().labels, (std::vector<int>{0, 0, 1, 2, 1}));
}

TEST(ExpectedClusters, Values) {
    EXPECT_DOUBLE_EQ(expected_num_clusters(1.0, 1), 1.0);
    double h20 = 0.0;
    for (int i = 1; i <= 20; ++i) h20 += 1.0 / i;
    EXPECT_NEAR(expected_num_clusters(1.0, 20), h20, 1e-12);
    EXPECT_NEAR(expected_num_clusters(1.0, 20), 3.5977, 1e-4);
    EXPECT_NEAR(expected_num_clusters(1e12, 15), 15.0, 1e-6);
    EXPECT_THROW(expected_num_clusters(1.0, 0), Error);
}

TEST(ExpectedClusters, UrnSimulation) {
    Rng rng(7);
    Moments m;
    for (int r = 0; r < 100000; ++r) {
        std::vector<long> sizes;
        for (int i = 0; i < 20; ++i) {
            const auto p = polya_predictive(ClusterCounts(sizes), 1.0, continuous_base);
            const auto k = sample_categorical(p, rng);
            if (k == sizes.size()) sizes.push_back(1);
            else ++sizes[k];
        }
        m.add(static_cast<double>(sizes.size()));
    }
    EXPECT_NEAR(m.mean, expected_num_clusters(1.0, 20), 3.0 * m.se());
}

TEST(Collections, PriorSumsToOneWithMeanPi) {
    Rng rng(8);
    const StickWeights pi{{0.5, 0.3, 0.15, 0.05}, 1.0};
    std::vector<Moments> m(4);
    for (int i = 0; i < 100000; ++i) {
        const auto phi = dirichlet_collection_sample(2.0, pi, rng);
        double total = 0.0;
        for (std::size_t k = 0; k < 4; ++k) {
            total += phi[k];
            m[k].add(phi[k]);
        }
        ASSERT_NEAR(total, 1.0, 1e-12);
    }
    for (std::size_t k = 0; k < 4; ++k) EXPECT_NEAR(m[k].mean, pi.weights[k], 3.0 * m[k].se()) << k;
}

TEST(Collections, LargeConcentrationShrinksVariance) {
    Rng rng(9);
    const StickWeights pi{{0.4, 0.6}, 1.0};
    const double af = 1e4;
    Moments m;
    for (int i = 0; i < 100000; ++i) m.add(dirichlet_collection_sample(af, pi, rng)[0]);
    const double var = 0.4 * 0.6 / (af + 1.0);
    // Standard error of a sample variance of a near-normal variable: var * sqrt(2/(n-1)).
    EXPECT_NEAR(m.variance(), var, 3.0 * var * std::sqrt(2.0 / 99999.0));
}

// Dirichlet(0.5 + 100, 0.5): the first coordinate has mean 100.5 / 101.
TEST(Collections, PosteriorMean) {
    Rng rng(10);
    const StickWeights pi{{0.5, 0.5}, 1.0};
    Moments m;
    for (int i = 0; i < 100000; ++i) m.add(dirichlet_collection_posterior(1.0, pi, ClusterCounts({100, 0}), rng)[0]);
    EXPECT_NEAR(m.mean, 100.5 / 101.0, 3.0 * m.se());
}

TEST(Collections, PosteriorMatchesConjugacy) {
    Rng rng(11);
    const StickWeights pi{{0.2, 0.3, 0.5}, 1.0};
    const std::vector<long> counts = {4, 0, 2};
    const double af = 3.0;
    std::vector<Moments> m(3);
    for (int i = 0; i < 100000; ++i) {
        const auto phi = dirichlet_collection_posterior(af, pi, ClusterCounts(counts), rng);
        for (std::size_t k = 0; k < 3; ++k) m[k].add(phi[k]);
    }
    for (std::size_t k = 0; k < 3; ++k) {
        EXPECT_NEAR(m[k].mean, (af * pi.weights[k] + static_cast<double>(counts[k])) / (af + 6.0), 3.0 * m[k].se()) << k;
    }
}

TEST(Collections, ZeroCountsRecoverPrior) {
    Rng a(12), b(12);
    const StickWeights pi{{0.7, 0.3}, 1.0};
    Moments post, prior;
    for (int i = 0; i < 50000; ++i) {
        post.add(dirichlet_collection_posterior(1.0, pi, ClusterCounts::zeros(2), a)[0]);
        prior.add(dirichlet_collection_sample(1.0, pi, b)[0]);
    }
    EXPECT_DOUBLE_EQ(post.mean, prior.mean);
    EXPECT_NEAR(post.variance(), 0.7 * 0.3 / 2.0, 0.01);
}

TEST(Collections, RejectsMismatchedInput) {
    Rng rng(13);
    EXPECT_THROW(dirichlet_collection_sample(1.0, StickWeights{{0.5, 0.4}, 1.0}, rng), Error);
    EXPECT_THROW(dirichlet_collection_posterior(1.0, StickWeights{{0.5, 0.5}, 1.0}, ClusterCounts({1}), rng), Error);
}
