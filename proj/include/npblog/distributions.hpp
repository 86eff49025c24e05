#pragma once

// Named measure families M_D(X|Y). A ScalarDistribution maps conditioning
// values to a measure over scalar values; a VectorDistribution is a measure
// over probability vectors. Families that draw from the evidence vocabulary
// are created unbound and turned into bound copies with with_vocabulary().

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "npblog/config.hpp"
#include "npblog/dp_core.hpp"
#include "npblog/error.hpp"
#include "npblog/random.hpp"
#include "npblog/string_similarity.hpp"
#include "npblog/value.hpp"

namespace npblog {

/// Input domain Y and output domain X, as type names (String, Integer, Real, Vector).
struct Signature {
    std::vector<std::string> inputs;
    std::string output;

    friend bool operator==(const Signature&, const Signature&) = default;
};

class Distribution {
  public:
    explicit Distribution(std::string name) : name_(std::move(name)) {}
    virtual ~Distribution() = default;

    const std::string& name() const { return name_; }
    virtual std::string family() const = 0;
    virtual Signature signature() const = 0;
    virtual std::map<std::string, std::string> parameters() const { return {}; }
    virtual bool can_sample() const { return true; }
    virtual bool can_score() const { return true; }

    /// True for families whose support is taken from the evidence.
    virtual bool needs_vocabulary() const { return false; }
    virtual bool is_bound() const { return true; }
    virtual std::shared_ptr<const Distribution> with_vocabulary(std::vector<std::int64_t>) const {
        throw Error(ErrorCode::InvalidParam, name_ + " does not take a vocabulary");
    }

  protected:
    [[noreturn]] void unbound() const {
        throw Error(ErrorCode::UnboundParameter, name_ + ": vocabulary not bound");
    }

  private:
    std::string name_;
};

/// Finite support with log weights, in a fixed order.
struct FiniteSupport {
    std::vector<Value> values;
    std::vector<double> log_weights;

    void clear() {
        values.clear();
        log_weights.clear();
    }
};

class ScalarDistribution : public Distribution {
  public:
    using Distribution::Distribution;

    virtual double log_density(std::span<const Value> inputs, const Value& x) const = 0;
    virtual Value sample(std::span<const Value> inputs, Rng& rng) const = 0;

    virtual bool finite_support() const { return false; }
    /// Fills `out` for finite-support families; callers check finite_support() first.
    virtual void support(std::span<const Value>, FiniteSupport&) const {
        throw Error(ErrorCode::UnsupportedForm, name() + " has no finite support");
    }

    std::size_t arity() const { return signature().inputs.size(); }
};

class VectorDistribution : public Distribution {
  public:
    using Distribution::Distribution;

    virtual std::size_t dimension() const = 0;
    virtual double log_density(std::span<const double> x) const = 0;
    virtual std::vector<double> sample(Rng& rng) const = 0;
};

namespace detail {

using Slots = std::map<std::string, std::string>;

inline std::optional<std::string> slot(const Slots& s, const std::string& key) {
    if (auto it = s.find(key); it != s.end()) return it->second;
    return std::nullopt;
}

inline double real_slot(const std::string& dist, const Slots& s, const std::string& key) {
    auto v = slot(s, key);
    if (!v) throw Error(ErrorCode::MissingConfig, "dist." + dist + "." + key + " is required");
    return ModelConfig::parse_real("dist." + dist + "." + key, *v);
}

inline std::vector<double> real_list(const std::string& dist, const std::string& key, const std::string& text) {
    std::vector<double> out;
    for (const auto& item : split(text, ',')) out.push_back(ModelConfig::parse_real("dist." + dist + "." + key, item));
    return out;
}

/// Strings from `values = a, b, c` or `size = N` with `prefix`.
inline std::optional<std::vector<std::int64_t>> string_values(const std::string& dist, const Slots& s) {
    if (auto v = slot(s, "values")) {
        std::vector<std::int64_t> out;
        for (const auto& item : split(*v, ',')) {
            if (item.empty()) throw Error(ErrorCode::InvalidParam, "dist." + dist + ".values has an empty entry");
            out.push_back(intern(item));
        }
        return out;
    }
    if (auto n = slot(s, "size")) {
        const double size = ModelConfig::parse_real("dist." + dist + ".size", *n);
        if (size < 1 || size != std::floor(size)) {
            throw Error(ErrorCode::InvalidParam, "dist." + dist + ".size must be a positive integer");
        }
        const std::string prefix = slot(s, "prefix").value_or("v");
        std::vector<std::int64_t> out;
        for (long i = 0; i < static_cast<long>(size); ++i) out.push_back(intern(prefix + std::to_string(i)));
        return out;
    }
    return std::nullopt;
}

inline std::string join_strings(const std::vector<std::int64_t>& ids, std::size_t limit = 8) {
    std::string out;
    for (std::size_t i = 0; i < ids.size() && i < limit; ++i) out += (i ? "," : "") + string_of(ids[i]);
    if (ids.size() > limit) out += ",...(" + std::to_string(ids.size()) + ")";
    return out;
}

inline void require_unique(const std::string& dist, const std::vector<std::int64_t>& ids) {
    auto sorted = ids;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
        throw Error(ErrorCode::InvalidParam, dist + ": duplicate values");
    }
}

}  // namespace detail

/// Finite outcome set with fixed log probabilities. Outcomes are strings or integers.
class FiniteDistribution : public ScalarDistribution {
  public:
    FiniteDistribution(std::string name, std::vector<Value> values, std::vector<double> probs)
        : ScalarDistribution(std::move(name)), values_(std::move(values)) {
        if (values_.size() != probs.size() || values_.empty()) {
            throw Error(ErrorCode::InvalidParam, this->name() + ": values and probabilities must match and be nonempty");
        }
        double total = 0.0;
        for (double p : probs) {
            if (!(p >= 0.0) || !std::isfinite(p)) throw Error(ErrorCode::InvalidParam, this->name() + ": negative probability");
            total += p;
        }
        if (std::abs(total - 1.0) > 1e-9) {
            throw Error(ErrorCode::InvalidParam, this->name() + ": probabilities sum to " + std::to_string(total));
        }
        for (std::size_t i = 0; i < values_.size(); ++i) {
            probs_.push_back(probs[i] / total);
            log_probs_.push_back(std::log(probs[i] / total));
            index_.emplace(values_[i], i);
        }
        if (index_.size() != values_.size()) throw Error(ErrorCode::InvalidParam, this->name() + ": duplicate values");
    }

    Signature signature() const override { return {{}, output_type()}; }

    double log_density(std::span<const Value>, const Value& x) const override {
        auto it = index_.find(x);
        return it == index_.end() ? kNegInf : log_probs_[it->second];
    }
    Value sample(std::span<const Value>, Rng& rng) const override { return values_[sample_categorical(probs_, rng)]; }

    bool finite_support() const override { return true; }
    void support(std::span<const Value>, FiniteSupport& out) const override {
        out.values = values_;
        out.log_weights = log_probs_;
    }

    const std::vector<Value>& values() const { return values_; }

  protected:
    std::string output_type() const { return values_.front().kind == Value::Kind::Int ? "Integer" : "String"; }

    std::vector<Value> values_;
    std::vector<double> probs_;
    std::vector<double> log_probs_;
    std::unordered_map<Value, std::size_t, ValueHash> index_;
};

class CategoricalDistribution : public FiniteDistribution {
  public:
    using FiniteDistribution::FiniteDistribution;
    std::string family() const override { return "Categorical"; }
    std::map<std::string, std::string> parameters() const override {
        std::string probs;
        for (std::size_t i = 0; i < probs_.size(); ++i) probs += (i ? "," : "") + std::to_string(probs_[i]);
        return {{"probs", probs}};
    }
};

/// Uniform over a finite set: listed strings, integers 1..n, or the evidence vocabulary.
class UniformDistribution : public FiniteDistribution {
  public:
    UniformDistribution(std::string name, std::vector<Value> values)
        : FiniteDistribution(std::move(name), values, std::vector<double>(values.size(), 1.0 / static_cast<double>(values.size()))) {}

    std::string family() const override { return "Uniform"; }
    std::map<std::string, std::string> parameters() const override {
        return {{"size", std::to_string(values_.size())}};
    }
};

/// Uniform over the evidence vocabulary; unusable until bound.
class VocabularyUniform : public ScalarDistribution {
  public:
    using ScalarDistribution::ScalarDistribution;

    std::string family() const override { return "Uniform"; }
    Signature signature() const override { return {{}, "String"}; }
    std::map<std::string, std::string> parameters() const override { return {{"vocabulary", "auto"}}; }
    bool needs_vocabulary() const override { return true; }
    bool is_bound() const override { return false; }

    std::shared_ptr<const Distribution> with_vocabulary(std::vector<std::int64_t> vocab) const override;

    double log_density(std::span<const Value>, const Value&) const override { unbound(); }
    Value sample(std::span<const Value>, Rng&) const override { unbound(); }
    bool finite_support() const override { return true; }
    void support(std::span<const Value>, FiniteSupport&) const override { unbound(); }
};

/// Uniform bound to a vocabulary; remembers that it came from one.
class BoundVocabularyUniform : public UniformDistribution {
  public:
    using UniformDistribution::UniformDistribution;
    bool needs_vocabulary() const override { return true; }
    std::shared_ptr<const Distribution> with_vocabulary(std::vector<std::int64_t> vocab) const override {
        return VocabularyUniform(name()).with_vocabulary(std::move(vocab));
    }
};

inline std::shared_ptr<const Distribution> VocabularyUniform::with_vocabulary(std::vector<std::int64_t> vocab) const {
    if (vocab.empty()) throw Error(ErrorCode::UnboundParameter, name() + ": evidence vocabulary is empty");
    std::vector<Value> values;
    for (auto id : vocab) values.push_back(Value::str_id(id));
    return std::make_shared<BoundVocabularyUniform>(name(), std::move(values));
}

class PoissonDistribution : public ScalarDistribution {
  public:
    PoissonDistribution(std::string name, double mean) : ScalarDistribution(std::move(name)), mean_(mean) {
        if (!(mean > 0.0) || !std::isfinite(mean)) throw Error(ErrorCode::InvalidParam, this->name() + ": mean must be positive");
    }
    std::string family() const override { return "Poisson"; }
    Signature signature() const override { return {{}, "Integer"}; }
    std::map<std::string, std::string> parameters() const override { return {{"mean", std::to_string(mean_)}}; }

    double log_density(std::span<const Value>, const Value& x) const override {
        if (x.kind != Value::Kind::Int || x.data < 0) return kNegInf;
        const double k = static_cast<double>(x.data);
        return k * std::log(mean_) - mean_ - std::lgamma(k + 1.0);
    }
    Value sample(std::span<const Value>, Rng& rng) const override {
        std::poisson_distribution<long> d(mean_);
        return Value::integer(d(rng));
    }
    double mean() const { return mean_; }

  private:
    double mean_;
};

class BetaDistribution : public ScalarDistribution {
  public:
    BetaDistribution(std::string name, double a, double b) : ScalarDistribution(std::move(name)), a_(a), b_(b) {
        if (!(a > 0.0) || !(b > 0.0)) throw Error(ErrorCode::InvalidParam, this->name() + ": shapes must be positive");
    }
    std::string family() const override { return "Beta"; }
    Signature signature() const override { return {{}, "Real"}; }
    std::map<std::string, std::string> parameters() const override {
        return {{"a", std::to_string(a_)}, {"b", std::to_string(b_)}};
    }

    double log_density(std::span<const Value>, const Value& x) const override {
        if (x.kind != Value::Kind::Real) return kNegInf;
        const double v = x.as_real();
        if (!(v > 0.0 && v < 1.0)) return kNegInf;
        return (a_ - 1.0) * std::log(v) + (b_ - 1.0) * std::log1p(-v) + std::lgamma(a_ + b_) - std::lgamma(a_) -
               std::lgamma(b_);
    }
    Value sample(std::span<const Value>, Rng& rng) const override { return Value::real(sample_beta(a_, b_, rng)); }

  private:
    double a_, b_;
};

/// Observation noise over a finite palette. `uniform` spreads the error rate
/// over every other value; `adjacent` treats the palette as a ring and splits it
/// between the two neighbours. A null input gives the uniform distribution.
class ConfusionDistribution : public ScalarDistribution {
  public:
    enum class Mode { Uniform, Adjacent };

    ConfusionDistribution(std::string name, std::vector<std::int64_t> values, double error, Mode mode)
        : ScalarDistribution(std::move(name)), values_(std::move(values)), error_(error), mode_(mode) {
        if (values_.empty()) throw Error(ErrorCode::InvalidParam, this->name() + ": empty palette");
        if (!(error >= 0.0 && error <= 1.0)) throw Error(ErrorCode::InvalidParam, this->name() + ": error must be in [0,1]");
        detail::require_unique(this->name(), values_);
        for (std::size_t i = 0; i < values_.size(); ++i) index_.emplace(values_[i], i);
    }

    std::string family() const override { return "Confusion"; }
    Signature signature() const override { return {{"String"}, "String"}; }
    std::map<std::string, std::string> parameters() const override {
        return {{"error", std::to_string(error_)},
                {"mode", mode_ == Mode::Adjacent ? "adjacent" : "uniform"},
                {"values", detail::join_strings(values_)}};
    }

    double log_density(std::span<const Value> inputs, const Value& x) const override {
        const auto obs = position(x);
        if (!obs) return kNegInf;
        const auto truth = inputs.empty() || inputs[0].is_null() ? std::nullopt : position(inputs[0]);
        if (!inputs.empty() && !inputs[0].is_null() && !truth) {
            throw Error(ErrorCode::OutOfVocabulary, name() + ": input '" + describe(inputs[0]) + "' is not in the palette");
        }
        return std::log(prob(truth, *obs));
    }

    Value sample(std::span<const Value> inputs, Rng& rng) const override {
        FiniteSupport s;
        support(inputs, s);
        std::vector<double> scratch;
        return s.values[sample_log_categorical(s.log_weights, rng, scratch)];
    }

    bool finite_support() const override { return true; }
    void support(std::span<const Value> inputs, FiniteSupport& out) const override {
        out.clear();
        const auto truth = inputs.empty() || inputs[0].is_null() ? std::nullopt : position(inputs[0]);
        for (std::size_t i = 0; i < values_.size(); ++i) {
            out.values.push_back(Value::str_id(values_[i]));
            out.log_weights.push_back(std::log(prob(truth, i)));
        }
    }

    const std::vector<std::int64_t>& values() const { return values_; }

  private:
    static std::string describe(const Value& v) { return v.kind == Value::Kind::Str ? string_of(v.data) : "?"; }

    std::optional<std::size_t> position(const Value& v) const {
        if (v.kind != Value::Kind::Str) return std::nullopt;
        auto it = index_.find(v.data);
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

    double prob(std::optional<std::size_t> truth, std::size_t obs) const {
        const std::size_t n = values_.size();
        if (!truth) return 1.0 / static_cast<double>(n);
        if (n == 1) return 1.0;
        if (obs == *truth) return 1.0 - error_;
        if (mode_ == Mode::Uniform || n == 2) return error_ / static_cast<double>(n - 1);
        const std::size_t left = (*truth + n - 1) % n;
        const std::size_t right = (*truth + 1) % n;
        return obs == left || obs == right ? error_ / 2.0 : 0.0;
    }

    std::vector<std::int64_t> values_;
    std::unordered_map<std::int64_t, std::size_t> index_;
    double error_;
    Mode mode_;
};

enum class SimilarityKind { Jaro, JaroSurname, TfIdf };

inline SimilarityKind parse_similarity(const std::string& dist, const std::string& text) {
    if (text == "jaro") return SimilarityKind::Jaro;
    if (text == "jaro_surname") return SimilarityKind::JaroSurname;
    if (text == "tfidf") return SimilarityKind::TfIdf;
    throw Error(ErrorCode::InvalidParam, "dist." + dist + ".similarity must be jaro, jaro_surname or tfidf");
}

inline std::string similarity_name(SimilarityKind k) {
    switch (k) {
        case SimilarityKind::Jaro: return "jaro";
        case SimilarityKind::JaroSurname: return "jaro_surname";
        case SimilarityKind::TfIdf: return "tfidf";
    }
    return {};
}

/// String noise: p(obs | true) = exp(lambda sim(true, obs)) / sum_v exp(lambda sim(true, v))
/// over the vocabulary v. A null true string gives the uniform distribution.
class StringModel : public ScalarDistribution {
  public:
    StringModel(std::string name, SimilarityKind kind, double temperature)
        : ScalarDistribution(std::move(name)), kind_(kind), temperature_(temperature) {
        if (!(temperature >= 0.0) || !std::isfinite(temperature)) {
            throw Error(ErrorCode::InvalidParam, this->name() + ": temperature must be nonnegative");
        }
    }

    std::string family() const override { return "StringModel"; }
    Signature signature() const override { return {{"String"}, "String"}; }
    std::map<std::string, std::string> parameters() const override {
        std::map<std::string, std::string> p{{"similarity", similarity_name(kind_)},
                                             {"temperature", std::to_string(temperature_)}};
        p["vocabulary"] = bound_ ? std::to_string(vocab_.size()) + " strings" : "auto";
        return p;
    }
    bool needs_vocabulary() const override { return true; }
    bool is_bound() const override { return bound_; }

    std::shared_ptr<const Distribution> with_vocabulary(std::vector<std::int64_t> vocab) const override {
        auto out = std::make_shared<StringModel>(name(), kind_, temperature_);
        out->bind(std::move(vocab));
        return out;
    }

    double similarity(const std::string& a, const std::string& b) const {
        switch (kind_) {
            case SimilarityKind::Jaro: return similarity::jaro(a, b);
            case SimilarityKind::JaroSurname: return similarity::jaro_surname(a, b);
            case SimilarityKind::TfIdf: return tfidf_.similarity(a, b);
        }
        return 0.0;
    }

    /// log p(observed | true). Throws OutOfVocabulary when observed is outside the vocabulary.
    double string_log_density(const Value& truth, const Value& observed) const {
        if (!bound_) unbound();
        const auto col = position(observed);
        if (!col) {
            throw Error(ErrorCode::OutOfVocabulary,
                        name() + ": '" + (observed.kind == Value::Kind::Str ? string_of(observed.data) : std::string("?")) +
                            "' is not in the vocabulary");
        }
        if (truth.is_null()) return -std::log(static_cast<double>(vocab_.size()));
        if (auto row = position(truth)) return table_[*row * vocab_.size() + *col];
        const auto r = row_for(truth);
        return r[*col];
    }

    double log_density(std::span<const Value> inputs, const Value& x) const override {
        return string_log_density(inputs.empty() ? Value::null() : inputs[0], x);
    }

    Value sample(std::span<const Value> inputs, Rng& rng) const override {
        FiniteSupport s;
        support(inputs, s);
        std::vector<double> scratch;
        return s.values[sample_log_categorical(s.log_weights, rng, scratch)];
    }

    bool finite_support() const override { return true; }
    void support(std::span<const Value> inputs, FiniteSupport& out) const override {
        if (!bound_) unbound();
        out.clear();
        const Value truth = inputs.empty() ? Value::null() : inputs[0];
        std::vector<double> row;
        if (truth.is_null()) {
            row.assign(vocab_.size(), -std::log(static_cast<double>(vocab_.size())));
        } else if (auto r = position(truth)) {
            row.assign(table_.begin() + static_cast<std::ptrdiff_t>(*r * vocab_.size()),
                       table_.begin() + static_cast<std::ptrdiff_t>((*r + 1) * vocab_.size()));
        } else {
            row = row_for(truth);
        }
        for (std::size_t i = 0; i < vocab_.size(); ++i) out.values.push_back(Value::str_id(vocab_[i]));
        out.log_weights = std::move(row);
    }

    const std::vector<std::int64_t>& vocabulary() const { return vocab_; }
    double temperature() const { return temperature_; }

  private:
    void bind(std::vector<std::int64_t> vocab) {
        if (vocab.empty()) throw Error(ErrorCode::UnboundParameter, name() + ": evidence vocabulary is empty");
        detail::require_unique(name(), vocab);
        vocab_ = std::move(vocab);
        for (std::size_t i = 0; i < vocab_.size(); ++i) index_.emplace(vocab_[i], i);
        if (kind_ == SimilarityKind::TfIdf) {
            std::vector<std::string> docs;
            for (auto id : vocab_) docs.push_back(string_of(id));
            tfidf_ = similarity::TfIdf(docs);
        }
        const std::size_t n = vocab_.size();
        std::vector<double> sim(n * n, 0.0);
        if (kind_ == SimilarityKind::TfIdf) {
            std::vector<std::vector<std::pair<std::string, double>>> vecs;
            for (auto id : vocab_) vecs.push_back(tfidf_.vectorize(string_of(id)));
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t j = i; j < n; ++j) {
                    sim[i * n + j] = sim[j * n + i] = i == j ? 1.0 : similarity::TfIdf::cosine(vecs[i], vecs[j]);
                }
            }
        } else {
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t j = i; j < n; ++j) {
                    sim[i * n + j] = sim[j * n + i] = i == j ? 1.0 : similarity(string_of(vocab_[i]), string_of(vocab_[j]));
                }
            }
        }
        table_.assign(n * n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            std::span<double> row(table_.data() + i * n, n);
            for (std::size_t j = 0; j < n; ++j) row[j] = temperature_ * sim[i * n + j];
            const double z = log_sum_exp(std::span<const double>(row.data(), n));
            for (auto& x : row) x -= z;
        }
        bound_ = true;
    }

    std::optional<std::size_t> position(const Value& v) const {
        if (v.kind != Value::Kind::Str) return std::nullopt;
        auto it = index_.find(v.data);
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

    std::vector<double> row_for(const Value& truth) const {
        if (truth.kind != Value::Kind::Str) {
            throw Error(ErrorCode::InvalidParam, name() + ": input must be a string");
        }
        const auto& t = string_of(truth.data);
        std::vector<double> row(vocab_.size());
        for (std::size_t j = 0; j < vocab_.size(); ++j) row[j] = temperature_ * similarity(t, string_of(vocab_[j]));
        const double z = log_sum_exp(row);
        for (auto& x : row) x -= z;
        return row;
    }

    SimilarityKind kind_;
    double temperature_;
    bool bound_ = false;
    std::vector<std::int64_t> vocab_;
    std::unordered_map<std::int64_t, std::size_t> index_;
    similarity::TfIdf tfidf_;
    std::vector<double> table_;
};

/// log p(observed | true) under a bound string model.
inline double string_noise_log_density(const StringModel& model, const std::string& truth, const std::string& observed) {
    return model.string_log_density(Value::str(truth), Value::str(observed));
}

class DirichletDistribution : public VectorDistribution {
  public:
    DirichletDistribution(std::string name, std::vector<double> alpha)
        : VectorDistribution(std::move(name)), alpha_(std::move(alpha)) {
        if (alpha_.empty()) throw Error(ErrorCode::InvalidParam, this->name() + ": empty parameter vector");
        for (double a : alpha_) {
            if (!(a > 0.0) || !std::isfinite(a)) throw Error(ErrorCode::InvalidParam, this->name() + ": parameters must be positive");
        }
    }
    std::string family() const override { return "Dirichlet"; }
    Signature signature() const override { return {{}, "Vector"}; }
    std::map<std::string, std::string> parameters() const override {
        std::string a;
        for (std::size_t i = 0; i < alpha_.size(); ++i) a += (i ? "," : "") + std::to_string(alpha_[i]);
        return {{"alpha", a}};
    }
    std::size_t dimension() const override { return alpha_.size(); }

    double log_density(std::span<const double> x) const override {
        if (x.size() != alpha_.size()) return kNegInf;
        double total = 0.0;
        double lp = 0.0;
        double asum = 0.0;
        for (std::size_t k = 0; k < x.size(); ++k) {
            if (!(x[k] >= 0.0)) return kNegInf;
            total += x[k];
            asum += alpha_[k];
            lp += (alpha_[k] - 1.0) * std::log(x[k]) - std::lgamma(alpha_[k]);
        }
        if (std::abs(total - 1.0) > 1e-9) return kNegInf;
        return lp + std::lgamma(asum);
    }
    std::vector<double> sample(Rng& rng) const override { return sample_dirichlet(alpha_, rng); }

  private:
    std::vector<double> alpha_;
};

/// Truncated Stick(alpha) over kmax atoms.
class StickDistribution : public VectorDistribution {
  public:
    StickDistribution(std::string name, double alpha, std::size_t kmax)
        : VectorDistribution(std::move(name)), alpha_(alpha), kmax_(kmax) {
        dp::require_alpha(alpha);
        if (kmax < 1) throw Error(ErrorCode::InvalidParam, this->name() + ": kmax must be at least 1");
    }
    std::string family() const override { return "Stick"; }
    Signature signature() const override { return {{}, "Vector"}; }
    std::map<std::string, std::string> parameters() const override {
        return {{"alpha", std::to_string(alpha_)}, {"kmax", std::to_string(kmax_)}};
    }
    std::size_t dimension() const override { return kmax_; }

    /// Density of the leading kmax-1 weights: prod_k Beta(w_k; 1, alpha) / (1 - sum_{j<k} pi_j).
    double log_density(std::span<const double> x) const override {
        if (x.size() != kmax_) return kNegInf;
        double used = 0.0;
        double lp = 0.0;
        for (std::size_t k = 0; k + 1 < kmax_; ++k) {
            const double rest = 1.0 - used;
            if (!(x[k] >= 0.0) || rest <= 0.0) return kNegInf;
            const double w = x[k] / rest;
            if (w >= 1.0) return kNegInf;
            lp += std::log(alpha_) + (alpha_ - 1.0) * std::log1p(-w) - std::log(rest);
            used += x[k];
        }
        if (std::abs(used + x[kmax_ - 1] - 1.0) > 1e-9) return kNegInf;
        return lp;
    }
    std::vector<double> sample(Rng& rng) const override { return dp::stick_breaking_sample(alpha_, kmax_, rng).weights; }

  private:
    double alpha_;
    std::size_t kmax_;
};

/// Named distributions, in name order. Immutable once handed to a network;
/// with_vocabularies() returns a bound copy.
class DistributionRegistry {
  public:
    const Distribution& register_spec(std::shared_ptr<const Distribution> spec) {
        if (!spec) throw Error(ErrorCode::InvalidParam, "null distribution");
        if (index_.contains(spec->name())) throw Error(ErrorCode::DuplicateName, "distribution '" + spec->name() + "' already registered");
        index_.emplace(spec->name(), specs_.size());
        specs_.push_back(std::move(spec));
        return *specs_.back();
    }

    bool contains(const std::string& name) const { return index_.contains(name); }

    const Distribution* find(const std::string& name) const {
        auto it = index_.find(name);
        return it == index_.end() ? nullptr : specs_[it->second].get();
    }
    const Distribution& lookup(const std::string& name) const {
        if (auto* d = find(name)) return *d;
        throw Error(ErrorCode::UnresolvedSymbol, "distribution '" + name + "' is not configured");
    }
    const ScalarDistribution* scalar(const std::string& name) const {
        return dynamic_cast<const ScalarDistribution*>(find(name));
    }
    std::shared_ptr<const Distribution> shared(const std::string& name) const {
        auto it = index_.find(name);
        return it == index_.end() ? nullptr : specs_[it->second];
    }

    /// Positions are stable across with_vocabularies().
    std::optional<std::size_t> index_of(const std::string& name) const {
        auto it = index_.find(name);
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }
    const Distribution& at(std::size_t i) const { return *specs_.at(i); }

    std::vector<std::string> names() const {
        std::vector<std::string> out;
        for (const auto& [name, idx] : index_) out.push_back(name);
        return out;
    }
    std::size_t size() const { return specs_.size(); }

    /// Copy with every listed distribution bound to its vocabulary.
    DistributionRegistry with_vocabularies(const std::map<std::string, std::vector<std::int64_t>>& vocabularies) const {
        DistributionRegistry out = *this;
        for (const auto& [name, vocab] : vocabularies) {
            auto it = out.index_.find(name);
            if (it == out.index_.end()) throw Error(ErrorCode::UnresolvedSymbol, "distribution '" + name + "' is not configured");
            out.specs_[it->second] = out.specs_[it->second]->with_vocabulary(vocab);
        }
        return out;
    }

    /// Builds every `dist.<Name>.*` entry of the configuration.
    static DistributionRegistry from_config(const ModelConfig& config) {
        DistributionRegistry reg;
        for (const auto& [name, slots] : config.distributions()) reg.register_spec(make_distribution(name, slots));
        return reg;
    }

    static std::shared_ptr<const Distribution> make_distribution(const std::string& name, const detail::Slots& slots) {
        const auto family = detail::slot(slots, "family");
        if (!family) throw Error(ErrorCode::MissingConfig, "dist." + name + ".family is required");
        const std::string& f = *family;

        if (f == "Uniform") {
            if (auto n = detail::slot(slots, "n")) {
                const long count = static_cast<long>(detail::real_slot(name, slots, "n"));
                if (count < 1) throw Error(ErrorCode::InvalidParam, "dist." + name + ".n must be at least 1");
                std::vector<Value> values;
                for (long i = 1; i <= count; ++i) values.push_back(Value::integer(i));
                return std::make_shared<UniformDistribution>(name, std::move(values));
            }
            auto vocab = vocabulary_slot(name, slots);
            if (!vocab) return std::make_shared<VocabularyUniform>(name);
            detail::require_unique(name, *vocab);
            std::vector<Value> values;
            for (auto id : *vocab) values.push_back(Value::str_id(id));
            return std::make_shared<UniformDistribution>(name, std::move(values));
        }
        if (f == "Categorical") {
            const auto probs_text = detail::slot(slots, "probs");
            if (!probs_text) throw Error(ErrorCode::MissingConfig, "dist." + name + ".probs is required");
            auto probs = detail::real_list(name, "probs", *probs_text);
            std::vector<Value> values;
            if (auto strings = detail::string_values(name, slots)) {
                for (auto id : *strings) values.push_back(Value::str_id(id));
            } else {
                for (std::size_t i = 1; i <= probs.size(); ++i) values.push_back(Value::integer(static_cast<std::int64_t>(i)));
            }
            return std::make_shared<CategoricalDistribution>(name, std::move(values), std::move(probs));
        }
        if (f == "Poisson") return std::make_shared<PoissonDistribution>(name, detail::real_slot(name, slots, "mean"));
        if (f == "Beta") {
            return std::make_shared<BetaDistribution>(name, detail::real_slot(name, slots, "a"), detail::real_slot(name, slots, "b"));
        }
        if (f == "Dirichlet") {
            const auto a = detail::slot(slots, "alpha");
            if (!a) throw Error(ErrorCode::MissingConfig, "dist." + name + ".alpha is required");
            return std::make_shared<DirichletDistribution>(name, detail::real_list(name, "alpha", *a));
        }
        if (f == "Stick") {
            const double kmax = detail::real_slot(name, slots, "kmax");
            if (kmax < 1) throw Error(ErrorCode::InvalidParam, "dist." + name + ".kmax must be at least 1");
            return std::make_shared<StickDistribution>(name, detail::real_slot(name, slots, "alpha"), static_cast<std::size_t>(kmax));
        }
        if (f == "Confusion") {
            auto values = detail::string_values(name, slots);
            if (!values) throw Error(ErrorCode::MissingConfig, "dist." + name + " needs values or size");
            const auto mode_text = detail::slot(slots, "mode").value_or("uniform");
            ConfusionDistribution::Mode mode;
            if (mode_text == "uniform") {
                mode = ConfusionDistribution::Mode::Uniform;
            } else if (mode_text == "adjacent") {
                mode = ConfusionDistribution::Mode::Adjacent;
            } else {
                throw Error(ErrorCode::InvalidParam, "dist." + name + ".mode must be uniform or adjacent");
            }
            return std::make_shared<ConfusionDistribution>(name, std::move(*values), detail::real_slot(name, slots, "error"), mode);
        }
        if (f == "StringModel") {
            const auto sim = parse_similarity(name, detail::slot(slots, "similarity").value_or("jaro"));
            auto model = std::make_shared<StringModel>(name, sim, detail::real_slot(name, slots, "temperature"));
            if (auto vocab = vocabulary_slot(name, slots)) return model->with_vocabulary(std::move(*vocab));
            return model;
        }
        throw Error(ErrorCode::InvalidParam, "dist." + name + ".family: unknown family '" + f + "'");
    }

  private:
    /// Explicit vocabulary (`vocabulary = a, b` or values/size), or nullopt for `auto`.
    static std::optional<std::vector<std::int64_t>> vocabulary_slot(const std::string& name, const detail::Slots& slots) {
        if (auto v = detail::slot(slots, "vocabulary"); v && *v != "auto") {
            detail::Slots as_values{{"values", *v}};
            return detail::string_values(name, as_values);
        }
        return detail::string_values(name, slots);
    }

    std::vector<std::shared_ptr<const Distribution>> specs_;
    std::map<std::string, std::size_t> index_;
};

}  // namespace npblog
