#pragma once

// Hand-built micro-models: NP-BLOG source, config and evidence, plus the
// matching enumeration spec and the exact answer to every query.

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "enumeration_oracle.hpp"
#include "npblog/query.hpp"

namespace micro {

struct ItemRef {
    std::string indicator;  // indicator function of the item
    std::string observed;   // observation function of the item
    std::string object;     // guaranteed object name
    std::string type;       // guaranteed type
};

struct MicroModel {
    std::string name;
    std::string source;
    std::string config;
    oracle::MicroSpec spec;
    std::vector<ItemRef> items;  // aligned with spec.items
};

struct Expected {
    std::string query;
    bool probability = false;
    double value = 0.0;
    std::map<std::string, double> distribution;
};

inline const char* kMixture = R"(type Ball; type Draw;
guaranteed Draw;
random String Colour(Ball);
random Ball Ref(Draw);
random String Seen(Draw);
Colour(b) ~ ColourDist{};
Seen(d) ~ Noise{Colour(Ref(d))};
)";

inline const char* kShared = R"(type Ball; type Left; type Right;
guaranteed Left; guaranteed Right;
random String Colour(Ball);
random Ball RefL(Left);
random Ball RefR(Right);
random String SeenL(Left);
random String SeenR(Right);
Colour(b) ~ ColourDist{};
SeenL(l) ~ Noise{Colour(RefL(l))};
SeenR(r) ~ Noise{Colour(RefR(r))};
)";

inline const char* kNullClause = R"(type Ball; type Draw;
guaranteed Draw;
random String Colour(Ball);
random Integer Hidden(Draw);
random Ball Ref(Draw);
random String Seen(Draw);
Colour(b) ~ ColourDist{};
Hidden(d) ~ Coin{};
Ref(d) if Hidden(d) = 1 then null;
Seen(d) ~ Noise{Colour(Ref(d))};
)";

inline std::string join(const std::vector<std::string>& xs) {
    std::string out;
    for (const auto& x : xs) out += (out.empty() ? "" : ", ") + x;
    return out;
}

inline std::string config_for(const oracle::MicroSpec& s, bool categorical_base, double p_hidden) {
    std::string c = "alpha.Ball = " + std::to_string(s.alpha) + "\ntruncation.Ball = " + std::to_string(s.K) + "\n";
    if (categorical_base) {
        std::vector<std::string> probs;
        for (double p : s.base) probs.push_back(std::to_string(p));
        c += "dist.ColourDist.family = Categorical\ndist.ColourDist.probs = " + join(probs) + "\n";
    } else {
        c += "dist.ColourDist.family = Uniform\n";
    }
    c += "dist.ColourDist.values = " + join(s.vocab) + "\n";
    c += "dist.Noise.family = Confusion\ndist.Noise.mode = uniform\ndist.Noise.values = " + join(s.vocab) +
         "\ndist.Noise.error = " + std::to_string(s.error) + "\n";
    if (p_hidden > 0.0) {
        c += "dist.Coin.family = Categorical\ndist.Coin.probs = " + std::to_string(p_hidden) + ", " + std::to_string(1.0 - p_hidden) + "\n";
    }
    return c;
}

/// Four models: a plain mixture, a non-uniform base, two indicator families
/// sharing one stick, and a null clause.
inline std::vector<MicroModel> models() {
    std::vector<MicroModel> out;
    {
        MicroModel m;
        m.name = "mixture";
        m.source = kMixture;
        m.spec = {3, 1.0, {"red", "blue"}, {0.5, 0.5}, 0.2, {{0}, {0}, {1}}};
        m.config = config_for(m.spec, false, 0.0);
        for (int i = 1; i <= 3; ++i) m.items.push_back({"Ref", "Seen", "d" + std::to_string(i), "Draw"});
        out.push_back(m);
    }
    {
        MicroModel m;
        m.name = "categorical-base";
        m.source = kMixture;
        m.spec = {3, 0.5, {"red", "green", "blue"}, {0.5, 0.3, 0.2}, 0.3, {{1}, {1}}};
        m.config = config_for(m.spec, true, 0.0);
        for (int i = 1; i <= 2; ++i) m.items.push_back({"Ref", "Seen", "d" + std::to_string(i), "Draw"});
        out.push_back(m);
    }
    {
        MicroModel m;
        m.name = "shared-stick";
        m.source = kShared;
        m.spec = {3, 2.0, {"red", "blue"}, {0.5, 0.5}, 0.1, {{0}, {1}, {0}}};
        m.config = config_for(m.spec, false, 0.0);
        m.items = {{"RefL", "SeenL", "l1", "Left"}, {"RefR", "SeenR", "r1", "Right"}, {"RefR", "SeenR", "r2", "Right"}};
        out.push_back(m);
    }
    {
        MicroModel m;
        m.name = "null-clause";
        m.source = kNullClause;
        m.spec = {2, 1.0, {"red", "blue"}, {0.5, 0.5}, 0.2, {{0, 0.3}, {0, 0.3}}};
        m.config = config_for(m.spec, false, 0.3);
        for (int i = 1; i <= 2; ++i) m.items.push_back({"Ref", "Seen", "d" + std::to_string(i), "Draw"});
        out.push_back(m);
    }
    return out;
}

/// Evidence listing the guaranteed objects in `order` (indices into items).
inline npblog::Evidence evidence(const MicroModel& m, const std::vector<std::size_t>& order) {
    npblog::Evidence ev;
    std::map<std::string, std::vector<std::string>> objects;
    std::vector<std::string> types;
    for (std::size_t i : order) {
        const auto& it = m.items[i];
        if (!objects.contains(it.type)) types.push_back(it.type);
        objects[it.type].push_back(it.object);
        ev.observe(it.observed, {it.object}, m.spec.vocab[static_cast<std::size_t>(m.spec.items[i].obs)]);
    }
    for (const auto& t : types) ev.objects.emplace_back(t, objects[t]);
    return ev;
}

inline npblog::Evidence evidence(const MicroModel& m) {
    std::vector<std::size_t> order(m.items.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    return evidence(m, order);
}

/// The oracle spec with its items listed in `order`.
inline oracle::MicroSpec permuted(const oracle::MicroSpec& s, const std::vector<std::size_t>& order) {
    auto out = s;
    out.items.clear();
    for (std::size_t i : order) out.items.push_back(s.items[i]);
    return out;
}

/// Exact answers. `post` must come from a spec whose items are m.items permuted by `order`.
inline std::vector<Expected> expected(const MicroModel& m, const oracle::Posterior& post, const std::vector<std::size_t>& order) {
    std::vector<std::size_t> where(order.size());
    for (std::size_t p = 0; p < order.size(); ++p) where[order[p]] = p;
    std::vector<Expected> out;
    {
        Expected e;
        e.query = "CountPosterior(Ball)";
        for (const auto& [n, p] : post.count) e.distribution[std::to_string(n)] = p;
        out.push_back(e);
    }
    {
        Expected e;
        e.query = "NewObjectProbability(Ball)";
        e.probability = true;
        e.value = post.new_mass;
        out.push_back(e);
    }
    for (std::size_t i = 0; i < m.items.size(); ++i) {
        for (std::size_t j = i + 1; j < m.items.size(); ++j) {
            if (m.items[i].indicator != m.items[j].indicator) continue;
            Expected e;
            e.query = "Coreference(" + m.items[i].indicator + ", " + m.items[i].object + ", " + m.items[j].object + ")";
            e.probability = true;
            e.value = post.coref[where[i]][where[j]];
            out.push_back(e);
        }
        Expected e;
        e.query = "AttributePosterior(Colour(" + m.items[i].indicator + "(" + m.items[i].object + ")))";
        e.distribution = post.colour[where[i]];
        out.push_back(e);
    }
    return out;
}

inline std::vector<Expected> expected(const MicroModel& m) {
    std::vector<std::size_t> order(m.items.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    return expected(m, oracle::enumerate(m.spec), order);
}

/// Total variation for distributions, absolute difference for probabilities.
inline double distance(const Expected& e, const npblog::QueryAnswer& a) {
    if (e.probability) return std::abs(e.value - a.value);
    std::map<std::string, double> all = e.distribution;
    for (const auto& [o, p] : a.distribution) all.emplace(o, 0.0);
    double tv = 0.0;
    for (const auto& [o, p] : all) {
        const double q = e.distribution.contains(o) ? e.distribution.at(o) : 0.0;
        tv += std::abs(q - a.mass(o));
    }
    return 0.5 * tv;
}

inline std::shared_ptr<const npblog::GroundModel> ground(const MicroModel& m, const npblog::Evidence& ev) {
    auto model = npblog::compile_model(m.source, npblog::ModelConfig::parse(m.config), m.name);
    return std::make_shared<const npblog::GroundModel>(npblog::ground(model.network, ev));
}

/// Batch-means standard error of a series.
inline double batch_se(const std::vector<double>& xs, std::size_t batches = 50) {
    const std::size_t len = xs.size() / batches;
    if (len == 0) return 0.0;
    std::vector<double> means;
    for (std::size_t b = 0; b < batches; ++b) {
        double s = 0.0;
        for (std::size_t i = b * len; i < (b + 1) * len; ++i) s += xs[i];
        means.push_back(s / static_cast<double>(len));
    }
    double mu = 0.0;
    for (double x : means) mu += x;
    mu /= static_cast<double>(batches);
    double var = 0.0;
    for (double x : means) var += (x - mu) * (x - mu);
    var /= static_cast<double>(batches - 1);
    return std::sqrt(var / static_cast<double>(batches));
}

}  // namespace micro
