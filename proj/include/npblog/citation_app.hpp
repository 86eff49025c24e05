#pragma once

// Synthetic corpora with ground truth, and perfect-cluster recovery.
//
// Ground truth JSON:
//   {
//     "partitions": {"RefPub": [["c1", "c4"], ["c2"]], "RefAuthor": [["u1", "u7"], ...]},
//     "titles": {"c1": "...", ...},      true title of each citation's publication
//     "names": {"u1": "...", ...}        true name behind each author mention
//   }

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "npblog/query.hpp"

namespace npblog {

/// A partition of named items; block order and item order inside a block are irrelevant.
using Partition = std::vector<std::vector<std::string>>;

struct GroundTruth {
    std::map<std::string, Partition> partitions;
    std::map<std::string, std::string> titles;
    std::map<std::string, std::string> names;

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["partitions"] = nlohmann::json::object();
        for (const auto& [f, p] : partitions) j["partitions"][f] = p;
        j["titles"] = titles;
        j["names"] = names;
        return j;
    }

    static GroundTruth from_json(const nlohmann::json& j) {
        GroundTruth t;
        try {
            for (const auto& [f, p] : j.at("partitions").items()) t.partitions[f] = p.get<Partition>();
            if (j.contains("titles")) t.titles = j["titles"].get<std::map<std::string, std::string>>();
            if (j.contains("names")) t.names = j["names"].get<std::map<std::string, std::string>>();
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorCode::IoError, std::string("malformed ground truth: ") + e.what());
        }
        return t;
    }

    static GroundTruth load(const std::string& path) {
        try {
            return from_json(nlohmann::json::parse(detail::read_file(path)));
        } catch (const nlohmann::json::parse_error& e) {
            throw Error(ErrorCode::IoError, path + ": " + e.what());
        }
    }

    const Partition& partition(const std::string& function) const {
        auto it = partitions.find(function);
        if (it == partitions.end()) throw Error(ErrorCode::ItemSetMismatch, "ground truth has no partition for " + function);
        return it->second;
    }
};

struct SyntheticCorpusParams {
    int num_pubs = 50;
    int num_authors = 40;
    double citations_per_pub = 2.4;  // mean; every publication is cited at least once
    int min_authors_per_pub = 1;
    int max_authors_per_pub = 3;
    double title_noise = 0.2;        // per-word edit rate in cited titles
    double name_noise = 0.2;         // per-field edit rate in cited names
    std::uint64_t seed = 1;

    void validate() const {
        auto bad = [](const std::string& why) { throw Error(ErrorCode::InvalidParams, why); };
        if (num_pubs < 1) bad("num_pubs must be positive");
        if (num_authors < 1) bad("num_authors must be positive");
        if (!(citations_per_pub >= 1.0)) bad("citations_per_pub must be at least 1");
        if (min_authors_per_pub < 1 || max_authors_per_pub < min_authors_per_pub) bad("authors per publication must satisfy 1 <= min <= max");
        if (max_authors_per_pub > num_authors) bad("max_authors_per_pub exceeds num_authors");
        if (!(title_noise >= 0.0 && title_noise <= 1.0)) bad("title_noise must lie in [0, 1]");
        if (!(name_noise >= 0.0 && name_noise <= 1.0)) bad("name_noise must lie in [0, 1]");
    }
};

struct Corpus {
    Evidence evidence;
    GroundTruth truth;
};

namespace corpus {

inline const std::vector<std::string>& title_words() {
    static const std::vector<std::string> w = {
        "learning", "bayesian", "inference", "models", "networks", "probabilistic", "markov", "chains", "monte",
        "carlo", "sampling", "gibbs", "variational", "methods", "kernel", "support", "vector", "machines", "neural",
        "recognition", "face", "detection", "tracking", "visual", "motion", "segmentation", "images", "texture",
        "shape", "features", "reasoning", "logic", "planning", "agents", "decision", "theoretic", "utility",
        "belief", "revision", "constraint", "satisfaction", "search", "heuristic", "optimal", "approximate",
        "algorithms", "efficient", "fast", "robust", "adaptive", "online", "incremental", "hierarchical", "mixture",
        "dirichlet", "process", "clustering", "classification", "regression", "boosting", "ensemble", "trees",
        "graphical", "factor", "hidden", "states", "temporal", "dynamic", "sequential", "filtering", "particle",
        "estimation", "parameter", "structure", "discovery", "causal", "relational", "first", "order", "objects",
        "identity", "uncertainty", "citation", "matching", "record", "linkage", "entity", "resolution", "language",
        "speech", "text", "retrieval", "information", "documents", "topics", "semantic", "knowledge", "representation",
        "ontology", "queries", "databases", "distributed", "parallel", "multiagent", "reinforcement", "policy",
        "value", "function", "gradient", "stochastic", "convex", "optimization", "sparse", "coding", "dimensionality",
        "reduction", "manifold", "embedding", "spectral", "graph", "partitioning", "random", "fields", "conditional",
        "discriminative", "generative", "training", "unsupervised", "supervised", "active", "transfer", "domain",
        "analysis", "evaluation", "benchmark", "framework", "theory", "bounds", "complexity", "generalization",
        "errors", "noise", "missing", "data", "scalable", "large", "scale", "systems", "architecture", "vision",
        "robot", "navigation", "mapping", "localization", "sensor", "fusion", "diagnosis", "medical", "expert",
        "rules", "induction", "programs", "abstraction", "qualitative", "spatial", "geometric", "invariant",
        "pose", "illumination", "lighting", "appearance", "eigenfaces", "subspace", "linear", "nonlinear",
        "principal", "components", "independent", "mutual", "entropy", "maximum", "likelihood", "posterior",
        "prior", "nonparametric", "open", "universe", "unknown", "counting", "selection", "combining"};
    return w;
}

inline const std::vector<std::string>& first_names() {
    static const std::vector<std::string> w = {
        "Alice", "Bernard", "Carmen", "David", "Elena", "Felix", "Grace", "Hiro", "Irene", "Jonas", "Kavya", "Liam",
        "Maria", "Nadia", "Oscar", "Priya", "Quentin", "Rosa", "Stefan", "Tara", "Umar", "Vera", "Walter", "Xenia",
        "Yusuf", "Zoe", "Anton", "Bianca", "Cyril", "Dora", "Emil", "Freya", "Gustav", "Hana", "Ivan", "Julia",
        "Kenji", "Lena", "Marco", "Nina"};
    return w;
}

inline const std::vector<std::string>& surnames() {
    static const std::vector<std::string> w = {
        "Abernathy", "Bergstrom", "Castellano", "Delacroix", "Eriksson", "Fairbanks", "Gallagher", "Hoffmann",
        "Ivanova", "Jorgensen", "Kowalski", "Lindqvist", "Montgomery", "Nakamura", "Oyelaran", "Petrakis",
        "Quiroga", "Rasmussen", "Santangelo", "Thorvaldsen", "Underwood", "Valentino", "Whitfield", "Xiong",
        "Yamamoto", "Zielinski", "Achterberg", "Blackwood", "Cunningham", "Dragomir", "Esposito", "Fitzgerald",
        "Grimaldi", "Hargreaves", "Iglesias", "Jablonski", "Kirkpatrick", "Lombardi", "Moreau", "Novak",
        "Ostrowski", "Pemberton", "Rinaldi", "Sorensen", "Tanaka", "Umberto", "Vasquez", "Wolfowitz", "Yarbrough",
        "Zimmerman", "Ashworth", "Bancroft", "Chakraborty", "Donnelly", "Eckhardt", "Fontaine", "Galloway",
        "Hollister", "Ibrahimovic", "Kaczmarek"};
    return w;
}

inline std::size_t pick(Rng& rng, std::size_t n) { return static_cast<std::size_t>(uniform01(rng) * static_cast<double>(n)) % n; }

inline long poisson(Rng& rng, double mean) {
    std::poisson_distribution<long> d(mean);
    return d(rng);
}

/// One character-level typo: swap, delete or substitute.
inline std::string typo(std::string s, Rng& rng) {
    if (s.size() < 3) return s;
    const std::size_t i = 1 + pick(rng, s.size() - 2);
    switch (pick(rng, 3)) {
        case 0: std::swap(s[i], s[i - 1]); break;
        case 1: s.erase(i, 1); break;
        default: {
            const char c = static_cast<char>('a' + pick(rng, 26));
            s[i] = std::isupper(static_cast<unsigned char>(s[i])) ? static_cast<char>(std::toupper(c)) : c;
        }
    }
    return s;
}

inline std::vector<std::string> words_of(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    std::string w;
    while (in >> w) out.push_back(w);
    return out;
}

inline std::string join(const std::vector<std::string>& ws) {
    std::string out;
    for (const auto& w : ws) out += (out.empty() ? "" : " ") + w;
    return out;
}

/// Each word is independently dropped, swapped with its neighbour, or
/// misspelled with probability `rate`. At least one word survives.
inline std::string perturb_title(const std::string& title, double rate, Rng& rng) {
    auto ws = words_of(title);
    std::vector<std::string> out;
    for (std::size_t i = 0; i < ws.size(); ++i) {
        if (uniform01(rng) >= rate) {
            out.push_back(ws[i]);
            continue;
        }
        switch (pick(rng, 3)) {
            case 0: break;
            case 1:
                if (i + 1 < ws.size()) {
                    std::swap(ws[i], ws[i + 1]);
                    out.push_back(ws[i]);
                    break;
                }
                [[fallthrough]];
            default: out.push_back(typo(ws[i], rng));
        }
    }
    if (out.empty()) out.push_back(ws.front());
    return join(out);
}

/// The first name is abbreviated to an initial or dropped, and the surname
/// misspelled, each with probability `rate`.
inline std::string perturb_name(const std::string& first, const std::string& last, double rate, Rng& rng) {
    std::string f = first;
    if (uniform01(rng) < rate) f = pick(rng, 2) ? first.substr(0, 1) + "." : "";
    const std::string l = uniform01(rng) < rate ? typo(last, rng) : last;
    return f.empty() ? l : f + " " + l;
}

}  // namespace corpus

/// Evidence for the citation model: CitedTitle(c), CitedIn(u) and CitedName(u)
/// for every citation c and author mention u. Each citation lists every
/// author of its publication, in a shuffled order.
inline Corpus generate_corpus(const SyntheticCorpusParams& p) {
    p.validate();
    using namespace corpus;
    Rng rng(p.seed);
    const auto& words = title_words();
    const auto& firsts = first_names();
    const auto& lasts = surnames();
    if (static_cast<std::size_t>(p.num_authors) > lasts.size()) {
        throw Error(ErrorCode::InvalidParams, "num_authors exceeds the " + std::to_string(lasts.size()) + " available surnames");
    }

    // authors: distinct surnames
    std::vector<std::size_t> order(lasts.size());
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<std::pair<std::string, std::string>> authors;
    for (int a = 0; a < p.num_authors; ++a) authors.emplace_back(firsts[pick(rng, firsts.size())], lasts[order[static_cast<std::size_t>(a)]]);

    // publications: distinct titles of 5 to 8 words without repeats
    std::set<std::string> used;
    std::vector<std::string> titles;
    std::vector<std::vector<int>> pub_authors;
    while (static_cast<int>(titles.size()) < p.num_pubs) {
        const std::size_t len = 5 + pick(rng, 4);
        std::vector<std::string> ws;
        while (ws.size() < len) {
            const auto& w = words[pick(rng, words.size())];
            if (std::find(ws.begin(), ws.end(), w) == ws.end()) ws.push_back(w);
        }
        auto t = join(ws);
        if (!used.insert(t).second) continue;
        titles.push_back(t);
        const int k = p.min_authors_per_pub + static_cast<int>(pick(rng, static_cast<std::size_t>(p.max_authors_per_pub - p.min_authors_per_pub + 1)));
        std::vector<int> as;
        while (static_cast<int>(as.size()) < k) {
            const int a = static_cast<int>(pick(rng, authors.size()));
            if (std::find(as.begin(), as.end(), a) == as.end()) as.push_back(a);
        }
        pub_authors.push_back(std::move(as));
    }

    // citations: pub of each citation, shuffled so the order carries no information
    std::vector<int> cited;
    for (int pub = 0; pub < p.num_pubs; ++pub) {
        const long n = 1 + poisson(rng, p.citations_per_pub - 1.0);
        for (long i = 0; i < n; ++i) cited.push_back(pub);
    }
    std::shuffle(cited.begin(), cited.end(), rng);

    Corpus out;
    std::vector<std::string> citation_names, mention_names;
    std::vector<std::vector<std::string>> pub_blocks(static_cast<std::size_t>(p.num_pubs));
    std::vector<std::vector<std::string>> author_blocks(static_cast<std::size_t>(p.num_authors));
    for (std::size_t c = 0; c < cited.size(); ++c) {
        const int pub = cited[c];
        const std::string cname = "c" + std::to_string(c + 1);
        citation_names.push_back(cname);
        pub_blocks[static_cast<std::size_t>(pub)].push_back(cname);
        const auto& title = titles[static_cast<std::size_t>(pub)];
        out.truth.titles[cname] = title;
        out.evidence.observe("CitedTitle", {cname}, perturb_title(title, p.title_noise, rng));
        auto as = pub_authors[static_cast<std::size_t>(pub)];
        std::shuffle(as.begin(), as.end(), rng);
        for (int a : as) {
            const std::string uname = "u" + std::to_string(mention_names.size() + 1);
            mention_names.push_back(uname);
            author_blocks[static_cast<std::size_t>(a)].push_back(uname);
            const auto& [first, last] = authors[static_cast<std::size_t>(a)];
            out.truth.names[uname] = first + " " + last;
            out.evidence.observe("CitedIn", {uname}, cname);
            out.evidence.observe("CitedName", {uname}, perturb_name(first, last, p.name_noise, rng));
        }
    }
    out.evidence.objects = {{"Citation", citation_names}, {"AuthorMention", mention_names}};
    auto nonempty = [](std::vector<std::vector<std::string>> blocks) {
        Partition part;
        for (auto& b : blocks) {
            if (!b.empty()) part.push_back(std::move(b));
        }
        return part;
    };
    out.truth.partitions["RefPub"] = nonempty(std::move(pub_blocks));
    out.truth.partitions["RefAuthor"] = nonempty(std::move(author_blocks));
    return out;
}

struct SmartiesParams {
    int colours = 6;
    int draws = 200;
    int palette = 2000;    // shades in the colour space; true colours are spread evenly over it
    double error = 0.05;   // chance a draw is seen as a neighbouring shade
    std::uint64_t seed = 1;

    void validate() const {
        if (colours < 1 || draws < 1) throw Error(ErrorCode::InvalidParams, "colours and draws must be positive");
        if (palette < 3 * colours) throw Error(ErrorCode::InvalidParams, "palette must hold at least three shades per colour");
        if (!(error >= 0.0 && error <= 1.0)) throw Error(ErrorCode::InvalidParams, "error must lie in [0, 1]");
    }
};

/// A box of Smarties: draw d picks a true colour uniformly, then is seen as
/// that shade, or with probability `error` as one of its two neighbours.
inline Corpus generate_smarties(const SmartiesParams& p) {
    p.validate();
    Rng rng(p.seed);
    Corpus out;
    std::vector<std::string> draws;
    std::vector<std::vector<std::string>> blocks(static_cast<std::size_t>(p.colours));
    const int spacing = p.palette / p.colours;
    for (int d = 0; d < p.draws; ++d) {
        const int colour = static_cast<int>(corpus::pick(rng, static_cast<std::size_t>(p.colours)));
        int shade = spacing / 2 + colour * spacing;
        const double u = uniform01(rng);
        if (u < p.error / 2) shade -= 1;
        else if (u < p.error) shade += 1;
        shade = (shade + p.palette) % p.palette;
        const std::string name = "d" + std::to_string(d + 1);
        draws.push_back(name);
        blocks[static_cast<std::size_t>(colour)].push_back(name);
        out.evidence.observe("ObsColour", {name}, "shade" + std::to_string(shade));
    }
    out.evidence.objects = {{"Draw", draws}};
    Partition part;
    for (auto& b : blocks) {
        if (!b.empty()) part.push_back(std::move(b));
    }
    out.truth.partitions["SmartieDrawn"] = std::move(part);
    return out;
}

/// Fraction of true blocks that appear exactly as a block of `predicted`.
inline double cluster_recovery(const Partition& predicted, const Partition& truth) {
    auto canon = [](const Partition& p, const char* what) {
        std::set<std::vector<std::string>> blocks;
        std::set<std::string> items;
        for (auto b : p) {
            std::sort(b.begin(), b.end());
            for (const auto& x : b) {
                if (!items.insert(x).second) throw Error(ErrorCode::ItemSetMismatch, std::string(what) + " lists '" + x + "' twice");
            }
            if (!b.empty()) blocks.insert(std::move(b));
        }
        return std::pair{blocks, items};
    };
    const auto [pb, pi] = canon(predicted, "predicted partition");
    const auto [tb, ti] = canon(truth, "true partition");
    if (pi != ti) throw Error(ErrorCode::ItemSetMismatch, "predicted and true partitions cover different items");
    if (tb.empty()) return 1.0;
    std::size_t hit = 0;
    for (const auto& b : tb) hit += pb.count(b);
    return static_cast<double>(hit) / static_cast<double>(tb.size());
}

/// Partition of a guaranteed-argument indicator's items by the atom each
/// refers to in one state. Null referents form singletons.
inline Partition sample_partition(const GroundModel& gm, const std::vector<Value>& scalars, const std::string& function) {
    const auto& net = *gm.network;
    const auto fid = gm.symbols().function_id(function);
    if (!fid) throw Error(ErrorCode::UnresolvedQuery, "unknown function '" + function + "'");
    const int f = net.function_family[static_cast<std::size_t>(*fid)];
    const auto& fam = net.family(f);
    if (fam.kind != FamilyKind::Indicator || fam.arg_types.size() != 1) {
        throw Error(ErrorCode::UnresolvedQuery, function + " is not an indicator over one guaranteed argument");
    }
    const auto& g = gm.layout.families[static_cast<std::size_t>(f)];
    std::map<std::int64_t, std::vector<std::string>> by_atom;
    Partition out;
    for (std::size_t i = 0; i < g.count; ++i) {
        const auto v = static_cast<VarId>(g.offset + i);
        const auto& name = gm.layout.names[static_cast<std::size_t>(fam.arg_types[0])][i];
        if (scalars[v].is_null()) out.push_back({name});
        else by_atom[scalars[v].data].push_back(name);
    }
    for (auto& [atom, block] : by_atom) out.push_back(std::move(block));
    return out;
}

struct RecoveryReport {
    std::size_t samples = 0;
    double per_sample = 0.0;  // recovery averaged over the trace's states
    double consensus = 0.0;   // recovery of the thresholded coreference partition
    Partition consensus_partition;
};

/// Per-state partitions of a trace. A single-state trace yields that state's partition.
inline std::vector<Partition> map_partition(const Trace& trace, const std::string& function) {
    if (trace.empty()) throw Error(ErrorCode::EmptyTrace, "no samples to summarize");
    std::vector<Partition> out;
    for (const auto& s : trace.samples) out.push_back(sample_partition(*trace.model, s.scalars, function));
    return out;
}

inline RecoveryReport evaluate_recovery(const std::vector<Partition>& per_sample, const Partition& consensus, const Partition& truth) {
    if (per_sample.empty()) throw Error(ErrorCode::EmptyTrace, "no samples to score");
    RecoveryReport r;
    r.samples = per_sample.size();
    for (const auto& p : per_sample) r.per_sample += cluster_recovery(p, truth);
    r.per_sample /= static_cast<double>(per_sample.size());
    r.consensus = cluster_recovery(consensus, truth);
    r.consensus_partition = consensus;
    return r;
}


/// Partitions read back from a trace file: column `F[x]` holds the atom of item x.
inline std::vector<Partition> trace_partitions(const TraceTable& table, const std::string& function) {
    std::vector<std::pair<std::size_t, std::string>> cols;
    const std::string prefix = function + "[";
    for (std::size_t i = 0; i < table.header.size(); ++i) {
        const auto& h = table.header[i];
        if (h.rfind(prefix, 0) == 0 && h.back() == ']') cols.emplace_back(i, h.substr(prefix.size(), h.size() - prefix.size() - 1));
    }
    if (cols.empty()) throw Error(ErrorCode::ItemSetMismatch, "trace has no " + function + " columns");
    if (table.rows.empty()) throw Error(ErrorCode::EmptyTrace, "trace has no samples");
    std::vector<Partition> out;
    for (const auto& row : table.rows) {
        std::map<std::string, std::vector<std::string>> by_atom;
        Partition p;
        for (const auto& [c, item] : cols) {
            if (row[c] == "null") p.push_back({item});
            else by_atom[row[c]].push_back(item);
        }
        for (auto& [a, b] : by_atom) p.push_back(std::move(b));
        out.push_back(std::move(p));
    }
    return out;
}

/// Consensus partition: connected components of the graph linking items that
/// share a block in more than half of the samples.
inline Partition consensus_of(const std::vector<Partition>& samples) {
    if (samples.empty()) throw Error(ErrorCode::EmptyTrace, "no samples to summarize");
    std::map<std::string, std::size_t> index;
    std::vector<std::string> items;
    for (const auto& b : samples.front()) {
        for (const auto& x : b) {
            index.emplace(x, items.size());
            items.push_back(x);
        }
    }
    const std::size_t n = items.size();
    std::vector<std::uint32_t> together(n * n, 0);
    for (const auto& p : samples) {
        for (const auto& b : p) {
            for (std::size_t i = 0; i < b.size(); ++i) {
                for (std::size_t j = i + 1; j < b.size(); ++j) {
                    const auto x = index.at(b[i]), y = index.at(b[j]);
                    ++together[x * n + y];
                    ++together[y * n + x];
                }
            }
        }
    }
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (2 * together[i * n + j] > samples.size()) parent[find(i)] = find(j);
        }
    }
    std::map<std::size_t, std::vector<std::string>> blocks;
    for (std::size_t i = 0; i < n; ++i) blocks[find(i)].push_back(items[i]);
    Partition out;
    for (auto& [r, b] : blocks) out.push_back(std::move(b));
    return out;
}

inline RecoveryReport evaluate_recovery(const Trace& trace, const std::string& function, const Partition& truth) {
    auto samples = map_partition(trace, function);
    const auto consensus = consensus_of(samples);
    return evaluate_recovery(samples, consensus, truth);
}

}  // namespace npblog
