#pragma once

// Chains: run the engine, keep thinned post-burn-in states, export traces.
//
// Trace TSV: a header row, then one row per kept sample.
//   iteration  n(T1) ... n(Tk)  f[a] ...
// n(T) columns cover every unknown type; f[a] columns hold the atom (1-based)
// chosen by each indicator whose arguments are guaranteed objects.

#include <charconv>
#include <functional>
#include <memory>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "npblog/world.hpp"

namespace npblog {

struct ChainSettings {
    std::size_t iters = 1000;
    std::size_t burnin = 0;
    std::size_t thin = 1;
    std::uint64_t seed = 1;

    void validate() const {
        if (iters <= burnin) throw Error(ErrorCode::InvalidParam, "iters must exceed burnin");
        if (thin < 1) throw Error(ErrorCode::InvalidParam, "thin must be at least 1");
    }
    std::size_t kept() const { return (iters - burnin) / thin; }
};

struct Sample {
    std::size_t iteration = 0;
    std::vector<long> counts;       // per unknown type, in Trace::types order
    std::vector<double> new_mass;   // per unknown type; NaN without a stick
    std::vector<Value> scalars;
};

struct Trace {
    std::shared_ptr<const GroundModel> model;
    ChainSettings settings;
    std::vector<int> types;
    std::vector<Sample> samples;

    std::size_t size() const { return samples.size(); }
    bool empty() const { return samples.empty(); }

    std::size_t type_column(int type) const {
        for (std::size_t i = 0; i < types.size(); ++i) {
            if (types[i] == type) return i;
        }
        throw Error(ErrorCode::UnresolvedQuery, model->symbols().type(type).name + " is not an unknown type of this model");
    }
};

inline Sample snapshot(const Engine& engine, const std::vector<int>& types, std::size_t iteration) {
    Sample s;
    s.iteration = iteration;
    for (int t : types) {
        s.counts.push_back(engine.count(t));
        s.new_mass.push_back(engine.new_object_mass(t));
    }
    s.scalars = engine.state().scalars;
    return s;
}

/// Called after every iteration with the engine and the 1-based iteration number.
using ChainObserver = std::function<void(const Engine&, std::size_t)>;

/// One chain: initialize by forward sampling, then iterate indicators,
/// attributes, sticks. Deterministic in (model, evidence, settings).
inline Trace run_chain(std::shared_ptr<const GroundModel> model, const ChainSettings& settings,
                       const ChainObserver& observer = {}) {
    settings.validate();
    Engine engine(model, settings.seed);
    engine.initialize();
    Trace trace;
    trace.model = model;
    trace.settings = settings;
    trace.types = model->network->unknown_types();
    trace.samples.reserve(settings.kept());
    for (std::size_t it = 1; it <= settings.iters; ++it) {
        engine.iterate();
        if (observer) observer(engine, it);
        if (it > settings.burnin && (it - settings.burnin) % settings.thin == 0) {
            trace.samples.push_back(snapshot(engine, trace.types, it));
        }
    }
    return trace;
}

inline Trace run_chain(std::shared_ptr<const GenerativeNetwork> network, const Evidence& evidence, const ChainSettings& settings) {
    return run_chain(std::make_shared<const GroundModel>(ground(std::move(network), evidence)), settings);
}

/// Shortest round-trip text for a double.
inline std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    char buf[32];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
    (void)ec;
    return std::string(buf, end);
}

/// Indicator variables whose arguments are all guaranteed: the trace's partition columns.
inline std::vector<VarId> trace_indicator_vars(const GroundModel& gm) {
    std::vector<VarId> out;
    const auto& net = *gm.network;
    for (std::size_t f = 0; f < net.families.size(); ++f) {
        const auto& fam = net.families[f];
        if (fam.kind != FamilyKind::Indicator) continue;
        bool guaranteed = true;
        for (int a : fam.arg_types) guaranteed = guaranteed && !net.symbols.type(a).unknown();
        if (!guaranteed) continue;
        const auto& g = gm.layout.families[f];
        for (std::size_t i = 0; i < g.count; ++i) out.push_back(static_cast<VarId>(g.offset + i));
    }
    return out;
}

inline void write_trace(std::ostream& out, const Trace& trace) {
    const auto& gm = *trace.model;
    const auto vars = trace_indicator_vars(gm);
    out << "iteration";
    for (int t : trace.types) out << "\tn(" << gm.symbols().type(t).name << ")";
    for (VarId v : vars) out << "\t" << gm.var_name(v);
    out << "\n";
    for (const auto& s : trace.samples) {
        out << s.iteration;
        for (long c : s.counts) out << "\t" << c;
        for (VarId v : vars) {
            const Value& x = s.scalars[v];
            out << "\t";
            if (x.is_null()) out << "null";
            else out << x.data + 1;
        }
        out << "\n";
    }
}

/// A trace file read back as text columns.
struct TraceTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::optional<std::size_t> column(const std::string& name) const {
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (header[i] == name) return i;
        }
        return std::nullopt;
    }

    static TraceTable parse(std::string_view text) {
        TraceTable t;
        std::istringstream in{std::string(text)};
        std::string line;
        auto cells = [](const std::string& l) {
            std::vector<std::string> out;
            std::size_t start = 0;
            while (true) {
                const auto tab = l.find('\t', start);
                out.push_back(l.substr(start, tab == std::string::npos ? std::string::npos : tab - start));
                if (tab == std::string::npos) break;
                start = tab + 1;
            }
            return out;
        };
        while (std::getline(in, line)) {
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty()) continue;
            if (t.header.empty()) {
                t.header = cells(line);
                continue;
            }
            auto row = cells(line);
            if (row.size() != t.header.size()) {
                throw Error(ErrorCode::IoError, "trace row has " + std::to_string(row.size()) + " cells, header has " +
                                                    std::to_string(t.header.size()));
            }
            t.rows.push_back(std::move(row));
        }
        if (t.header.empty() || t.header.front() != "iteration") throw Error(ErrorCode::IoError, "not a trace file: missing header");
        return t;
    }

    static TraceTable load(const std::string& path) { return parse(detail::read_file(path)); }
};

}  // namespace npblog
