#pragma once

// Label-invariant queries over a trace. One query per line in a queries file:
//
//   CountPosterior(Pub)
//   CollectionCountPosterior(PubAuthorsDist, RefPub(c1))
//   Coreference(RefPub, c1, c2)
//   AttributePosterior(Title(RefPub(c1)))
//   NewObjectProbability(Smartie)
//
// Bare identifiers inside terms name guaranteed objects. Queries that would
// name an unknown object (a non-rigid designator) are rejected.

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "npblog/inference.hpp"
#include "npblog/parser.hpp"

namespace npblog {

struct Query {
    enum class Kind { Count, CollectionCount, Coreference, Attribute, NewObject };

    Kind kind = Kind::Count;
    std::string text;
    int type = -1;      // Count / NewObject: the unknown type; Attribute: the term's type
    int function = -1;  // CollectionCount / Coreference
    Expr term, a, b;
};

struct QueryAnswer {
    std::string query;
    bool probability = false;  // a single probability rather than a distribution
    double value = 0.0;
    std::vector<std::pair<std::string, double>> distribution;
    std::vector<double> series;  // per sample: count, indicator of the event, or mass; empty for attributes

    double mass(const std::string& outcome) const {
        for (const auto& [o, p] : distribution) {
            if (o == outcome) return p;
        }
        return 0.0;
    }
    double mean() const {
        if (series.empty()) return std::nan("");
        double s = 0.0;
        for (double x : series) s += x;
        return s / static_cast<double>(series.size());
    }
};

namespace detail {

class QueryCompiler {
  public:
    explicit QueryCompiler(const GroundModel& gm) : gm_(gm), sym_(gm.symbols()) {}

    Query compile(std::string_view text) {
        Query q;
        q.text = std::string(text);
        ast::Term t;
        try {
            t = parse_formula(text);
        } catch (const Error& e) {
            throw Error(ErrorCode::UnresolvedQuery, "cannot parse query '" + q.text + "': " + e.what());
        }
        if (t.kind != ast::Term::Kind::Apply) fail(q, "expected Name(arguments)");
        const auto& args = t.args;
        if (t.name == "CountPosterior" || t.name == "NewObjectProbability") {
            q.kind = t.name == "CountPosterior" ? Query::Kind::Count : Query::Kind::NewObject;
            if (args.size() != 1 || args[0].kind != ast::Term::Kind::Identifier) fail(q, "expects a type name");
            auto id = sym_.type_id(args[0].name);
            if (!id) fail(q, "unknown type '" + args[0].name + "'");
            q.type = *id;
            const auto& net = *gm_.network;
            const bool stick = net.stick_family[static_cast<std::size_t>(q.type)] >= 0;
            const bool number = net.number_family[static_cast<std::size_t>(q.type)] >= 0;
            if (q.kind == Query::Kind::Count && !stick && !number) fail(q, args[0].name + " is not an unknown type");
            if (q.kind == Query::Kind::NewObject && !stick) fail(q, args[0].name + " is not generated by a Dirichlet process");
            return q;
        }
        if (t.name == "Coreference") {
            q.kind = Query::Kind::Coreference;
            if (args.size() != 3 || args[0].kind != ast::Term::Kind::Identifier) fail(q, "expects (function, a, b)");
            const auto fid = sym_.function_id(args[0].name);
            if (!fid) fail(q, "unknown function '" + args[0].name + "'");
            const auto& fn = sym_.functions[static_cast<std::size_t>(*fid)];
            if (fn.arg_types.size() != 1 || fn.collection) fail(q, args[0].name + " must be a function of one argument");
            q.function = *fid;
            q.a = ground(args[1], fn.arg_types[0], q).first;
            q.b = ground(args[2], fn.arg_types[0], q).first;
            return q;
        }
        if (t.name == "CollectionCountPosterior") {
            q.kind = Query::Kind::CollectionCount;
            if (args.size() != 2 || args[0].kind != ast::Term::Kind::Identifier) fail(q, "expects (collection, term)");
            const auto fid = sym_.function_id(args[0].name);
            if (!fid || !sym_.functions[static_cast<std::size_t>(*fid)].collection) fail(q, args[0].name + " is not a collection function");
            const auto& fn = sym_.functions[static_cast<std::size_t>(*fid)];
            if (fn.arg_types.size() != 1) fail(q, args[0].name + " must be indexed by one argument");
            q.function = *fid;
            q.term = ground(args[1], fn.arg_types[0], q).first;
            return q;
        }
        if (t.name == "AttributePosterior") {
            q.kind = Query::Kind::Attribute;
            if (args.size() != 1) fail(q, "expects one term");
            auto [e, type] = ground(args[0], -1, q);
            if (type >= 0 && sym_.type(type).unknown()) {
                fail(q, "the value is a " + sym_.type(type).name + " object, which has no rigid label; ask a coreference query instead");
            }
            q.term = std::move(e);
            q.type = type;
            return q;
        }
        fail(q, "unknown query form '" + t.name + "'");
        return q;
    }

  private:
    [[noreturn]] static void fail(const Query& q, const std::string& why) {
        throw Error(ErrorCode::UnresolvedQuery, q.text + ": " + why);
    }

    std::pair<Expr, int> ground(const ast::Term& t, int expected, const Query& q) {
        Expr e;
        switch (t.kind) {
            case ast::Term::Kind::Identifier: {
                std::vector<int> types;
                if (expected >= 0) types.push_back(expected);
                else for (std::size_t i = 0; i < sym_.types.size(); ++i) types.push_back(static_cast<int>(i));
                for (int type : types) {
                    const auto& idx = gm_.layout.name_index[static_cast<std::size_t>(type)];
                    if (auto it = idx.find(t.name); it != idx.end()) {
                        e.op = Expr::Op::Literal;
                        e.literal = Value::object(type, it->second);
                        return {e, type};
                    }
                }
                fail(q, "unknown object '" + t.name + "'" + (expected >= 0 ? " of type " + sym_.type(expected).name : ""));
            }
            case ast::Term::Kind::Integer:
                e.op = Expr::Op::Literal;
                if (expected >= 0 && !sym_.type(expected).builtin) {
                    if (sym_.type(expected).unknown()) fail(q, "integer literal names an unknown object");
                    e.literal = Value::object(expected, t.integer);
                    return {e, expected};
                }
                e.literal = Value::integer(t.integer);
                return {e, kIntegerType};
            case ast::Term::Kind::Apply: {
                const auto fid = sym_.function_id(t.name);
                if (!fid) fail(q, "unknown function '" + t.name + "'");
                const auto& fn = sym_.functions[static_cast<std::size_t>(*fid)];
                if (fn.collection) fail(q, t.name + " is a collection");
                if (fn.arg_types.size() != t.args.size()) fail(q, t.name + " takes " + std::to_string(fn.arg_types.size()) + " arguments");
                if (expected >= 0 && expected != fn.return_type) {
                    fail(q, t.name + " returns " + sym_.type(fn.return_type).name + ", expected " + sym_.type(expected).name);
                }
                e.op = Expr::Op::Apply;
                e.index = *fid;
                for (std::size_t i = 0; i < t.args.size(); ++i) e.args.push_back(ground(t.args[i], fn.arg_types[i], q).first);
                return {e, fn.return_type};
            }
            default: fail(q, "unsupported term");
        }
    }

    const GroundModel& gm_;
    const SymbolTable& sym_;
};

struct SampleReader {
    const std::vector<Value>* scalars;
    Value operator()(VarId v) const { return (*scalars)[v]; }
};

}  // namespace detail

inline Query parse_query(const GroundModel& gm, std::string_view text) { return detail::QueryCompiler(gm).compile(text); }

/// Non-empty lines that are not comments (`#` or `//`).
inline std::vector<Query> parse_queries(const GroundModel& gm, std::string_view text) {
    std::vector<Query> out;
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
        line = detail::trim(line);
        if (line.empty() || line[0] == '#' || line.rfind("//", 0) == 0) continue;
        out.push_back(parse_query(gm, line));
    }
    return out;
}

/// Distinct atoms drawn from collection `cv` by the indicators of one sample.
inline std::size_t collection_usage(const GroundModel& gm, const std::vector<Value>& scalars, int collection_function, VarId cv) {
    detail::SampleReader read{&scalars};
    const auto& net = *gm.network;
    std::set<std::int64_t> atoms;
    std::array<Value, kMaxInputs> idx;
    for (std::size_t f = 0; f < net.families.size(); ++f) {
        const auto& fam = net.families[f];
        if (fam.kind != FamilyKind::Indicator) continue;
        const bool draws = std::any_of(fam.clauses.begin(), fam.clauses.end(), [&](const CompiledClause& c) {
            return c.body.kind == CompiledDraw::Kind::Collection && c.body.function == collection_function;
        });
        if (!draws) continue;
        const auto& g = gm.layout.families[f];
        std::vector<Value> bindings;
        for (std::size_t i = 0; i < g.count; ++i) {
            const auto v = static_cast<VarId>(g.offset + i);
            if (scalars[v].is_null()) continue;
            gm.layout.args_of(v, fam.arg_types, bindings);
            const auto* clause = select_clause(gm, fam, bindings, read);
            if (!clause || clause->body.kind != CompiledDraw::Kind::Collection || clause->body.function != collection_function) continue;
            bool ok = true;
            for (std::size_t j = 0; j < clause->body.index.size() && ok; ++j) {
                idx[j] = eval_expr(gm, clause->body.index[j], bindings, read);
                ok = !idx[j].is_null();
            }
            if (!ok) continue;
            const int cf = net.function_family[static_cast<std::size_t>(collection_function)];
            if (gm.layout.var(cf, net.family(cf).arg_types, std::span<const Value>(idx.data(), clause->body.index.size())) == cv) {
                atoms.insert(scalars[v].data);
            }
        }
    }
    return atoms.size();
}

namespace detail {

inline std::vector<std::pair<std::string, double>> tally(const std::vector<std::string>& outcomes, bool numeric) {
    std::map<std::string, long> counts;
    for (const auto& o : outcomes) ++counts[o];
    std::vector<std::pair<std::string, double>> out;
    for (const auto& [o, c] : counts) out.emplace_back(o, static_cast<double>(c) / static_cast<double>(outcomes.size()));
    if (numeric) {
        std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) {
            const bool xn = x.first == "null", yn = y.first == "null";
            if (xn != yn) return yn;
            if (xn) return false;
            return std::stol(x.first) < std::stol(y.first);
        });
    }
    return out;
}

}  // namespace detail

inline QueryAnswer eval_query(const Trace& trace, const Query& q) {
    if (trace.empty()) throw Error(ErrorCode::EmptyTrace, "no samples to answer " + q.text);
    const auto& gm = *trace.model;
    const auto& net = *gm.network;
    QueryAnswer ans;
    ans.query = q.text;
    std::vector<std::string> outcomes;
    switch (q.kind) {
        case Query::Kind::Count: {
            const auto col = trace.type_column(q.type);
            for (const auto& s : trace.samples) {
                ans.series.push_back(static_cast<double>(s.counts[col]));
                outcomes.push_back(std::to_string(s.counts[col]));
            }
            ans.distribution = detail::tally(outcomes, true);
            return ans;
        }
        case Query::Kind::NewObject: {
            const auto col = trace.type_column(q.type);
            ans.probability = true;
            for (const auto& s : trace.samples) ans.series.push_back(s.new_mass[col]);
            ans.value = ans.mean();
            return ans;
        }
        case Query::Kind::Coreference: {
            ans.probability = true;
            const int fid = net.function_family[static_cast<std::size_t>(q.function)];
            const auto& fam = net.family(fid);
            for (const auto& s : trace.samples) {
                detail::SampleReader read{&s.scalars};
                const Value xa = eval_expr(gm, q.a, {}, read);
                const Value xb = eval_expr(gm, q.b, {}, read);
                const VarId va = gm.layout.var(fid, fam.arg_types, std::span<const Value>(&xa, 1));
                const VarId vb = gm.layout.var(fid, fam.arg_types, std::span<const Value>(&xb, 1));
                const Value za = va == kNoVar ? Value::null() : s.scalars[va];
                const Value zb = vb == kNoVar ? Value::null() : s.scalars[vb];
                // a null referent names no object, so it corefers with nothing
                ans.series.push_back(!za.is_null() && za == zb ? 1.0 : 0.0);
            }
            ans.value = ans.mean();
            return ans;
        }
        case Query::Kind::CollectionCount: {
            const int cf = net.function_family[static_cast<std::size_t>(q.function)];
            for (const auto& s : trace.samples) {
                detail::SampleReader read{&s.scalars};
                const Value x = eval_expr(gm, q.term, {}, read);
                const VarId cv = gm.layout.var(cf, net.family(cf).arg_types, std::span<const Value>(&x, 1));
                const std::size_t n = cv == kNoVar ? 0 : collection_usage(gm, s.scalars, q.function, cv);
                ans.series.push_back(static_cast<double>(n));
                outcomes.push_back(std::to_string(n));
            }
            ans.distribution = detail::tally(outcomes, true);
            return ans;
        }
        case Query::Kind::Attribute: {
            for (const auto& s : trace.samples) {
                detail::SampleReader read{&s.scalars};
                const Value x = eval_expr(gm, q.term, {}, read);
                switch (x.kind) {
                    case Value::Kind::Null: outcomes.push_back("null"); break;
                    case Value::Kind::Str: outcomes.push_back(string_of(x.data)); break;
                    case Value::Kind::Bool: outcomes.push_back(x.data ? "true" : "false"); break;
                    case Value::Kind::Int: outcomes.push_back(std::to_string(x.data)); break;
                    case Value::Kind::Real: outcomes.push_back(format_double(x.as_real())); break;
                    case Value::Kind::Obj: outcomes.push_back(gm.layout.object_name(q.type, x, gm.symbols())); break;
                }
            }
            ans.distribution = detail::tally(outcomes, false);
            std::stable_sort(ans.distribution.begin(), ans.distribution.end(),
                             [](const auto& x, const auto& y) { return x.second > y.second; });
            return ans;
        }
    }
    return ans;
}

/// Answers pooled over several traces of the same model (samples concatenated in order).
inline Trace pool_traces(const std::vector<Trace>& traces) {
    if (traces.empty()) throw Error(ErrorCode::EmptyTrace, "no chains to pool");
    Trace out;
    out.model = traces.front().model;
    out.settings = traces.front().settings;
    out.types = traces.front().types;
    for (const auto& t : traces) out.samples.insert(out.samples.end(), t.samples.begin(), t.samples.end());
    return out;
}

/// TSV: query, outcome, probability. Single probabilities use the outcome "true".
inline void write_answers(std::ostream& out, const std::vector<QueryAnswer>& answers) {
    out << "query\toutcome\tprobability\n";
    for (const auto& a : answers) {
        if (a.probability) {
            out << a.query << "\ttrue\t" << format_double(a.value) << "\n";
            continue;
        }
        for (const auto& [o, p] : a.distribution) out << a.query << "\t" << o << "\t" << format_double(p) << "\n";
    }
}

/// Histogram of n(T) over the trace: one row per count value.
inline void write_histogram(std::ostream& out, const Trace& trace, int type) {
    const auto col = trace.type_column(type);
    std::map<long, long> h;
    for (const auto& s : trace.samples) ++h[s.counts[col]];
    out << "n\tfrequency\tprobability\n";
    for (const auto& [n, c] : h) {
        out << n << "\t" << c << "\t" << format_double(static_cast<double>(c) / static_cast<double>(trace.size())) << "\n";
    }
}

}  // namespace npblog
