#pragma once

// Evidence files and grounding.
//
// Evidence JSON:
//   {
//     "objects": {"Citation": ["c1", "c2"], ...},          optional
//     "observations": [
//       {"symbol": "CitedTitle", "args": ["c1"], "value": "a learning agent"},
//       {"symbol": "CitedIn", "args": ["u1"], "value": "c1"}
//     ]
//   }
//
// Guaranteed objects are named by strings; integers index the builtin Integer
// type. Values are typed by the function's return type.

#include <algorithm>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "npblog/config.hpp"
#include "npblog/network.hpp"

namespace npblog {

using VarId = std::uint32_t;
inline constexpr VarId kNoVar = static_cast<VarId>(-1);

struct Observation {
    std::string symbol;
    std::vector<nlohmann::json> args;
    nlohmann::json value;
};

struct Evidence {
    std::vector<std::pair<std::string, std::vector<std::string>>> objects;
    std::vector<Observation> observations;

    static Evidence from_json(const nlohmann::json& j) {
        Evidence ev;
        if (!j.is_object()) throw Error(ErrorCode::EvidenceTypeMismatch, "evidence must be a JSON object");
        if (auto it = j.find("objects"); it != j.end()) {
            if (!it->is_object()) throw Error(ErrorCode::EvidenceTypeMismatch, "'objects' must map type names to name lists");
            for (const auto& [type, names] : it->items()) {
                std::vector<std::string> list;
                if (!names.is_array()) throw Error(ErrorCode::EvidenceTypeMismatch, "objects." + type + " must be a list");
                for (const auto& n : names) {
                    if (!n.is_string()) throw Error(ErrorCode::EvidenceTypeMismatch, "objects." + type + " must list names");
                    list.push_back(n.get<std::string>());
                }
                ev.objects.emplace_back(type, std::move(list));
            }
        }
        if (auto it = j.find("observations"); it != j.end()) {
            if (!it->is_array()) throw Error(ErrorCode::EvidenceTypeMismatch, "'observations' must be a list");
            for (const auto& o : *it) {
                Observation obs;
                if (!o.is_object() || !o.contains("symbol") || !o["symbol"].is_string()) {
                    throw Error(ErrorCode::EvidenceTypeMismatch, "each observation needs a symbol");
                }
                obs.symbol = o["symbol"].get<std::string>();
                if (o.contains("args")) {
                    if (!o["args"].is_array()) throw Error(ErrorCode::EvidenceTypeMismatch, obs.symbol + ": args must be a list");
                    for (const auto& a : o["args"]) obs.args.push_back(a);
                }
                if (!o.contains("value")) throw Error(ErrorCode::EvidenceTypeMismatch, obs.symbol + ": missing value");
                obs.value = o["value"];
                ev.observations.push_back(std::move(obs));
            }
        }
        return ev;
    }

    static Evidence parse(std::string_view text) {
        try {
            return from_json(nlohmann::json::parse(text));
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorCode::EvidenceTypeMismatch, std::string("malformed evidence JSON: ") + e.what());
        }
    }
    static Evidence load(const std::string& path) { return parse(detail::read_file(path)); }

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["objects"] = nlohmann::json::object();
        for (const auto& [type, names] : objects) j["objects"][type] = names;
        j["observations"] = nlohmann::json::array();
        for (const auto& o : observations) {
            j["observations"].push_back({{"symbol", o.symbol}, {"args", o.args}, {"value", o.value}});
        }
        return j;
    }

    void observe(std::string symbol, std::vector<nlohmann::json> args, nlohmann::json value) {
        observations.push_back({std::move(symbol), std::move(args), std::move(value)});
    }
};

/// Ground variables of one family: a dense block of ids in mixed-radix order over its arguments.
struct GroundFamily {
    VarId offset = 0;
    std::size_t count = 0;
    std::vector<std::size_t> dims;
    bool vector = false;
};

class Layout {
  public:
    std::vector<std::size_t> extent;                      // per type id
    std::vector<std::vector<std::string>> names;          // guaranteed object names per type
    std::vector<std::map<std::string, std::int64_t>> name_index;
    std::vector<GroundFamily> families;                   // per network family
    std::vector<int> owner;                               // family of each variable
    std::size_t num_vars = 0;

    Value object(int type, std::int64_t index) const {
        return type == kIntegerType ? Value::integer(index) : Value::object(type, index);
    }

    /// Position of an argument value inside a type's extent.
    std::optional<std::size_t> position(int type, const Value& v) const {
        const bool ok = type == kIntegerType ? v.kind == Value::Kind::Int
                                             : v.kind == Value::Kind::Obj && v.type == type;
        if (!ok || v.data < 0 || static_cast<std::size_t>(v.data) >= extent[static_cast<std::size_t>(type)]) return std::nullopt;
        return static_cast<std::size_t>(v.data);
    }

    VarId var(int family, const std::vector<int>& arg_types, std::span<const Value> args) const {
        const auto& g = families[static_cast<std::size_t>(family)];
        std::size_t idx = 0;
        for (std::size_t i = 0; i < args.size(); ++i) {
            auto p = position(arg_types[i], args[i]);
            if (!p) return kNoVar;
            idx = idx * g.dims[i] + *p;
        }
        return static_cast<VarId>(g.offset + idx);
    }

    void args_of(VarId v, const std::vector<int>& arg_types, std::vector<Value>& out) const {
        const auto& g = families[static_cast<std::size_t>(owner[v])];
        std::size_t idx = v - g.offset;
        out.assign(g.dims.size(), Value::null());
        for (std::size_t i = g.dims.size(); i-- > 0;) {
            out[i] = object(arg_types[i], static_cast<std::int64_t>(idx % g.dims[i]));
            idx /= g.dims[i];
        }
    }

    std::string object_name(int type, const Value& v, const SymbolTable& symbols) const {
        if (v.is_null()) return "null";
        const auto t = static_cast<std::size_t>(type);
        if (type == kIntegerType || v.kind == Value::Kind::Int) return std::to_string(v.data);
        if (t < names.size() && !names[t].empty() && static_cast<std::size_t>(v.data) < names[t].size()) {
            return names[t][static_cast<std::size_t>(v.data)];
        }
        return symbols.type(type).name + "#" + std::to_string(v.data);
    }
};

/// A network grounded against evidence: extents fixed, observations typed, vocabularies bound.
struct GroundModel {
    std::shared_ptr<const GenerativeNetwork> network;
    std::shared_ptr<const DistributionRegistry> registry;
    Layout layout;
    std::vector<std::pair<VarId, Value>> observed;
    std::vector<char> is_observed;

    const SymbolTable& symbols() const { return network->symbols; }
    const Family& family_of(VarId v) const { return network->family(layout.owner[v]); }

    std::string var_name(VarId v) const {
        const auto& f = family_of(v);
        if (f.kind == FamilyKind::Stick) return "pi_" + f.name;
        if (f.kind == FamilyKind::Number) return "n(" + f.name + ")";
        std::vector<Value> args;
        layout.args_of(v, f.arg_types, args);
        std::string out = f.name + "[";
        for (std::size_t i = 0; i < args.size(); ++i) {
            out += (i ? "," : "") + layout.object_name(f.arg_types[i], args[i], symbols());
        }
        return out + "]";
    }

    std::string value_name(VarId v, const Value& x) const {
        const auto& f = family_of(v);
        switch (x.kind) {
            case Value::Kind::Null: return "null";
            case Value::Kind::Str: return string_of(x.data);
            case Value::Kind::Bool: return x.data ? "true" : "false";
            case Value::Kind::Int: return std::to_string(x.data);
            case Value::Kind::Real: return std::to_string(x.as_real());
            case Value::Kind::Obj: return layout.object_name(f.type, x, symbols());
        }
        return "?";
    }
};

namespace detail {

class Grounder {
  public:
    Grounder(std::shared_ptr<const GenerativeNetwork> net, const Evidence& ev) : net_(std::move(net)), ev_(ev) {}

    GroundModel run() {
        const auto& sym = net_->symbols;
        gm_.network = net_;
        auto& L = gm_.layout;
        L.extent.assign(sym.types.size(), 0);
        L.names.assign(sym.types.size(), {});
        L.name_index.assign(sym.types.size(), {});

        guaranteed_extents();
        for (std::size_t t = 0; t < sym.types.size(); ++t) {
            if (net_->stick_family[t] >= 0) L.extent[t] = truncation(static_cast<int>(t));
            if (net_->number_family[t] >= 0) L.extent[t] = net_->family(net_->number_family[t]).truncation;
        }

        for (const auto& f : net_->families) {
            GroundFamily g;
            g.offset = static_cast<VarId>(L.num_vars);
            g.vector = f.kind == FamilyKind::Stick || f.kind == FamilyKind::Collection;
            g.count = 1;
            for (int a : f.arg_types) {
                g.dims.push_back(L.extent[static_cast<std::size_t>(a)]);
                g.count *= g.dims.back();
            }
            L.num_vars += g.count;
            if (L.num_vars >= kNoVar) throw Error(ErrorCode::InvalidParam, "grounded model is too large");
            L.families.push_back(std::move(g));
        }
        L.owner.resize(L.num_vars);
        for (std::size_t f = 0; f < L.families.size(); ++f) {
            for (std::size_t i = 0; i < L.families[f].count; ++i) L.owner[L.families[f].offset + i] = static_cast<int>(f);
        }

        gm_.is_observed.assign(L.num_vars, 0);
        observations();
        observed_only_complete();
        bind_vocabularies();
        return std::move(gm_);
    }

  private:
    const SymbolTable& sym() const { return net_->symbols; }

    void add_name(int type, const std::string& name) {
        auto& idx = gm_.layout.name_index[static_cast<std::size_t>(type)];
        if (idx.contains(name)) return;
        idx.emplace(name, static_cast<std::int64_t>(gm_.layout.names[static_cast<std::size_t>(type)].size()));
        gm_.layout.names[static_cast<std::size_t>(type)].push_back(name);
    }

    void guaranteed_extents() {
        auto& L = gm_.layout;
        std::set<int> listed;
        for (const auto& [type_name, names] : ev_.objects) {
            const auto id = sym().type_id(type_name);
            if (!id || !sym().type(*id).guaranteed) {
                throw Error(ErrorCode::EvidenceTypeMismatch, "objects listed for '" + type_name + "', which is not a guaranteed type");
            }
            listed.insert(*id);
            for (const auto& n : names) {
                if (L.name_index[static_cast<std::size_t>(*id)].contains(n)) {
                    throw Error(ErrorCode::EvidenceTypeMismatch, "object '" + n + "' listed twice");
                }
                add_name(*id, n);
            }
        }
        // unlisted guaranteed types: names in order of first appearance
        std::int64_t max_integer = -1;
        for (const auto& obs : ev_.observations) {
            const auto fid = sym().function_id(obs.symbol);
            if (!fid) throw Error(ErrorCode::UnresolvedSymbol, "evidence refers to unknown symbol '" + obs.symbol + "'");
            const auto& fn = sym().functions[static_cast<std::size_t>(*fid)];
            if (obs.args.size() != fn.arg_types.size()) {
                throw Error(ErrorCode::EvidenceTypeMismatch, obs.symbol + " takes " + std::to_string(fn.arg_types.size()) + " arguments");
            }
            auto note = [&](int type, const nlohmann::json& j) {
                if (type == kIntegerType && j.is_number_integer()) max_integer = std::max(max_integer, j.get<std::int64_t>());
                if (sym().type(type).guaranteed && !listed.contains(type) && j.is_string()) add_name(type, j.get<std::string>());
            };
            for (std::size_t i = 0; i < obs.args.size(); ++i) note(fn.arg_types[i], obs.args[i]);
            if (!fn.collection) note(fn.return_type, obs.value);
        }
        for (std::size_t t = 0; t < sym().types.size(); ++t) {
            const auto& type = sym().types[t];
            if (type.guaranteed) {
                if (auto n = net_->config.extent(type.name); n && L.names[t].empty()) {
                    for (long i = 0; i < *n; ++i) add_name(static_cast<int>(t), type.name + std::to_string(i));
                }
                L.extent[t] = L.names[t].size();
            }
        }
        L.extent[kIntegerType] = static_cast<std::size_t>(net_->config.extent("Integer").value_or(max_integer + 1));
    }

    /// max(50, 2 x guaranteed groundings of the indicators targeting the type), unless configured.
    std::size_t truncation(int type) const {
        const auto& stick = net_->family(net_->stick_family[static_cast<std::size_t>(type)]);
        if (stick.truncation) return stick.truncation;
        std::size_t refs = 0;
        for (const auto& f : net_->families) {
            if (f.kind != FamilyKind::Indicator || f.type != type) continue;
            std::size_t n = 1;
            bool guaranteed = true;
            for (int a : f.arg_types) {
                if (sym().type(a).unknown()) guaranteed = false;
                n *= gm_.layout.extent[static_cast<std::size_t>(a)];
            }
            if (guaranteed) refs += n;
        }
        return std::max<std::size_t>(50, 2 * refs);
    }

    Value typed_value(int type, const nlohmann::json& j, const std::string& what) const {
        if (j.is_null()) return Value::null();
        const auto& t = sym().type(type);
        auto fail = [&]() -> Value {
            throw Error(ErrorCode::EvidenceTypeMismatch, what + ": expected " + t.name + ", got " + j.dump());
        };
        switch (type) {
            case kStringType: return j.is_string() ? Value::str(j.get<std::string>()) : fail();
            case kIntegerType: return j.is_number_integer() ? Value::integer(j.get<std::int64_t>()) : fail();
            case kBooleanType: return j.is_boolean() ? Value::boolean(j.get<bool>()) : fail();
            case kRealType: return j.is_number() ? Value::real(j.get<double>()) : fail();
            default: break;
        }
        if (!t.guaranteed) {
            throw Error(ErrorCode::EvidenceTypeMismatch, what + ": " + t.name + " objects are unknown and cannot be named in evidence");
        }
        if (!j.is_string()) return fail();
        const auto& idx = gm_.layout.name_index[static_cast<std::size_t>(type)];
        auto it = idx.find(j.get<std::string>());
        if (it == idx.end()) throw Error(ErrorCode::EvidenceTypeMismatch, what + ": unknown " + t.name + " object '" + j.get<std::string>() + "'");
        return Value::object(type, it->second);
    }

    void observations() {
        auto& L = gm_.layout;
        std::vector<Value> args;
        for (const auto& obs : ev_.observations) {
            const auto fid = *sym().function_id(obs.symbol);
            const auto& fn = sym().functions[static_cast<std::size_t>(fid)];
            const int family = net_->function_family[static_cast<std::size_t>(fid)];
            const auto& fam = net_->family(family);
            if (fn.collection) throw Error(ErrorCode::EvidenceTypeMismatch, obs.symbol + " is a collection and cannot be observed");
            args.clear();
            for (std::size_t i = 0; i < obs.args.size(); ++i) {
                const auto what = obs.symbol + " argument " + std::to_string(i + 1);
                if (obs.args[i].is_null()) throw Error(ErrorCode::EvidenceTypeMismatch, what + " is null");
                args.push_back(typed_value(fn.arg_types[i], obs.args[i], what));
            }
            const VarId v = L.var(family, fam.arg_types, args);
            if (v == kNoVar) throw Error(ErrorCode::EvidenceTypeMismatch, obs.symbol + ": argument outside the object extent");
            const Value x = typed_value(fn.return_type, obs.value, obs.symbol + " value");
            if (gm_.is_observed[v]) {
                auto it = std::find_if(gm_.observed.begin(), gm_.observed.end(), [&](const auto& p) { return p.first == v; });
                if (it->second != x) throw Error(ErrorCode::EvidenceTypeMismatch, obs.symbol + " observed twice with different values");
                continue;
            }
            gm_.is_observed[v] = 1;
            gm_.observed.emplace_back(v, x);
        }
    }

    void observed_only_complete() const {
        const auto& L = gm_.layout;
        for (std::size_t f = 0; f < net_->families.size(); ++f) {
            if (net_->families[f].kind != FamilyKind::Observed) continue;
            const auto& g = L.families[f];
            for (std::size_t i = 0; i < g.count; ++i) {
                if (!gm_.is_observed[g.offset + i]) {
                    throw Error(ErrorCode::MissingObservedOnly,
                                net_->families[f].name + " has no generating statement and must be observed for every argument");
                }
            }
        }
    }

    void bind_vocabularies() {
        std::map<std::string, std::vector<std::int64_t>> vocab;
        for (const auto& [dist, sources] : net_->vocabulary_sources) {
            const auto& spec = net_->registry->lookup(dist);
            if (spec.is_bound()) continue;
            std::set<std::int64_t> ids;
            std::vector<std::int64_t> ordered;
            for (const auto& [v, x] : gm_.observed) {
                if (x.kind != Value::Kind::Str) continue;
                const int fn = net_->family(gm_.layout.owner[v]).function;
                if (std::find(sources.begin(), sources.end(), fn) == sources.end()) continue;
                if (ids.insert(x.data).second) ordered.push_back(x.data);
            }
            std::sort(ordered.begin(), ordered.end(), [](auto a, auto b) { return string_of(a) < string_of(b); });
            vocab[dist] = std::move(ordered);
        }
        for (const auto& name : net_->registry->names()) {
            const auto& spec = net_->registry->lookup(name);
            if (!spec.is_bound() && !vocab.contains(name) && !net_->symbols.distributions.contains(name)) continue;
            if (!spec.is_bound() && !vocab.contains(name)) vocab[name] = {};
        }
        for (auto it = vocab.begin(); it != vocab.end();) {
            if (it->second.empty()) {
                // leave unbound; using it raises UnboundParameter
                it = vocab.erase(it);
            } else {
                ++it;
            }
        }
        gm_.registry = std::make_shared<const DistributionRegistry>(net_->registry->with_vocabularies(vocab));
    }

    std::shared_ptr<const GenerativeNetwork> net_;
    const Evidence& ev_;
    GroundModel gm_;
};

}  // namespace detail

/// Fixes extents, truncation levels and observed values; binds evidence vocabularies.
inline GroundModel ground(std::shared_ptr<const GenerativeNetwork> network, const Evidence& evidence) {
    return detail::Grounder(std::move(network), evidence).run();
}

}  // namespace npblog
