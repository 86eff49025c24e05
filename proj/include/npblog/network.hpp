#pragma once

// Compilation of a resolved program into variable families:
//
//   StickFamily(t)        pi_t ~ Stick(alpha_t), one per dpImplicit type
//   AttributeFamily(f)    phi_f[x] drawn by f's statement, one variable per argument tuple
//   IndicatorFamily(f)    z_f[x], an unknown object; by default z_f[x] ~ pi_t
//   CollectionFamily(f)   phi_f[x] ~ Dirichlet(alpha_f pi_t) for functions returning M(t)
//   NumberFamily(t)       n(t) under a number statement, forward sampled only
//   ObservedFamily(f)     symbols without a generator that must be observed
//
// Families with unknown-typed arguments are grounded over the truncated atoms
// of that type, and over the extension of every guaranteed argument.

#include <algorithm>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "npblog/ast.hpp"
#include "npblog/config.hpp"
#include "npblog/distributions.hpp"
#include "npblog/exchangeability.hpp"
#include "npblog/parser.hpp"
#include "npblog/printer.hpp"
#include "npblog/symbols.hpp"

namespace npblog {

/// A term compiled against a statement's logical variables.
struct Expr {
    enum class Op : std::uint8_t { Var, Literal, Apply, Less, Eq, Neq, Add, Sub, Null };

    Op op = Op::Null;
    int index = -1;  // Var: variable position; Apply: function id
    Value literal;
    std::vector<Expr> args;
};

struct CompiledDraw {
    enum class Kind { Null, Registry, ExtensionUniform, Collection, Stick };

    Kind kind = Kind::Null;
    std::size_t dist = 0;      // Registry: registry position
    std::vector<Expr> inputs;  // Registry: paren then brace arguments
    int type = -1;             // ExtensionUniform / Stick / Collection: object type drawn
    int function = -1;         // Collection: the collection function
    std::vector<Expr> index;   // Collection: which collection vector
};

struct CompiledClause {
    std::optional<Expr> condition;
    CompiledDraw body;
};

enum class FamilyKind { Stick, Attribute, Indicator, Collection, Number, Observed };

inline const char* family_kind_name(FamilyKind k) {
    switch (k) {
        case FamilyKind::Stick: return "StickFamily";
        case FamilyKind::Attribute: return "AttributeFamily";
        case FamilyKind::Indicator: return "IndicatorFamily";
        case FamilyKind::Collection: return "CollectionFamily";
        case FamilyKind::Number: return "NumberFamily";
        case FamilyKind::Observed: return "ObservedFamily";
    }
    return "";
}

struct Family {
    FamilyKind kind = FamilyKind::Attribute;
    std::string name;       // function name, or type name for sticks and numbers
    int function = -1;
    int type = -1;          // value type: stick/number owner, indicator target, collection element
    std::vector<int> arg_types;
    double alpha = 0.0;     // sticks and collections
    std::size_t truncation = 0;  // sticks and numbers; 0 means derive from evidence
    std::vector<CompiledClause> clauses;
    std::optional<std::size_t> statement;
    std::vector<int> parents;  // family ids
    std::string body;          // source form of the draw

    std::string label() const { return std::string(family_kind_name(kind)) + "(" + name + ")"; }
};

class GenerativeNetwork {
  public:
    SymbolTable symbols;
    std::shared_ptr<const DistributionRegistry> registry;
    ModelConfig config;
    std::vector<Family> families;
    std::vector<int> function_family;  // by function id, -1 if none
    std::vector<int> stick_family;     // by type id
    std::vector<int> number_family;    // by type id
    /// Functions whose observed values make up each evidence-bound distribution's vocabulary.
    std::map<std::string, std::vector<int>> vocabulary_sources;

    const Family& family(int id) const { return families.at(static_cast<std::size_t>(id)); }
    const Family* family_of(const std::string& function) const {
        auto id = symbols.function_id(function);
        if (!id || function_family[static_cast<std::size_t>(*id)] < 0) return nullptr;
        return &families[static_cast<std::size_t>(function_family[static_cast<std::size_t>(*id)])];
    }
    const Family* find(const std::string& label) const {
        for (const auto& f : families) {
            if (f.label() == label) return &f;
        }
        return nullptr;
    }
    bool has_number_families() const {
        return std::any_of(families.begin(), families.end(), [](const Family& f) { return f.kind == FamilyKind::Number; });
    }

    /// Unknown types with a stick or number family, in type order.
    std::vector<int> unknown_types() const {
        std::vector<int> out;
        for (std::size_t t = 0; t < symbols.types.size(); ++t) {
            if (stick_family[t] >= 0 || number_family[t] >= 0) out.push_back(static_cast<int>(t));
        }
        return out;
    }

    /// Families grouped by argument-type tuple, as in the K-statement blocks.
    std::map<std::vector<int>, std::vector<int>> attribute_groups() const {
        std::map<std::vector<int>, std::vector<int>> out;
        for (std::size_t i = 0; i < families.size(); ++i) {
            if (families[i].kind == FamilyKind::Attribute) out[families[i].arg_types].push_back(static_cast<int>(i));
        }
        return out;
    }

    /// The family housing a model symbol: alpha_T, pi_T, n(T), phi_f, z_f, alpha_f.
    std::vector<int> housing(const std::string& symbol) const {
        std::vector<int> out;
        for (std::size_t i = 0; i < families.size(); ++i) {
            const auto& f = families[i];
            bool match = false;
            switch (f.kind) {
                case FamilyKind::Stick:
                    match = symbol == "alpha_" + f.name || symbol == "pi_" + f.name || symbol == "n(" + f.name + ")";
                    break;
                case FamilyKind::Number: match = symbol == "n(" + f.name + ")"; break;
                case FamilyKind::Attribute: match = symbol == "phi_" + f.name; break;
                case FamilyKind::Indicator: match = symbol == "z_" + f.name; break;
                case FamilyKind::Collection: match = symbol == "phi_" + f.name || symbol == "alpha_" + f.name; break;
                case FamilyKind::Observed: match = symbol == f.name; break;
            }
            if (match) out.push_back(static_cast<int>(i));
        }
        return out;
    }

    std::string args_string(const std::vector<int>& types) const {
        std::string out;
        for (std::size_t i = 0; i < types.size(); ++i) out += (i ? ", " : "") + symbols.type(types[i]).name;
        return out;
    }

    /// Text inventory of the compiled network.
    std::string describe() const {
        std::ostringstream out;
        out << "types:\n";
        for (const auto& t : symbols.types) {
            if (t.builtin) continue;
            out << "  " << t.name << "  " << (t.guaranteed ? "guaranteed" : generation_mode_name(t.mode)) << "\n";
        }
        out << "functions:\n";
        for (const auto& f : symbols.functions) {
            out << "  " << f.name << " : " << symbols.signature_string(f) << "  [" << return_kind_name(f.kind) << "]\n";
        }
        out << "families:\n";
        for (const auto& f : families) {
            out << "  " << f.label();
            switch (f.kind) {
                case FamilyKind::Stick:
                    out << " alpha=" << f.alpha << " truncation=" << (f.truncation ? std::to_string(f.truncation) : "auto");
                    break;
                case FamilyKind::Collection:
                    out << " ~ Dirichlet(alpha=" << f.alpha << " * pi_" << symbols.type(f.type).name << ") over ("
                        << args_string(f.arg_types) << ")";
                    break;
                case FamilyKind::Number: out << " ~ " << f.body << " capacity=" << f.truncation; break;
                case FamilyKind::Observed: out << " over (" << args_string(f.arg_types) << ") observed"; break;
                case FamilyKind::Attribute:
                case FamilyKind::Indicator:
                    out << " ~ " << f.body << " over (" << args_string(f.arg_types) << ")";
                    if (f.kind == FamilyKind::Indicator) out << " -> " << symbols.type(f.type).name;
                    break;
            }
            if (!f.parents.empty()) {
                out << "  parents:";
                for (int p : f.parents) out << " " << family(p).label();
            }
            out << "\n";
        }
        const auto groups = attribute_groups();
        if (!groups.empty()) {
            out << "attribute groups:\n";
            for (const auto& [types, members] : groups) {
                out << "  (" << args_string(types) << "):";
                for (int m : members) out << " " << family(m).name;
                out << "\n";
            }
        }
        return out.str();
    }
};

namespace detail {

class NetworkBuilder {
  public:
    NetworkBuilder(const ast::Program& program, const SymbolTable& symbols, const ModelConfig& config,
                   std::shared_ptr<const DistributionRegistry> registry)
        : program_(program) {
        net_.symbols = symbols;
        net_.config = config;
        net_.registry = std::move(registry);
    }

    GenerativeNetwork run() {
        const auto& sym = net_.symbols;
        net_.function_family.assign(sym.functions.size(), -1);
        net_.stick_family.assign(sym.types.size(), -1);
        net_.number_family.assign(sym.types.size(), -1);

        for (std::size_t t = 0; t < sym.types.size(); ++t) {
            const auto& type = sym.types[t];
            if (type.mode == GenerationMode::DpImplicit) {
                Family f;
                f.kind = FamilyKind::Stick;
                f.name = type.name;
                f.type = static_cast<int>(t);
                f.alpha = net_.config.alpha(type.name);
                f.truncation = static_cast<std::size_t>(net_.config.truncation(type.name).value_or(0));
                f.body = "Stick(alpha_" + type.name + ")";
                net_.stick_family[t] = add(std::move(f));
            }
        }
        for (std::size_t t = 0; t < sym.types.size(); ++t) {
            const auto& type = sym.types[t];
            if (type.mode != GenerationMode::NumberStatement) continue;
            const auto& stmt = program_.statements[*type.number_statement];
            const auto& num = std::get<ast::NumberStatement>(stmt.node);
            Family f;
            f.kind = FamilyKind::Number;
            f.name = type.name;
            f.type = static_cast<int>(t);
            f.statement = type.number_statement;
            f.truncation = static_cast<std::size_t>(net_.config.truncation(type.name).value_or(100));
            CompiledClause c;
            c.body.kind = CompiledDraw::Kind::Registry;
            c.body.dist = *net_.registry->index_of(num.draw.dist);
            f.clauses.push_back(std::move(c));
            f.body = detail::print_draw(num.draw);
            net_.number_family[t] = add(std::move(f));
        }

        for (std::size_t fid = 0; fid < sym.functions.size(); ++fid) {
            const auto& fn = sym.functions[fid];
            net_.function_family[fid] = add(function_family(fn, static_cast<int>(fid)));
        }
        for (auto& f : net_.families) f.parents = parents_of(f);
        check_cycles();
        vocabulary_sources();
        return std::move(net_);
    }

  private:
    int add(Family f) {
        net_.families.push_back(std::move(f));
        return static_cast<int>(net_.families.size()) - 1;
    }

    Position statement_pos(const FunctionInfo& fn) const {
        return fn.generator ? program_.statements[*fn.generator].pos : fn.pos;
    }

    Family function_family(const FunctionInfo& fn, int fid) {
        const auto& sym = net_.symbols;
        Family f;
        f.name = fn.name;
        f.function = fid;
        f.arg_types = fn.arg_types;
        f.type = fn.return_type;
        f.statement = fn.generator;
        const auto& target = sym.type(fn.return_type);
        const Position pos = statement_pos(fn);

        if (fn.kind == ReturnKind::ObjectDistribution) {
            if (fn.generator) {
                throw Error(ErrorCode::UnsupportedForm, fn.name + ": collection functions take the default Dirichlet prior only", pos);
            }
            if (target.mode != GenerationMode::DpImplicit) {
                throw Error(ErrorCode::UnsupportedForm,
                            fn.name + " returns M(" + target.name + ") but " + target.name + " is not generated by a Dirichlet process", pos);
            }
            f.kind = FamilyKind::Collection;
            f.alpha = net_.config.alpha(fn.name);
            f.body = "Dirichlet(alpha_" + fn.name + " pi_" + target.name + ")";
            return f;
        }

        if (!fn.generator) {
            if (fn.default_process == DefaultProcess::Indicator) {
                f.kind = FamilyKind::Indicator;
                CompiledClause c;
                c.body.kind = CompiledDraw::Kind::Stick;
                c.body.type = fn.return_type;
                f.clauses.push_back(std::move(c));
                f.body = "pi_" + target.name;
                return f;
            }
            if (fn.kind == ReturnKind::Object && target.unknown()) {
                throw Error(ErrorCode::UnsupportedForm,
                            fn.name + " returns " + target.name + ", which has no Dirichlet process to draw from", pos);
            }
            for (int a : fn.arg_types) {
                if (sym.type(a).unknown()) {
                    throw Error(ErrorCode::UnsupportedForm,
                                fn.name + " has no dependency statement and ranges over unknown " + sym.type(a).name +
                                    " objects, so it cannot be observed",
                                pos);
                }
            }
            f.kind = FamilyKind::Observed;
            f.body = "observed";
            return f;
        }

        const auto& stmt = program_.statements[*fn.generator];
        const auto& dep = std::get<ast::DependencyStatement>(stmt.node);
        const bool indicator = fn.kind == ReturnKind::Object && target.unknown();
        f.kind = indicator ? FamilyKind::Indicator : FamilyKind::Attribute;
        if (indicator && target.mode == GenerationMode::None) {
            throw Error(ErrorCode::UnsupportedForm, fn.name + " returns " + target.name + ", which has no generation mode", stmt.pos);
        }

        vars_.clear();
        for (std::size_t i = 0; i < dep.variables.size(); ++i) vars_[dep.variables[i]] = static_cast<int>(i);
        bool has_default = false;
        bool all_null = true;
        for (const auto& clause : dep.clauses) {
            CompiledClause c;
            if (clause.condition) c.condition = expr(*clause.condition);
            else has_default = true;
            c.body = draw(clause.body, fn);
            if (!clause.body.is_null) all_null = false;
            f.clauses.push_back(std::move(c));
        }
        if (!has_default) {
            CompiledClause c;
            if (all_null && indicator && target.mode == GenerationMode::DpImplicit) {
                c.body.kind = CompiledDraw::Kind::Stick;
                c.body.type = fn.return_type;
            }
            f.clauses.push_back(std::move(c));
        }
        std::string text = print_statement(stmt);
        const auto head = text.find(')');
        text = head == std::string::npos ? text : text.substr(head + 1);
        while (!text.empty() && (text.front() == ' ' || text.front() == '~')) text.erase(text.begin());
        if (!text.empty() && text.back() == ';') text.pop_back();
        f.body = text;
        check_self_reference(f, dep, stmt.pos);
        return f;
    }

    CompiledDraw draw(const ast::Body& body, const FunctionInfo& fn) {
        const auto& sym = net_.symbols;
        CompiledDraw d;
        if (body.is_null) return d;
        const auto& dr = body.draw;
        if (is_extension_uniform(dr)) {
            d.kind = CompiledDraw::Kind::ExtensionUniform;
            d.type = sym.require_type(dr.paren_args[0].type_name, dr.pos);
            if (sym.type(d.type).mode == GenerationMode::DpImplicit) {
                throw Error(ErrorCode::UnsupportedForm,
                            "Uniform over " + sym.type(d.type).name + " objects needs a number statement or guaranteed objects", dr.pos);
            }
            if (sym.type(d.type).builtin) {
                throw Error(ErrorCode::UnsupportedForm, "Uniform over builtin type " + sym.type(d.type).name, dr.pos);
            }
            return d;
        }
        if (auto idx = net_.registry->index_of(dr.dist)) {
            d.kind = CompiledDraw::Kind::Registry;
            d.dist = *idx;
            for (const auto& t : dr.paren_args) d.inputs.push_back(expr(t));
            for (const auto& t : dr.brace_args) d.inputs.push_back(expr(t));
            return d;
        }
        const auto& g = sym.function(dr.dist);
        if (g.kind != ReturnKind::ObjectDistribution) {
            throw Error(ErrorCode::UnsupportedForm, dr.dist + " is not a distribution or collection", dr.pos);
        }
        if (!dr.brace_args.empty()) {
            throw Error(ErrorCode::UnsupportedForm, "collection " + dr.dist + " takes no density arguments", dr.pos);
        }
        d.kind = CompiledDraw::Kind::Collection;
        d.function = *sym.function_id(dr.dist);
        d.type = g.return_type;
        for (const auto& t : dr.paren_args) d.index.push_back(expr(t));
        (void)fn;
        return d;
    }

    Expr expr(const ast::Term& t) {
        const auto& sym = net_.symbols;
        using K = ast::Term::Kind;
        Expr e;
        switch (t.kind) {
            case K::Identifier: {
                auto it = vars_.find(t.name);
                if (it == vars_.end()) throw Error(ErrorCode::UnresolvedSymbol, "unknown identifier '" + t.name + "'", t.pos);
                e.op = Expr::Op::Var;
                e.index = it->second;
                return e;
            }
            case K::Integer: {
                e.op = Expr::Op::Literal;
                const int type = sym.literal_type(t);
                e.literal = sym.type(type).builtin ? Value::integer(t.integer) : Value::object(type, t.integer);
                return e;
            }
            case K::Null: return e;
            case K::TypedVar:
                throw Error(ErrorCode::UnsupportedForm, "typed variable outside Uniform(...)", t.pos);
            case K::Binary: {
                e.op = t.op == "=" ? Expr::Op::Eq : t.op == "!=" ? Expr::Op::Neq : t.op == "-" ? Expr::Op::Sub : Expr::Op::Add;
                e.args.push_back(expr(t.args[0]));
                e.args.push_back(expr(t.args[1]));
                return e;
            }
            case K::Apply: {
                if (is_builtin_predicate(t.name)) {
                    e.op = Expr::Op::Less;
                } else {
                    const auto& fn = sym.function(t.name);
                    if (fn.kind == ReturnKind::ObjectDistribution) {
                        throw Error(ErrorCode::UnsupportedForm, "collection " + t.name + " used as a value", t.pos);
                    }
                    e.op = Expr::Op::Apply;
                    e.index = *sym.function_id(t.name);
                }
                for (const auto& a : t.args) e.args.push_back(expr(a));
                return e;
            }
        }
        return e;
    }

    /// Self-reference is allowed only as f(..., x - k, ...) with x a guaranteed index and k > 0.
    void check_self_reference(const Family& f, const ast::DependencyStatement&, Position pos) {
        std::function<void(const Expr&)> visit = [&](const Expr& e) {
            if (e.op == Expr::Op::Apply && e.index == f.function) {
                if (!decreasing(e, f)) {
                    throw Error(ErrorCode::CycleDetected, f.name + " depends on itself without a decreasing guaranteed index", pos);
                }
            }
            for (const auto& a : e.args) visit(a);
        };
        for (const auto& c : f.clauses) {
            if (c.condition) visit(*c.condition);
            for (const auto& e : c.body.inputs) visit(e);
            for (const auto& e : c.body.index) visit(e);
        }
    }

    bool decreasing(const Expr& call, const Family& f) const {
        for (std::size_t i = 0; i < call.args.size(); ++i) {
            const auto& a = call.args[i];
            if (a.op == Expr::Op::Sub && a.args[0].op == Expr::Op::Var && a.args[0].index == static_cast<int>(i) &&
                a.args[1].op == Expr::Op::Literal && a.args[1].literal.data > 0 &&
                !net_.symbols.type(f.arg_types[i]).unknown()) {
                return true;
            }
        }
        return false;
    }

    std::vector<int> parents_of(const Family& f) const {
        std::set<int> out;
        std::function<void(const Expr&)> visit = [&](const Expr& e) {
            if (e.op == Expr::Op::Apply) out.insert(net_.function_family[static_cast<std::size_t>(e.index)]);
            for (const auto& a : e.args) visit(a);
        };
        if (f.kind == FamilyKind::Collection) out.insert(net_.stick_family[static_cast<std::size_t>(f.type)]);
        for (const auto& c : f.clauses) {
            if (c.condition) visit(*c.condition);
            for (const auto& e : c.body.inputs) visit(e);
            for (const auto& e : c.body.index) visit(e);
            switch (c.body.kind) {
                case CompiledDraw::Kind::Stick: out.insert(net_.stick_family[static_cast<std::size_t>(c.body.type)]); break;
                case CompiledDraw::Kind::Collection:
                    out.insert(net_.function_family[static_cast<std::size_t>(c.body.function)]);
                    break;
                case CompiledDraw::Kind::ExtensionUniform:
                    if (net_.number_family[static_cast<std::size_t>(c.body.type)] >= 0) {
                        out.insert(net_.number_family[static_cast<std::size_t>(c.body.type)]);
                    }
                    break;
                default: break;
            }
        }
        // attributes of counted objects exist only once the count is drawn
        if (f.kind == FamilyKind::Attribute || f.kind == FamilyKind::Indicator) {
            for (int a : f.arg_types) {
                if (net_.number_family[static_cast<std::size_t>(a)] >= 0) out.insert(net_.number_family[static_cast<std::size_t>(a)]);
            }
        }
        const int self = static_cast<int>(&f - net_.families.data());
        out.erase(self);
        out.erase(-1);
        return {out.begin(), out.end()};
    }

    void check_cycles() const {
        const auto n = net_.families.size();
        std::vector<int> state(n, 0);
        std::vector<int> stack;
        std::function<void(int)> dfs = [&](int v) {
            state[static_cast<std::size_t>(v)] = 1;
            stack.push_back(v);
            for (int p : net_.families[static_cast<std::size_t>(v)].parents) {
                if (state[static_cast<std::size_t>(p)] == 1) {
                    std::string path;
                    auto it = std::find(stack.begin(), stack.end(), p);
                    for (; it != stack.end(); ++it) path += net_.families[static_cast<std::size_t>(*it)].name + " -> ";
                    path += net_.families[static_cast<std::size_t>(p)].name;
                    throw Error(ErrorCode::CycleDetected, "dependency cycle: " + path);
                }
                if (state[static_cast<std::size_t>(p)] == 0) dfs(p);
            }
            stack.pop_back();
            state[static_cast<std::size_t>(v)] = 2;
        };
        for (std::size_t v = 0; v < n; ++v) {
            if (state[v] == 0) dfs(static_cast<int>(v));
        }
    }

    /// Vocabulary of D: observed values of functions drawn from D, and of functions
    /// whose density inputs read a function drawn from D.
    void vocabulary_sources() {
        const auto& reg = *net_.registry;
        std::map<std::size_t, std::set<int>> generated_by;
        for (const auto& f : net_.families) {
            for (const auto& c : f.clauses) {
                if (c.body.kind == CompiledDraw::Kind::Registry && f.function >= 0) generated_by[c.body.dist].insert(f.function);
            }
        }
        for (const auto& [dist, generated] : generated_by) {
            if (!reg.at(dist).needs_vocabulary()) continue;
            std::set<int> sources = generated;
            for (const auto& f : net_.families) {
                if (f.function < 0) continue;
                for (const auto& c : f.clauses) {
                    if (c.body.kind != CompiledDraw::Kind::Registry) continue;
                    std::function<bool(const Expr&)> reads = [&](const Expr& e) {
                        if (e.op == Expr::Op::Apply && generated.contains(e.index)) return true;
                        return std::any_of(e.args.begin(), e.args.end(), reads);
                    };
                    if (std::any_of(c.body.inputs.begin(), c.body.inputs.end(), reads)) sources.insert(f.function);
                }
            }
            net_.vocabulary_sources[reg.at(dist).name()] = {sources.begin(), sources.end()};
        }
    }

    const ast::Program& program_;
    GenerativeNetwork net_;
    std::map<std::string, int> vars_;
};

}  // namespace detail

inline GenerativeNetwork build_network(const ast::Program& program, const SymbolTable& symbols, const ModelConfig& config,
                                       std::shared_ptr<const DistributionRegistry> registry) {
    return detail::NetworkBuilder(program, symbols, config, std::move(registry)).run();
}

inline GenerativeNetwork build_network(const ast::Program& program, const SymbolTable& symbols, const ModelConfig& config) {
    return build_network(program, symbols, config,
                         std::make_shared<const DistributionRegistry>(DistributionRegistry::from_config(config)));
}

/// Parsed, resolved and compiled model.
struct Model {
    ast::Program program;
    std::shared_ptr<const DistributionRegistry> registry;
    std::shared_ptr<const GenerativeNetwork> network;
    std::vector<Violation> violations;
};

/// parse -> resolve -> validate -> build. Exchangeability violations raise
/// ExchangeabilityViolation with the first offending term.
inline Model compile_model(std::string_view source, const ModelConfig& config, std::string source_name = {}) {
    Model m;
    m.program = parse_source(source, std::move(source_name));
    m.registry = std::make_shared<const DistributionRegistry>(DistributionRegistry::from_config(config));
    const auto symbols = resolve_symbols(m.program, *m.registry);
    m.violations = validate_exchangeability(m.program, symbols);
    if (!m.violations.empty()) {
        const auto& v = m.violations.front();
        throw Error(ErrorCode::ExchangeabilityViolation, v.message(), v.pos);
    }
    m.network = std::make_shared<const GenerativeNetwork>(build_network(m.program, symbols, config, m.registry));
    return m;
}

}  // namespace npblog
