#pragma once

// Symbol resolution. Function signatures are declared or inferred from use by
// unification: every argument and return position of every function is a type
// slot, and each statement constrains slots to be equal, to name a type, or to
// be a collection M(t) of another slot.

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "npblog/ast.hpp"
#include "npblog/distributions.hpp"
#include "npblog/error.hpp"
#include "npblog/printer.hpp"

namespace npblog {

enum class GenerationMode { None, NumberStatement, DpImplicit };
enum class ReturnKind { Object, ObjectDistribution, Value };

inline const char* generation_mode_name(GenerationMode m) {
    switch (m) {
        case GenerationMode::None: return "none";
        case GenerationMode::NumberStatement: return "numberStatement";
        case GenerationMode::DpImplicit: return "dpImplicit";
    }
    return "";
}

inline const char* return_kind_name(ReturnKind k) {
    switch (k) {
        case ReturnKind::Object: return "object";
        case ReturnKind::ObjectDistribution: return "objectDistribution";
        case ReturnKind::Value: return "value";
    }
    return "";
}

struct TypeInfo {
    std::string name;
    bool builtin = false;
    bool guaranteed = false;
    GenerationMode mode = GenerationMode::None;
    std::optional<std::size_t> number_statement;
    Position pos;

    bool unknown() const { return !builtin && !guaranteed; }
};

/// How a function without a generating statement gets its values.
enum class DefaultProcess { None, Indicator, Collection, ObservedOnly };

struct FunctionInfo {
    std::string name;
    std::vector<int> arg_types;
    int return_type = -1;  // element type for collections
    bool collection = false;
    ReturnKind kind = ReturnKind::Value;
    bool declared = false;
    std::optional<std::size_t> generator;  // statement index
    DefaultProcess default_process = DefaultProcess::None;
    Position pos;
};

struct DistributionUse {
    std::string name;
    std::vector<std::string> users;
};

inline constexpr int kStringType = 0;
inline constexpr int kIntegerType = 1;
inline constexpr int kBooleanType = 2;
inline constexpr int kRealType = 3;

class SymbolTable {
  public:
    std::vector<TypeInfo> types;
    std::vector<FunctionInfo> functions;
    std::map<std::string, DistributionUse> distributions;
    /// Resolved type of each integer literal, keyed by source offset.
    std::map<std::size_t, int> literal_types;

    std::optional<int> type_id(const std::string& name) const {
        if (auto it = type_index_.find(name); it != type_index_.end()) return it->second;
        return std::nullopt;
    }
    int require_type(const std::string& name, Position pos = {}) const {
        if (auto id = type_id(name)) return *id;
        throw Error(ErrorCode::UnresolvedSymbol, "unknown type '" + name + "'", pos);
    }
    std::optional<int> function_id(const std::string& name) const {
        if (auto it = function_index_.find(name); it != function_index_.end()) return it->second;
        return std::nullopt;
    }
    const FunctionInfo& function(const std::string& name) const {
        if (auto id = function_id(name)) return functions[static_cast<std::size_t>(*id)];
        throw Error(ErrorCode::UnresolvedSymbol, "unknown function '" + name + "'");
    }
    const TypeInfo& type(int id) const { return types.at(static_cast<std::size_t>(id)); }
    bool is_distribution(const std::string& name) const { return distributions.contains(name); }

    int literal_type(const ast::Term& t) const {
        if (auto it = literal_types.find(t.pos.offset); it != literal_types.end()) return it->second;
        return kIntegerType;
    }

    std::string type_string(const FunctionInfo& f) const {
        const auto& ret = types[static_cast<std::size_t>(f.return_type)].name;
        return f.collection ? "M(" + ret + ")" : ret;
    }
    std::string signature_string(const FunctionInfo& f) const {
        std::string out = "(";
        for (std::size_t i = 0; i < f.arg_types.size(); ++i) {
            out += (i ? ", " : "") + types[static_cast<std::size_t>(f.arg_types[i])].name;
        }
        return out + ") -> " + type_string(f);
    }

    int add_type(TypeInfo t) {
        const int id = static_cast<int>(types.size());
        type_index_.emplace(t.name, id);
        types.push_back(std::move(t));
        return id;
    }
    int add_function(FunctionInfo f) {
        const int id = static_cast<int>(functions.size());
        function_index_.emplace(f.name, id);
        functions.push_back(std::move(f));
        return id;
    }

  private:
    std::map<std::string, int> type_index_;
    std::map<std::string, int> function_index_;
};

/// `Uniform(Author a)`: uniform over the extension of a type.
inline bool is_extension_uniform(const ast::Draw& d) {
    return d.dist == "Uniform" && d.paren_args.size() == 1 && d.paren_args[0].kind == ast::Term::Kind::TypedVar &&
           d.brace_args.empty();
}

inline bool is_builtin_predicate(const std::string& name) { return name == "Less"; }

namespace detail {

class TypeUnifier {
  public:
    struct Slot {
        int parent;
        std::optional<std::string> name;
        int element = -1;  // collection of this slot
    };

    int fresh() {
        slots_.push_back({static_cast<int>(slots_.size()), std::nullopt, -1});
        return static_cast<int>(slots_.size()) - 1;
    }
    int named(const std::string& type) {
        const int s = fresh();
        slots_[static_cast<std::size_t>(s)].name = type;
        return s;
    }
    int collection_of(int element) {
        const int s = fresh();
        slots_[static_cast<std::size_t>(s)].element = element;
        return s;
    }

    int find(int s) {
        while (slots_[static_cast<std::size_t>(s)].parent != s) {
            auto& p = slots_[static_cast<std::size_t>(s)].parent;
            p = slots_[static_cast<std::size_t>(p)].parent;
            s = p;
        }
        return s;
    }

    /// Returns false on conflict.
    bool unify(int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b) return true;
        auto& sa = slots_[static_cast<std::size_t>(a)];
        auto& sb = slots_[static_cast<std::size_t>(b)];
        if (sa.name && sb.name) {
            if (*sa.name != *sb.name) return false;
        } else if ((sa.name && sb.element >= 0) || (sb.name && sa.element >= 0)) {
            return false;
        }
        const auto name = sa.name ? sa.name : sb.name;
        const int ea = sa.element;
        const int eb = sb.element;
        sb.parent = a;
        sa.name = name;
        sa.element = ea >= 0 ? ea : eb;
        if (ea >= 0 && eb >= 0) return unify(ea, eb);
        return true;
    }

    std::string describe(int s) {
        s = find(s);
        const auto& slot = slots_[static_cast<std::size_t>(s)];
        if (slot.name) return *slot.name;
        if (slot.element >= 0) return "M(" + describe(slot.element) + ")";
        return "?";
    }

    std::optional<std::string> name(int s) { return slots_[static_cast<std::size_t>(find(s))].name; }
    int element(int s) { return slots_[static_cast<std::size_t>(find(s))].element; }

  private:
    std::vector<Slot> slots_;
};

class Resolver {
  public:
    Resolver(const ast::Program& program, const DistributionRegistry& registry) : program_(program), registry_(registry) {}

    SymbolTable run() {
        for (const char* builtin : {"String", "Integer", "Boolean", "Real"}) {
            TypeInfo t;
            t.name = builtin;
            t.builtin = true;
            table_.add_type(std::move(t));
        }
        declare_types();
        for (std::size_t i = 0; i < program_.statements.size(); ++i) {
            const auto& stmt = program_.statements[i];
            if (const auto* decl = std::get_if<ast::FunctionDecl>(&stmt.node)) declaration(*decl, stmt.pos);
        }
        for (std::size_t i = 0; i < program_.statements.size(); ++i) {
            const auto& stmt = program_.statements[i];
            if (const auto* dep = std::get_if<ast::DependencyStatement>(&stmt.node)) dependency(*dep, i, stmt.pos);
            if (const auto* num = std::get_if<ast::NumberStatement>(&stmt.node)) number(*num, i, stmt.pos);
        }
        finish();
        return std::move(table_);
    }

  private:
    struct PendingFunction {
        std::vector<int> args;
        int ret;
        bool declared = false;
        std::optional<std::size_t> generator;
        Position pos;
    };

    void declare_types() {
        for (const auto& stmt : program_.statements) {
            if (const auto* t = std::get_if<ast::TypeDecl>(&stmt.node)) {
                if (table_.type_id(t->name)) throw Error(ErrorCode::DuplicateName, "type '" + t->name + "' declared twice", stmt.pos);
                TypeInfo info;
                info.name = t->name;
                info.pos = stmt.pos;
                table_.add_type(std::move(info));
            }
        }
        for (std::size_t i = 0; i < program_.statements.size(); ++i) {
            const auto& stmt = program_.statements[i];
            if (const auto* g = std::get_if<ast::GuaranteedDecl>(&stmt.node)) {
                const int id = user_type(g->type_name, stmt.pos);
                table_.types[static_cast<std::size_t>(id)].guaranteed = true;
            }
            if (const auto* n = std::get_if<ast::NumberStatement>(&stmt.node)) {
                const int id = user_type(n->type_name, stmt.pos);
                auto& t = table_.types[static_cast<std::size_t>(id)];
                if (t.number_statement) throw Error(ErrorCode::MultipleGenerators, "#" + t.name + " has two number statements", stmt.pos);
                t.number_statement = i;
            }
        }
        for (auto& t : table_.types) {
            if (t.guaranteed && t.number_statement) {
                throw Error(ErrorCode::MultipleGenerators, "guaranteed type '" + t.name + "' has a number statement", t.pos);
            }
            if (t.number_statement) t.mode = GenerationMode::NumberStatement;
        }
    }

    int user_type(const std::string& name, Position pos) {
        const int id = table_.require_type(name, pos);
        if (table_.type(id).builtin) {
            throw Error(ErrorCode::UnsupportedForm, "builtin type '" + name + "' cannot be guaranteed or counted", pos);
        }
        return id;
    }

    PendingFunction& function(const std::string& name, std::size_t arity, Position pos) {
        auto it = pending_.find(name);
        if (it == pending_.end()) {
            PendingFunction f;
            for (std::size_t i = 0; i < arity; ++i) f.args.push_back(unifier_.fresh());
            f.ret = unifier_.fresh();
            f.pos = pos;
            order_.push_back(name);
            it = pending_.emplace(name, std::move(f)).first;
        } else if (it->second.args.size() != arity) {
            throw Error(ErrorCode::SignatureConflict,
                        name + " used with " + std::to_string(arity) + " arguments and with " +
                            std::to_string(it->second.args.size()),
                        pos);
        }
        return it->second;
    }

    void unify(int a, int b, const std::string& what, Position pos) {
        const auto da = unifier_.describe(a);
        const auto db = unifier_.describe(b);
        if (!unifier_.unify(a, b)) throw Error(ErrorCode::SignatureConflict, what + " used as " + da + " and as " + db, pos);
    }

    int type_slot(const std::string& name, Position pos) {
        table_.require_type(name, pos);
        return unifier_.named(name);
    }

    void declaration(const ast::FunctionDecl& decl, Position pos) {
        auto& f = function(decl.name, decl.arg_types.size(), pos);
        if (f.declared) throw Error(ErrorCode::DuplicateName, "function '" + decl.name + "' declared twice", pos);
        f.declared = true;
        for (std::size_t i = 0; i < decl.arg_types.size(); ++i) {
            unify(f.args[i], type_slot(decl.arg_types[i], pos), decl.name + " argument " + std::to_string(i + 1), pos);
        }
        int ret = type_slot(decl.return_type.element ? *decl.return_type.element : decl.return_type.name, pos);
        if (decl.return_type.element) ret = unifier_.collection_of(ret);
        unify(f.ret, ret, decl.name + " return value", pos);
    }

    void number(const ast::NumberStatement& num, std::size_t, Position pos) {
        const auto* dist = registry_.scalar(num.draw.dist);
        if (!dist) throw Error(ErrorCode::UnresolvedSymbol, "distribution '" + num.draw.dist + "' is not configured", num.draw.pos);
        if (dist->signature().output != "Integer") {
            throw Error(ErrorCode::SignatureConflict, "#" + num.type_name + " needs an Integer distribution, " + num.draw.dist +
                                                          " produces " + dist->signature().output, pos);
        }
        if (!num.draw.paren_args.empty() || !num.draw.brace_args.empty()) {
            throw Error(ErrorCode::UnsupportedForm, "number statements take no arguments", pos);
        }
        table_.distributions[num.draw.dist].name = num.draw.dist;
        table_.distributions[num.draw.dist].users.push_back("#" + num.type_name);
    }

    void dependency(const ast::DependencyStatement& dep, std::size_t index, Position pos) {
        auto& f = function(dep.function, dep.variables.size(), pos);
        if (f.generator) throw Error(ErrorCode::MultipleGenerators, dep.function + " has more than one dependency statement", pos);
        f.generator = index;
        const std::vector<int> args = f.args;
        const int ret = f.ret;

        vars_.clear();
        for (std::size_t i = 0; i < dep.variables.size(); ++i) {
            if (vars_.contains(dep.variables[i])) {
                throw Error(ErrorCode::UnsupportedForm, "logical variable '" + dep.variables[i] + "' repeated", dep.variable_positions[i]);
            }
            vars_[dep.variables[i]] = args[i];
        }
        for (const auto& clause : dep.clauses) {
            if (clause.condition) unify(term(*clause.condition), boolean(), "condition of " + dep.function, clause.condition->pos);
            if (!clause.body.is_null) draw(clause.body.draw, dep.function, ret);
        }
    }

    int boolean() { return unifier_.named("Boolean"); }

    void draw(const ast::Draw& d, const std::string& fn, int ret) {
        if (is_extension_uniform(d)) {
            const auto& tv = d.paren_args[0];
            unify(ret, type_slot(tv.type_name, tv.pos), fn + " return value", d.pos);
            return;
        }
        if (const auto* spec = registry_.find(d.dist)) {
            const auto* scalar = dynamic_cast<const ScalarDistribution*>(spec);
            if (!scalar) throw Error(ErrorCode::UnsupportedForm, d.dist + " is a vector distribution and cannot generate " + fn, d.pos);
            const auto sig = scalar->signature();
            std::vector<const ast::Term*> inputs;
            for (const auto& t : d.paren_args) inputs.push_back(&t);
            for (const auto& t : d.brace_args) inputs.push_back(&t);
            if (inputs.size() != sig.inputs.size()) {
                throw Error(ErrorCode::SignatureConflict,
                            d.dist + " takes " + std::to_string(sig.inputs.size()) + " inputs, given " + std::to_string(inputs.size()),
                            d.pos);
            }
            for (std::size_t i = 0; i < inputs.size(); ++i) {
                unify(term(*inputs[i]), unifier_.named(sig.inputs[i]), d.dist + " input " + std::to_string(i + 1), inputs[i]->pos);
            }
            unify(ret, unifier_.named(sig.output), fn + " return value", d.pos);
            table_.distributions[d.dist].name = d.dist;
            table_.distributions[d.dist].users.push_back(fn);
            return;
        }
        // A model function used as a measure: paren args index it, its value is M(ret).
        auto& g = function(d.dist, d.paren_args.size(), d.pos);
        const std::vector<int> gargs = g.args;
        const int gret = g.ret;
        for (std::size_t i = 0; i < d.paren_args.size(); ++i) {
            unify(term(d.paren_args[i]), gargs[i], d.dist + " argument " + std::to_string(i + 1), d.paren_args[i].pos);
        }
        for (const auto& t : d.brace_args) term(t);
        unify(gret, unifier_.collection_of(ret), d.dist + " value", d.pos);
    }

    int term(const ast::Term& t) {
        using K = ast::Term::Kind;
        switch (t.kind) {
            case K::Identifier: {
                if (auto it = vars_.find(t.name); it != vars_.end()) return it->second;
                throw Error(ErrorCode::UnresolvedSymbol, "unknown identifier '" + t.name + "'", t.pos);
            }
            case K::Integer: {
                const int s = unifier_.fresh();
                literals_.emplace_back(t.pos.offset, s);
                return s;
            }
            case K::Null: return unifier_.fresh();
            case K::TypedVar:
                throw Error(ErrorCode::UnsupportedForm, "typed variable '" + print_term(t) + "' outside Uniform(...)", t.pos);
            case K::Binary: {
                const int lhs = term(t.args[0]);
                const int rhs = term(t.args[1]);
                if (t.op == "=" || t.op == "!=") {
                    unify(lhs, rhs, "operands of '" + t.op + "'", t.pos);
                    return boolean();
                }
                unify(rhs, unifier_.named("Integer"), "offset of '" + t.op + "'", t.args[1].pos);
                return lhs;
            }
            case K::Apply: {
                if (is_builtin_predicate(t.name)) {
                    if (t.args.size() != 2) throw Error(ErrorCode::SignatureConflict, t.name + " takes two arguments", t.pos);
                    unify(term(t.args[0]), term(t.args[1]), "arguments of " + t.name, t.pos);
                    return boolean();
                }
                if (registry_.contains(t.name)) {
                    throw Error(ErrorCode::UnsupportedForm, "distribution '" + t.name + "' used as a function", t.pos);
                }
                std::vector<int> arg_slots;
                for (const auto& a : t.args) arg_slots.push_back(term(a));
                auto& f = function(t.name, t.args.size(), t.pos);
                const std::vector<int> fargs = f.args;
                const int fret = f.ret;
                for (std::size_t i = 0; i < arg_slots.size(); ++i) {
                    unify(arg_slots[i], fargs[i], t.name + " argument " + std::to_string(i + 1), t.args[i].pos);
                }
                return fret;
            }
        }
        return unifier_.fresh();
    }

    int resolved_type(int slot, const std::string& fn, Position pos) {
        auto name = unifier_.name(slot);
        if (!name) throw Error(ErrorCode::UnresolvedSymbol, "cannot infer the type of " + fn, pos);
        return table_.require_type(*name, pos);
    }

    void finish() {
        for (const auto& name : order_) {
            auto& p = pending_.at(name);
            FunctionInfo f;
            f.name = name;
            f.declared = p.declared;
            f.generator = p.generator;
            f.pos = p.pos;
            for (std::size_t i = 0; i < p.args.size(); ++i) {
                f.arg_types.push_back(resolved_type(p.args[i], name + " argument " + std::to_string(i + 1), p.pos));
            }
            if (const int elem = unifier_.element(p.ret); elem >= 0) {
                f.collection = true;
                f.return_type = resolved_type(elem, name + " element", p.pos);
                if (table_.type(f.return_type).builtin) {
                    if (!p.declared && !p.generator) {
                        throw Error(ErrorCode::UnresolvedSymbol, "distribution '" + name + "' is not configured", p.pos);
                    }
                    throw Error(ErrorCode::UnsupportedForm, name + ": collections must range over object types", p.pos);
                }
                f.kind = ReturnKind::ObjectDistribution;
            } else {
                f.return_type = resolved_type(p.ret, name + " return value", p.pos);
                f.kind = table_.type(f.return_type).builtin ? ReturnKind::Value : ReturnKind::Object;
            }
            table_.add_function(std::move(f));
        }
        for (auto [offset, slot] : literals_) {
            auto name = unifier_.name(slot);
            table_.literal_types[offset] = name ? table_.require_type(*name) : kIntegerType;
        }

        // dpImplicit: an unknown type indexing exactly one argument of a generated function.
        for (const auto& f : table_.functions) {
            if (!f.generator) continue;
            int unknown_args = 0;
            int unknown_type = -1;
            for (int a : f.arg_types) {
                if (table_.type(a).unknown()) {
                    ++unknown_args;
                    unknown_type = a;
                }
            }
            auto& t = unknown_type >= 0 ? table_.types[static_cast<std::size_t>(unknown_type)] : table_.types[0];
            if (unknown_args == 1 && t.mode == GenerationMode::None) t.mode = GenerationMode::DpImplicit;
        }

        for (auto& f : table_.functions) {
            if (f.generator) continue;
            const auto& target = table_.type(f.return_type);
            if (f.kind == ReturnKind::ObjectDistribution) {
                if (target.mode == GenerationMode::NumberStatement) {
                    throw Error(ErrorCode::MultipleGenerators,
                                target.name + " has a number statement but " + f.name + " needs it as a Dirichlet process", f.pos);
                }
                f.default_process = DefaultProcess::Collection;
            } else if (f.kind == ReturnKind::Object && target.mode == GenerationMode::DpImplicit) {
                f.default_process = DefaultProcess::Indicator;
            } else {
                f.default_process = DefaultProcess::ObservedOnly;
            }
        }
    }

    const ast::Program& program_;
    const DistributionRegistry& registry_;
    SymbolTable table_;
    TypeUnifier unifier_;
    std::map<std::string, PendingFunction> pending_;
    std::vector<std::string> order_;
    std::map<std::string, int> vars_;
    std::vector<std::pair<std::size_t, int>> literals_;
};

}  // namespace detail

/// Resolves types, function signatures and distribution references.
inline SymbolTable resolve_symbols(const ast::Program& program, const DistributionRegistry& registry) {
    return detail::Resolver(program, registry).run();
}

}  // namespace npblog
