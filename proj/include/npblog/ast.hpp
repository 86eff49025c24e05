#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "npblog/error.hpp"

namespace npblog::ast {

/// A term or formula. Bare identifiers are classified (logical variable,
/// constant, zero-ary function) only during symbol resolution.
struct Term {
    enum class Kind { Identifier, Integer, Apply, TypedVar, Binary, Null };

    Kind kind = Kind::Identifier;
    std::string name;        // identifier / applied function / typed-var variable
    std::string type_name;   // TypedVar only, e.g. `Author` in `Author a`
    std::string op;          // Binary only: "=", "!=", "-", "+"
    std::int64_t integer = 0;
    std::vector<Term> args;  // Apply arguments or the two Binary operands
    Position pos;

    static Term identifier(std::string n, Position p = {}) {
        Term t;
        t.kind = Kind::Identifier;
        t.name = std::move(n);
        t.pos = p;
        return t;
    }
    static Term literal(std::int64_t v, Position p = {}) {
        Term t;
        t.kind = Kind::Integer;
        t.integer = v;
        t.pos = p;
        return t;
    }
    static Term apply(std::string fn, std::vector<Term> a, Position p = {}) {
        Term t;
        t.kind = Kind::Apply;
        t.name = std::move(fn);
        t.args = std::move(a);
        t.pos = p;
        return t;
    }
    static Term binary(std::string o, Term lhs, Term rhs, Position p = {}) {
        Term t;
        t.kind = Kind::Binary;
        t.op = std::move(o);
        t.args.push_back(std::move(lhs));
        t.args.push_back(std::move(rhs));
        t.pos = p;
        return t;
    }

    /// Structural equality; source positions are ignored.
    friend bool operator==(const Term& a, const Term& b) {
        return a.kind == b.kind && a.name == b.name && a.type_name == b.type_name && a.op == b.op &&
               a.integer == b.integer && a.args == b.args;
    }
};

/// `g(t..){t..}`: parenthesised terms select the measure, braced terms are fed
/// to it.
struct Draw {
    std::string dist;
    std::vector<Term> paren_args;
    std::vector<Term> brace_args;
    bool has_parens = false;
    bool has_braces = false;
    Position pos;

    friend bool operator==(const Draw& a, const Draw& b) {
        return a.dist == b.dist && a.paren_args == b.paren_args && a.brace_args == b.brace_args &&
               a.has_parens == b.has_parens && a.has_braces == b.has_braces;
    }
};

struct Body {
    bool is_null = false;
    Draw draw;

    friend bool operator==(const Body&, const Body&) = default;
};

struct Clause {
    std::optional<Term> condition;
    Body body;

    friend bool operator==(const Clause&, const Clause&) = default;
};

struct TypeDecl {
    std::string name;
    friend bool operator==(const TypeDecl&, const TypeDecl&) = default;
};

struct GuaranteedDecl {
    std::string type_name;
    friend bool operator==(const GuaranteedDecl&, const GuaranteedDecl&) = default;
};

struct NumberStatement {
    std::string type_name;
    Draw draw;
    friend bool operator==(const NumberStatement&, const NumberStatement&) = default;
};

/// `Multinomial(Author)` or a plain type name.
struct TypeExpr {
    std::string name;
    std::optional<std::string> element;
    friend bool operator==(const TypeExpr&, const TypeExpr&) = default;
};

/// `random ReturnType f(ArgType, ...);`
struct FunctionDecl {
    bool random = true;
    TypeExpr return_type;
    std::string name;
    std::vector<std::string> arg_types;
    friend bool operator==(const FunctionDecl&, const FunctionDecl&) = default;
};

struct DependencyStatement {
    std::string function;
    std::vector<std::string> variables;
    std::vector<Position> variable_positions;
    std::vector<Clause> clauses;

    friend bool operator==(const DependencyStatement& a, const DependencyStatement& b) {
        return a.function == b.function && a.variables == b.variables && a.clauses == b.clauses;
    }
};

struct Statement {
    std::variant<TypeDecl, GuaranteedDecl, NumberStatement, FunctionDecl, DependencyStatement> node;
    Position pos;

    friend bool operator==(const Statement& a, const Statement& b) { return a.node == b.node; }
};

struct Program {
    std::vector<Statement> statements;
    std::string source_name;

    /// Compares statements only; the source name is not part of the structure.
    friend bool operator==(const Program& a, const Program& b) { return a.statements == b.statements; }
};

}  // namespace npblog::ast
