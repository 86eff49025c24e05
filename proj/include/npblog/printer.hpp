#pragma once

#include <string>

#include "npblog/ast.hpp"

namespace npblog {

inline std::string print_term(const ast::Term& t) {
    using K = ast::Term::Kind;
    switch (t.kind) {
        case K::Identifier: return t.name;
        case K::Integer: return std::to_string(t.integer);
        case K::Null: return "null";
        case K::TypedVar: return t.type_name + " " + t.name;
        case K::Binary: return print_term(t.args[0]) + " " + t.op + " " + print_term(t.args[1]);
        case K::Apply: {
            std::string out = t.name + "(";
            for (std::size_t i = 0; i < t.args.size(); ++i) {
                if (i) out += ", ";
                out += print_term(t.args[i]);
            }
            return out + ")";
        }
    }
    return {};
}

namespace detail {

inline std::string print_args(const std::vector<ast::Term>& args) {
    std::string out;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (i) out += ", ";
        out += print_term(args[i]);
    }
    return out;
}

inline std::string print_draw(const ast::Draw& d) {
    std::string out = d.dist;
    if (d.has_parens) out += "(" + print_args(d.paren_args) + ")";
    if (d.has_braces) out += "{" + print_args(d.brace_args) + "}";
    return out;
}

inline std::string print_body(const ast::Body& b) { return b.is_null ? "null" : "~ " + print_draw(b.draw); }

struct StatementPrinter {
    std::string operator()(const ast::TypeDecl& s) const { return "type " + s.name + ";"; }
    std::string operator()(const ast::GuaranteedDecl& s) const { return "guaranteed " + s.type_name + ";"; }
    std::string operator()(const ast::NumberStatement& s) const {
        return "#" + s.type_name + " ~ " + print_draw(s.draw) + ";";
    }
    std::string operator()(const ast::FunctionDecl& s) const {
        std::string out = s.random ? "random " : "nonrandom ";
        out += s.return_type.name;
        if (s.return_type.element) out += "(" + *s.return_type.element + ")";
        out += " " + s.name + "(";
        for (std::size_t i = 0; i < s.arg_types.size(); ++i) {
            if (i) out += ", ";
            out += s.arg_types[i];
        }
        return out + ");";
    }
    std::string operator()(const ast::DependencyStatement& s) const {
        std::string out = s.function + "(";
        for (std::size_t i = 0; i < s.variables.size(); ++i) {
            if (i) out += ", ";
            out += s.variables[i];
        }
        out += ")";
        if (s.clauses.size() == 1 && !s.clauses[0].condition) {
            return out + " " + print_body(s.clauses[0].body) + ";";
        }
        for (std::size_t i = 0; i < s.clauses.size(); ++i) {
            const auto& c = s.clauses[i];
            if (c.condition) {
                out += i == 0 ? " if " : " else if ";
                out += print_term(*c.condition) + " then " + print_body(c.body);
            } else {
                out += " else " + print_body(c.body);
            }
        }
        return out + ";";
    }
};

}  // namespace detail

inline std::string print_statement(const ast::Statement& s) { return std::visit(detail::StatementPrinter{}, s.node); }

/// Canonical source: one statement per line.
inline std::string pretty_print(const ast::Program& program) {
    std::string out;
    for (const auto& s : program.statements) out += print_statement(s) + "\n";
    return out;
}

}  // namespace npblog
