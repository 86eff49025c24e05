#pragma once

#include <string>
#include <vector>

#include "npblog/ast.hpp"
#include "npblog/printer.hpp"
#include "npblog/symbols.hpp"

namespace npblog {

/// A dependency statement that names a particular unknown object.
struct Violation {
    std::size_t statement = 0;
    std::string function;
    std::string term;
    std::string type;
    Position pos;

    std::string message() const {
        return "statement for " + function + " refers to a particular " + type + " object: " + term;
    }
};

namespace detail {

inline void collect_violations(const ast::Term& t, const ast::Term* parent, const SymbolTable& symbols,
                               std::size_t stmt, const std::string& fn, std::vector<Violation>& out) {
    if (t.kind == ast::Term::Kind::Integer) {
        const int type = symbols.literal_type(t);
        if (symbols.type(type).unknown()) {
            out.push_back({stmt, fn, print_term(parent ? *parent : t), symbols.type(type).name, t.pos});
        }
        return;
    }
    for (const auto& a : t.args) collect_violations(a, &t, symbols, stmt, fn, out);
}

}  // namespace detail

/// Unknown objects must be exchangeable: no statement may refer to a specific
/// one by a literal. Returns every offending term; empty means valid.
inline std::vector<Violation> validate_exchangeability(const ast::Program& program, const SymbolTable& symbols) {
    std::vector<Violation> out;
    for (std::size_t i = 0; i < program.statements.size(); ++i) {
        const auto* dep = std::get_if<ast::DependencyStatement>(&program.statements[i].node);
        if (!dep) continue;
        for (const auto& clause : dep->clauses) {
            if (clause.condition) detail::collect_violations(*clause.condition, nullptr, symbols, i, dep->function, out);
            if (clause.body.is_null) continue;
            for (const auto& t : clause.body.draw.paren_args) detail::collect_violations(t, nullptr, symbols, i, dep->function, out);
            for (const auto& t : clause.body.draw.brace_args) detail::collect_violations(t, nullptr, symbols, i, dep->function, out);
        }
    }
    return out;
}

}  // namespace npblog
