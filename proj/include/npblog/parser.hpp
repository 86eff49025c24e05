#pragma once

// Recursive-descent parser for NP-BLOG programs.
//
//   program   := statement*
//   statement := 'type' Ident ';'
//              | 'guaranteed' Ident ';'
//              | '#' Ident '~' draw ';'
//              | ('random' | 'nonrandom') typeexpr Ident '(' [Ident {',' Ident}] ')' ';'
//              | Ident ['(' [Ident {',' Ident}] ')'] rhs ';'
//   rhs       := '~' (draw | ifchain) | ifchain
//   ifchain   := 'if' formula 'then' body ['else' (ifchain | body)]
//   body      := 'null' | ['~'] draw
//   draw      := Ident ['(' args ')'] ['{' args '}']      (at least one group)
//   formula   := term [('=' | '!=') term]
//   term      := primary {('-' | '+') primary}
//   primary   := Integer | 'null' | Ident ['(' args ')'] | Ident Ident

#include <string>
#include <string_view>
#include <vector>

#include "npblog/ast.hpp"
#include "npblog/lexer.hpp"

namespace npblog {

namespace detail {

class Parser {
  public:
    explicit Parser(const std::vector<Token>& tokens) : tokens_(tokens) {}

    ast::Program program() {
        ast::Program prog;
        while (!at_end()) prog.statements.push_back(statement());
        return prog;
    }

    ast::Term standalone_formula() {
        auto t = formula();
        if (!at_end()) fail({"end of input"});
        return t;
    }

  private:
    const std::vector<Token>& tokens_;
    std::size_t next_ = 0;

    bool at_end() const { return next_ >= tokens_.size(); }
    const Token* peek(std::size_t ahead = 0) const {
        return next_ + ahead < tokens_.size() ? &tokens_[next_ + ahead] : nullptr;
    }
    bool check(TokenKind kind) const { return peek() && peek()->kind == kind; }
    bool check_keyword(std::string_view kw) const { return peek() && peek()->is_keyword(kw); }
    bool check_symbol(std::string_view s) const { return peek() && peek()->is(TokenKind::Symbol, s); }

    Position here() const {
        if (auto* t = peek()) return t->pos;
        if (tokens_.empty()) return {};
        // past the end: point at the last character of the final token
        Position p = tokens_.back().pos;
        p.column += static_cast<int>(tokens_.back().lexeme.size()) - 1;
        p.offset += tokens_.back().lexeme.size() - 1;
        return p;
    }

    [[noreturn]] void fail(std::initializer_list<std::string_view> expected) const {
        std::string msg = "expected ";
        bool first = true;
        for (auto e : expected) {
            msg += first ? "" : " or ";
            msg += e;
            first = false;
        }
        msg += ", found ";
        msg += peek() ? "'" + peek()->lexeme + "'" : std::string("end of input");
        throw Error(ErrorCode::ParseError, msg, here());
    }

    const Token& expect(TokenKind kind, std::string_view what) {
        if (!check(kind)) fail({what});
        return tokens_[next_++];
    }
    void expect_keyword(std::string_view kw) {
        if (!check_keyword(kw)) fail({"'" + std::string(kw) + "'"});
        ++next_;
    }

    ast::Statement statement() {
        ast::Statement stmt;
        stmt.pos = here();
        if (check_keyword("type")) {
            ++next_;
            stmt.node = ast::TypeDecl{expect(TokenKind::Identifier, "type name").lexeme};
        } else if (check_keyword("guaranteed")) {
            ++next_;
            stmt.node = ast::GuaranteedDecl{expect(TokenKind::Identifier, "type name").lexeme};
        } else if (check_keyword("#")) {
            ++next_;
            ast::NumberStatement num;
            num.type_name = expect(TokenKind::Identifier, "type name").lexeme;
            expect(TokenKind::Tilde, "'~'");
            num.draw = draw();
            stmt.node = std::move(num);
        } else if (check(TokenKind::Identifier) && (peek()->lexeme == "random" || peek()->lexeme == "nonrandom") &&
                   peek(1) && peek(1)->kind == TokenKind::Identifier) {
            stmt.node = declaration();
        } else if (check(TokenKind::Identifier)) {
            stmt.node = dependency();
        } else {
            fail({"'type'", "'guaranteed'", "'#'", "function name"});
        }
        expect(TokenKind::Semicolon, "';'");
        return stmt;
    }

    ast::FunctionDecl declaration() {
        ast::FunctionDecl decl;
        decl.random = tokens_[next_++].lexeme == "random";
        decl.return_type.name = expect(TokenKind::Identifier, "return type").lexeme;
        // `Multinomial(Author) f(...)`: a parenthesised element type followed by a name
        if (check(TokenKind::LParen) && peek(1) && peek(1)->kind == TokenKind::Identifier && peek(2) &&
            peek(2)->kind == TokenKind::RParen && peek(3) && peek(3)->kind == TokenKind::Identifier) {
            ++next_;
            decl.return_type.element = tokens_[next_++].lexeme;
            ++next_;
        }
        decl.name = expect(TokenKind::Identifier, "function name").lexeme;
        expect(TokenKind::LParen, "'('");
        if (!check(TokenKind::RParen)) {
            decl.arg_types.push_back(expect(TokenKind::Identifier, "argument type").lexeme);
            while (check(TokenKind::Comma)) {
                ++next_;
                decl.arg_types.push_back(expect(TokenKind::Identifier, "argument type").lexeme);
            }
        }
        expect(TokenKind::RParen, "')'");
        return decl;
    }

    ast::DependencyStatement dependency() {
        ast::DependencyStatement dep;
        dep.function = tokens_[next_++].lexeme;
        if (check(TokenKind::LParen)) {
            ++next_;
            if (!check(TokenKind::RParen)) {
                do {
                    const auto& var = expect(TokenKind::Identifier, "logical variable");
                    dep.variables.push_back(var.lexeme);
                    dep.variable_positions.push_back(var.pos);
                } while (check(TokenKind::Comma) && (++next_, true));
            }
            expect(TokenKind::RParen, "')'");
        }
        if (check(TokenKind::Tilde)) {
            ++next_;
            if (check_keyword("if")) {
                if_chain(dep.clauses);
            } else {
                dep.clauses.push_back({std::nullopt, ast::Body{false, draw()}});
            }
        } else if (check_keyword("if")) {
            if_chain(dep.clauses);
        } else {
            fail({"'~'", "'if'"});
        }
        return dep;
    }

    void if_chain(std::vector<ast::Clause>& clauses) {
        expect_keyword("if");
        ast::Clause clause;
        clause.condition = formula();
        expect_keyword("then");
        clause.body = body();
        clauses.push_back(std::move(clause));
        if (check_keyword("else")) {
            ++next_;
            if (check_keyword("if")) {
                if_chain(clauses);
            } else {
                clauses.push_back({std::nullopt, body()});
            }
        }
    }

    ast::Body body() {
        if (check_keyword("null")) {
            ++next_;
            return {true, {}};
        }
        if (check(TokenKind::Tilde)) ++next_;
        if (!check(TokenKind::Identifier)) fail({"'~'", "'null'", "distribution name"});
        return {false, draw()};
    }

    ast::Draw draw() {
        ast::Draw d;
        d.pos = here();
        d.dist = expect(TokenKind::Identifier, "distribution name").lexeme;
        if (check(TokenKind::LParen)) {
            ++next_;
            d.has_parens = true;
            d.paren_args = args(TokenKind::RParen);
            expect(TokenKind::RParen, "')'");
        }
        if (check(TokenKind::LBrace)) {
            ++next_;
            d.has_braces = true;
            d.brace_args = args(TokenKind::RBrace);
            expect(TokenKind::RBrace, "'}'");
        }
        if (!d.has_parens && !d.has_braces) fail({"'('", "'{'"});
        return d;
    }

    std::vector<ast::Term> args(TokenKind closer) {
        std::vector<ast::Term> out;
        if (check(closer)) return out;
        out.push_back(term());
        while (check(TokenKind::Comma)) {
            ++next_;
            out.push_back(term());
        }
        return out;
    }

    ast::Term formula() {
        auto lhs = term();
        if (check_symbol("=") || check_symbol("!=")) {
            const Token& op = tokens_[next_++];
            auto rhs = term();
            return ast::Term::binary(op.lexeme, std::move(lhs), std::move(rhs), op.pos);
        }
        return lhs;
    }

    ast::Term term() {
        auto lhs = primary();
        while (check_symbol("-") || check_symbol("+")) {
            const Token& op = tokens_[next_++];
            auto rhs = primary();
            lhs = ast::Term::binary(op.lexeme, std::move(lhs), std::move(rhs), op.pos);
        }
        return lhs;
    }

    ast::Term primary() {
        if (check(TokenKind::Integer)) {
            const Token& tok = tokens_[next_++];
            try {
                return ast::Term::literal(std::stoll(tok.lexeme), tok.pos);
            } catch (const std::out_of_range&) {
                throw Error(ErrorCode::ParseError, "integer literal out of range", tok.pos);
            }
        }
        if (check_keyword("null")) {
            ast::Term t;
            t.kind = ast::Term::Kind::Null;
            t.pos = tokens_[next_++].pos;
            return t;
        }
        if (!check(TokenKind::Identifier)) fail({"term"});
        const Token& name = tokens_[next_++];
        if (check(TokenKind::LParen)) {
            ++next_;
            auto a = args(TokenKind::RParen);
            expect(TokenKind::RParen, "')'");
            return ast::Term::apply(name.lexeme, std::move(a), name.pos);
        }
        if (check(TokenKind::Identifier)) {
            ast::Term t;
            t.kind = ast::Term::Kind::TypedVar;
            t.type_name = name.lexeme;
            t.name = tokens_[next_++].lexeme;
            t.pos = name.pos;
            return t;
        }
        return ast::Term::identifier(name.lexeme, name.pos);
    }
};

}  // namespace detail

/// Parses a token stream into a program. Reports the first error only.
inline ast::Program parse_program(const std::vector<Token>& tokens, std::string source_name = {}) {
    auto prog = detail::Parser(tokens).program();
    prog.source_name = std::move(source_name);
    return prog;
}

inline ast::Program parse_source(std::string_view source, std::string source_name = {}) {
    return parse_program(tokenize(source), std::move(source_name));
}

/// Parses a single formula such as a query `Coreference(RefPub, c1, c2)`.
inline ast::Term parse_formula(std::string_view text) {
    const auto tokens = tokenize(text);
    return detail::Parser(tokens).standalone_formula();
}

}  // namespace npblog
