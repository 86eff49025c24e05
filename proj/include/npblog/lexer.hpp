#pragma once

#include <array>
#include <cctype>
#include <cstdio>
#include <string>
#include <string_view>
#include <vector>

#include "npblog/error.hpp"

namespace npblog {

enum class TokenKind {
    Keyword,     // type guaranteed if then else null #
    Identifier,
    Integer,
    Symbol,      // = != - +
    Tilde,
    Semicolon,
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
};

struct Token {
    TokenKind kind;
    std::string lexeme;
    Position pos;

    bool is(TokenKind k, std::string_view text) const { return kind == k && lexeme == text; }
    bool is_keyword(std::string_view text) const { return is(TokenKind::Keyword, text); }
};

inline constexpr std::array<std::string_view, 6> kKeywords = {"type", "guaranteed", "if", "then", "else", "null"};

inline bool is_keyword(std::string_view word) {
    for (auto kw : kKeywords) {
        if (kw == word) return true;
    }
    return false;
}

/// Splits NP-BLOG source into tokens. Whitespace and `//` comments are dropped.
inline std::vector<Token> tokenize(std::string_view source) {
    std::vector<Token> tokens;
    Position pos;
    std::size_t i = 0;

    auto advance = [&](std::size_t n) {
        for (std::size_t k = 0; k < n; ++k, ++i) {
            if (source[i] == '\n') {
                ++pos.line;
                pos.column = 1;
            } else {
                ++pos.column;
            }
        }
        pos.offset = i;
    };
    auto emit = [&](TokenKind kind, std::size_t len) {
        tokens.push_back({kind, std::string(source.substr(i, len)), pos});
        advance(len);
    };

    while (i < source.size()) {
        const unsigned char c = static_cast<unsigned char>(source[i]);
        if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
            advance(1);
        } else if (c == '/' && i + 1 < source.size() && source[i + 1] == '/') {
            std::size_t end = source.find('\n', i);
            advance((end == std::string_view::npos ? source.size() : end) - i);
        } else if (std::isalpha(c) || c == '_') {
            std::size_t j = i;
            while (j < source.size() &&
                   (std::isalnum(static_cast<unsigned char>(source[j])) || source[j] == '_')) {
                ++j;
            }
            const auto word = source.substr(i, j - i);
            emit(is_keyword(word) ? TokenKind::Keyword : TokenKind::Identifier, j - i);
        } else if (std::isdigit(c)) {
            std::size_t j = i;
            while (j < source.size() && std::isdigit(static_cast<unsigned char>(source[j]))) ++j;
            emit(TokenKind::Integer, j - i);
        } else {
            switch (c) {
                case '#': emit(TokenKind::Keyword, 1); break;
                case '~': emit(TokenKind::Tilde, 1); break;
                case ';': emit(TokenKind::Semicolon, 1); break;
                case '(': emit(TokenKind::LParen, 1); break;
                case ')': emit(TokenKind::RParen, 1); break;
                case '{': emit(TokenKind::LBrace, 1); break;
                case '}': emit(TokenKind::RBrace, 1); break;
                case ',': emit(TokenKind::Comma, 1); break;
                case '=':
                case '-':
                case '+': emit(TokenKind::Symbol, 1); break;
                case '!':
                    if (i + 1 < source.size() && source[i + 1] == '=') {
                        emit(TokenKind::Symbol, 2);
                        break;
                    }
                    [[fallthrough]];
                default: {
                    char hex[8];
                    std::snprintf(hex, sizeof hex, "0x%02X", c);
                    std::string shown = c < 0x80 && std::isprint(c) ? std::string(1, static_cast<char>(c))
                                                                   : std::string("byte ") + hex;
                    throw Error(ErrorCode::LexError, "unexpected character '" + shown + "'", pos);
                }
            }
        }
    }
    return tokens;
}

}  // namespace npblog
