#include <gtest/gtest.h>

#include <filesystem>

#include "npblog/config.hpp"
#include "npblog/parser.hpp"
#include "npblog/printer.hpp"

using namespace npblog;

namespace {

std::vector<std::pair<TokenKind, std::string>> kinds(std::string_view src) {
    std::vector<std::pair<TokenKind, std::string>> out;
    for (const auto& t : tokenize(src)) out.emplace_back(t.kind, t.lexeme);
    return out;
}

const ast::DependencyStatement& dep(const ast::Program& p, std::size_t i = 0) {
    return std::get<ast::DependencyStatement>(p.statements.at(i).node);
}

std::vector<std::filesystem::path> bundled_models() {
    std::vector<std::filesystem::path> out;
    for (const auto& e : std::filesystem::directory_iterator(NPBLOG_MODELS_DIR)) {
        if (e.path().extension() == ".npblog") out.push_back(e.path());
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

TEST(Lexer, TypeDeclaration) {
    using K = TokenKind;
    const std::vector<std::pair<K, std::string>> want = {{K::Keyword, "type"}, {K::Identifier, "Author"}, {K::Semicolon, ";"}};
    EXPECT_EQ(kinds("type Author;"), want);
}

TEST(Lexer, EmptyInput) { EXPECT_TRUE(tokenize("").empty()); }

TEST(Lexer, NumberStatement) {
    using K = TokenKind;
    const std::vector<std::pair<K, std::string>> want = {{K::Keyword, "#"},   {K::Identifier, "Pub"},        {K::Tilde, "~"},
                                                         {K::Identifier, "NumPubsDist"}, {K::LParen, "("},
                                                         {K::RParen, ")"},    {K::Semicolon, ";"}};
    EXPECT_EQ(kinds("#Pub ~ NumPubsDist();"), want);
}

TEST(Lexer, CommentsAndPositions) {
    const auto toks = tokenize("// header\ntype  A;");
    ASSERT_EQ(toks.size(), 3u);
    EXPECT_EQ(toks[1].pos.line, 2);
    EXPECT_EQ(toks[1].pos.column, 7);
}

TEST(Lexer, BadCharacterReportsPosition) {
    try {
        tokenize("type A;\ntype $;");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::LexError);
        ASSERT_TRUE(e.where());
        EXPECT_EQ(e.where()->line, 2);
        EXPECT_EQ(e.where()->column, 6);
    }
}

TEST(Parser, BraceOnlyDraw) {
    const auto p = parse_source("Name(a) ~ NameDist{};");
    const auto& d = dep(p);
    EXPECT_EQ(d.function, "Name");
    EXPECT_EQ(d.variables, std::vector<std::string>{"a"});
    ASSERT_EQ(d.clauses.size(), 1u);
    EXPECT_FALSE(d.clauses[0].condition);
    EXPECT_EQ(d.clauses[0].body.draw.dist, "NameDist");
    EXPECT_TRUE(d.clauses[0].body.draw.paren_args.empty());
    EXPECT_TRUE(d.clauses[0].body.draw.brace_args.empty());
}

TEST(Parser, NestedBraceArgument) {
    const auto p = parse_source("CitedTitle(c) ~ TitleStrDist{Title(RefPub(c))};");
    const auto& draw = dep(p).clauses[0].body.draw;
    EXPECT_TRUE(draw.paren_args.empty());
    ASSERT_EQ(draw.brace_args.size(), 1u);
    using T = ast::Term;
    EXPECT_EQ(draw.brace_args[0], T::apply("Title", {T::apply("RefPub", {T::identifier("c")})}));
}

TEST(Parser, IfThenElseWithBothArgumentKinds) {
    const auto p = parse_source("State(a,t) if t = 0 then ~ InitState{} else ~ StateTransDist(a){State(a, t-1)};");
    const auto& d = dep(p);
    ASSERT_EQ(d.clauses.size(), 2u);
    using T = ast::Term;
    EXPECT_EQ(*d.clauses[0].condition, T::binary("=", T::identifier("t"), T::literal(0)));
    EXPECT_FALSE(d.clauses[1].condition);
    const auto& second = d.clauses[1].body.draw;
    EXPECT_EQ(second.dist, "StateTransDist");
    EXPECT_EQ(second.paren_args, std::vector<T>{T::identifier("a")});
    EXPECT_EQ(second.brace_args,
              std::vector<T>{T::apply("State", {T::identifier("a"), T::binary("-", T::identifier("t"), T::literal(1))})});
}

TEST(Parser, NullClause) {
    const auto p = parse_source("Ref(d) if Hidden(d) = 1 then null;");
    const auto& d = dep(p);
    ASSERT_EQ(d.clauses.size(), 1u);
    EXPECT_TRUE(d.clauses[0].body.is_null);
}

TEST(Parser, SyntaxErrorHasPosition) {
    try {
        parse_source("type Author;\nName(a) ~ ;");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::ParseError);
        ASSERT_TRUE(e.where());
        EXPECT_EQ(e.where()->line, 2);
        EXPECT_EQ(e.where()->column, 11);
    }
}

TEST(Parser, MissingSemicolon) {
    EXPECT_THROW(
        {
            try {
                parse_source("type Author");
            } catch (const Error& e) {
                EXPECT_EQ(e.code(), ErrorCode::ParseError);
                throw;
            }
        },
        Error);
}

TEST(Printer, EmptyProgram) { EXPECT_EQ(pretty_print(ast::Program{}), ""); }

TEST(Printer, SingleTypeDeclaration) { EXPECT_EQ(pretty_print(parse_source("type   Author ;")), "type Author;\n"); }

TEST(Printer, RoundTripOfBundledModels) {
    const auto models = bundled_models();
    ASSERT_GE(models.size(), 3u);
    for (const auto& path : models) {
        SCOPED_TRACE(path.string());
        const auto first = parse_source(detail::read_file(path.string()));
        const auto text = pretty_print(first);
        const auto second = parse_source(text);
        EXPECT_EQ(first, second);
        EXPECT_EQ(pretty_print(second), text);
    }
}

TEST(Printer, RoundTripOfSnippets) {
    for (const char* src : {"State(a,t) if t = 0 then ~ InitState{} else ~ StateTransDist(a){State(a, t-1)};",
                            "RefAuthor(p, i) if Less(i, NumAuthors(p)) then ~ Uniform(Author a);",
                            "Ref(d) if Hidden(d) != 1 then ~ PickDist{} else null;",
                            "random Multinomial(Author) PubAuthorsDist(Pub);", "nonrandom Citation CitedIn(AuthorMention);",
                            "#Smartie ~ NumSmartiesDist(); guaranteed Draw;"}) {
        SCOPED_TRACE(src);
        const auto p = parse_source(src);
        EXPECT_EQ(parse_source(pretty_print(p)), p);
    }
}
