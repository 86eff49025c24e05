#include <gtest/gtest.h>

#include "npblog/network.hpp"

using namespace npblog;

namespace {

std::string model_path(const std::string& name) { return std::string(NPBLOG_MODELS_DIR) + "/" + name; }

Model load(const std::string& name) {
    return compile_model(detail::read_file(model_path(name + ".npblog")), ModelConfig::load(model_path(name + ".cfg")), name);
}

ErrorCode code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no error raised";
    return ErrorCode::IoError;
}

std::vector<std::string> parent_labels(const GenerativeNetwork& net, const Family& f) {
    std::vector<std::string> out;
    for (int p : f.parents) out.push_back(net.family(p).label());
    return out;
}

bool contains(const std::vector<std::string>& xs, const std::string& x) { return std::find(xs.begin(), xs.end(), x) != xs.end(); }

// A transition kernel with an object-valued selector, for the aircraft example.
class Transition : public ScalarDistribution {
  public:
    Transition() : ScalarDistribution("StateTransDist") {}
    std::string family() const override { return "Transition"; }
    Signature signature() const override { return {{"Aircraft", "Integer"}, "Integer"}; }
    double log_density(std::span<const Value>, const Value&) const override { return 0.0; }
    Value sample(std::span<const Value> in, Rng&) const override { return in[1]; }
};

const char* kAircraft = R"(type Aircraft; type Time;
guaranteed Aircraft; guaranteed Time;
random Integer State(Aircraft, Time);
State(a,t) if t = 0 then ~ InitState{} else ~ StateTransDist(a){State(a, t-1)};
)";

}  // namespace

TEST(Symbols, CitationSignatures) {
    const auto m = load("citations");
    const auto& s = m.network->symbols;
    const auto& ref = s.function("RefPub");
    EXPECT_EQ(s.signature_string(ref), "(Citation) -> Pub");
    EXPECT_EQ(ref.kind, ReturnKind::Object);
    const auto& coll = s.function("PubAuthorsDist");
    EXPECT_TRUE(coll.collection);
    EXPECT_EQ(coll.kind, ReturnKind::ObjectDistribution);
    EXPECT_EQ(s.signature_string(coll), "(Pub) -> M(Author)");
    EXPECT_EQ(s.function("CitedTitle").kind, ReturnKind::Value);
    EXPECT_EQ(s.type(s.require_type("Pub")).mode, GenerationMode::DpImplicit);
    EXPECT_TRUE(s.type(s.require_type("Citation")).guaranteed);
}

TEST(Symbols, ObservedOnlyFunction) {
    const auto m = load("citations");
    const auto& cited_in = m.network->symbols.function("CitedIn");
    EXPECT_FALSE(cited_in.generator.has_value());
    EXPECT_EQ(cited_in.default_process, DefaultProcess::ObservedOnly);
    EXPECT_EQ(m.network->symbols.signature_string(cited_in), "(AuthorMention) -> Citation");
    ASSERT_NE(m.network->family_of("CitedIn"), nullptr);
    EXPECT_EQ(m.network->family_of("CitedIn")->kind, FamilyKind::Observed);
}

TEST(Symbols, MultipleGenerators) {
    const auto cfg = ModelConfig::parse("dist.NameDist.family = Uniform\ndist.NameDist.values = x, y\n");
    EXPECT_EQ(code_of([&] { compile_model("type Author; random String Name(Author);\nName(a) ~ NameDist{};\nName(a) ~ NameDist{};", cfg); }),
              ErrorCode::MultipleGenerators);
}

TEST(Symbols, UnresolvedDistribution) {
    EXPECT_EQ(code_of([] { compile_model("type A; random String F(A); F(a) ~ Missing{};", ModelConfig{}); }),
              ErrorCode::UnresolvedSymbol);
}

TEST(Symbols, UndeclaredArgumentTypeCannotBeInferred) {
    const auto cfg = ModelConfig::parse("dist.NameDist.family = Uniform\ndist.NameDist.values = x\n");
    EXPECT_EQ(code_of([&] { compile_model("type Author; Name(a) ~ NameDist{};", cfg); }), ErrorCode::UnresolvedSymbol);
}

TEST(Exchangeability, CitationModelIsValid) {
    const auto m = load("citations");
    EXPECT_TRUE(m.violations.empty());
}

TEST(Exchangeability, LiteralUnknownObjectIsViolation) {
    const auto cfg = ModelConfig::parse("dist.CopyDist.family = Confusion\ndist.CopyDist.values = x, y\ndist.CopyDist.error = 0.1\n");
    const auto program = parse_source("type Author; random String Name(Author);\nName(a) ~ CopyDist{Name(1)};");
    const auto reg = DistributionRegistry::from_config(cfg);
    const auto v = validate_exchangeability(program, resolve_symbols(program, reg));
    ASSERT_EQ(v.size(), 1u);
    EXPECT_EQ(v[0].function, "Name");
    EXPECT_EQ(v[0].type, "Author");
    EXPECT_EQ(v[0].term, "Name(1)");
    EXPECT_EQ(v[0].pos.line, 2);
    EXPECT_EQ(code_of([&] { compile_model("type Author; random String Name(Author);\nName(a) ~ CopyDist{Name(1)};", cfg); }),
              ErrorCode::ExchangeabilityViolation);
}

TEST(Exchangeability, GuaranteedTimeIndexIsAllowed) {
    auto reg = DistributionRegistry::from_config(ModelConfig::parse("dist.InitState.family = Categorical\ndist.InitState.probs = 0.5, 0.5\n"));
    reg.register_spec(std::make_shared<Transition>());
    const auto program = parse_source(kAircraft);
    EXPECT_TRUE(validate_exchangeability(program, resolve_symbols(program, reg)).empty());
}

TEST(Network, DpMixtureFamilies) {
    const auto m = load("citations");
    const auto& net = *m.network;
    const auto* stick = net.find("StickFamily(Pub)");
    ASSERT_NE(stick, nullptr);
    EXPECT_DOUBLE_EQ(stick->alpha, 1.0);
    ASSERT_NE(net.find("StickFamily(Author)"), nullptr);

    const auto* title = net.family_of("Title");
    ASSERT_NE(title, nullptr);
    EXPECT_EQ(title->kind, FamilyKind::Attribute);
    EXPECT_EQ(title->arg_types, std::vector<int>{net.symbols.require_type("Pub")});

    const auto* ref = net.family_of("RefPub");
    ASSERT_NE(ref, nullptr);
    EXPECT_EQ(ref->kind, FamilyKind::Indicator);
    EXPECT_EQ(net.symbols.type(ref->type).name, "Pub");
    EXPECT_EQ(parent_labels(net, *ref), std::vector<std::string>{"StickFamily(Pub)"});

    const auto* cited = net.family_of("CitedTitle");
    ASSERT_NE(cited, nullptr);
    EXPECT_EQ(cited->kind, FamilyKind::Attribute);
    const auto parents = parent_labels(net, *cited);
    EXPECT_TRUE(contains(parents, "AttributeFamily(Title)"));
    EXPECT_TRUE(contains(parents, "IndicatorFamily(RefPub)"));
}

TEST(Network, CollectionFamilies) {
    const auto m = load("citations");
    const auto& net = *m.network;
    const auto* coll = net.find("CollectionFamily(PubAuthorsDist)");
    ASSERT_NE(coll, nullptr);
    EXPECT_EQ(net.symbols.type(coll->type).name, "Author");
    EXPECT_EQ(coll->arg_types, std::vector<int>{net.symbols.require_type("Pub")});
    EXPECT_TRUE(contains(parent_labels(net, *coll), "StickFamily(Author)"));

    const auto* ref = net.family_of("RefAuthor");
    ASSERT_NE(ref, nullptr);
    EXPECT_EQ(ref->kind, FamilyKind::Indicator);
    ASSERT_EQ(ref->clauses.size(), 1u);
    EXPECT_EQ(ref->clauses[0].body.kind, CompiledDraw::Kind::Collection);
    const auto parents = parent_labels(net, *ref);
    EXPECT_TRUE(contains(parents, "CollectionFamily(PubAuthorsDist)"));
    EXPECT_TRUE(contains(parents, "IndicatorFamily(RefPub)"));
    EXPECT_TRUE(contains(parents, "ObservedFamily(CitedIn)"));
}

TEST(Network, NumberStatementFamilies) {
    const auto m = load("smarties_blog");
    const auto& net = *m.network;
    const auto* number = net.find("NumberFamily(Smartie)");
    ASSERT_NE(number, nullptr);
    EXPECT_EQ(number->body, "NumSmartiesDist()");
    EXPECT_EQ(net.registry->lookup("NumSmartiesDist").family(), "Poisson");
    EXPECT_EQ(net.find("StickFamily(Smartie)"), nullptr);
    const auto* drawn = net.family_of("SmartieDrawn");
    ASSERT_NE(drawn, nullptr);
    EXPECT_EQ(drawn->kind, FamilyKind::Indicator);
    EXPECT_EQ(drawn->clauses[0].body.kind, CompiledDraw::Kind::ExtensionUniform);
    EXPECT_EQ(parent_labels(net, *drawn), std::vector<std::string>{"NumberFamily(Smartie)"});
}

TEST(Network, DescribeListsFamilyInventory) {
    const auto text = load("citations").network->describe();
    for (const char* label : {"StickFamily(Pub)", "StickFamily(Author)", "CollectionFamily(PubAuthorsDist)", "IndicatorFamily(RefPub)",
                              "IndicatorFamily(RefAuthor)", "AttributeFamily(CitedName)"}) {
        EXPECT_NE(text.find(label), std::string::npos) << label;
    }
}

TEST(Network, BuildIsDeterministic) {
    for (const char* name : {"citations", "citations_blog", "smarties", "smarties_blog"}) {
        EXPECT_EQ(load(name).network->describe(), load(name).network->describe()) << name;
    }
}

TEST(Network, CycleIsRejected) {
    const auto cfg = ModelConfig::parse("dist.N.family = Confusion\ndist.N.values = x, y\ndist.N.error = 0.1\n");
    EXPECT_EQ(code_of([&] {
                  compile_model("type A; guaranteed A; random String F(A); random String G(A);\nF(a) ~ N{G(a)};\nG(a) ~ N{F(a)};", cfg);
              }),
              ErrorCode::CycleDetected);
}
