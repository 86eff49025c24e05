#include <gtest/gtest.h>

#include "micro_models.hpp"
#include "npblog/citation_app.hpp"

using namespace npblog;

namespace {

std::string models_dir() { return NPBLOG_MODELS_DIR; }

Model load(const std::string& name) {
    return compile_model(detail::read_file(models_dir() + "/" + name + ".npblog"), ModelConfig::load(models_dir() + "/" + name + ".cfg"), name);
}

// The plain mixture with `draws` unobserved draws.
std::shared_ptr<const GroundModel> prior_mixture(double alpha, int truncation, int draws) {
    oracle::MicroSpec spec{truncation, alpha, {"red", "blue"}, {0.5, 0.5}, 0.2, {}};
    const auto model = compile_model(micro::kMixture, ModelConfig::parse(micro::config_for(spec, false, 0.0)));
    Evidence ev;
    std::vector<std::string> names;
    for (int i = 1; i <= draws; ++i) names.push_back("d" + std::to_string(i));
    ev.objects.emplace_back("Draw", names);
    return std::make_shared<const GroundModel>(ground(model.network, ev));
}

ChainSettings settings(std::size_t iters, std::size_t burnin, std::uint64_t seed) {
    ChainSettings s;
    s.iters = iters;
    s.burnin = burnin;
    s.seed = seed;
    return s;
}

}  // namespace

class MicroModelAgreement : public ::testing::TestWithParam<std::size_t> {};

TEST_P(MicroModelAgreement, EveryQueryMatchesEnumeration) {
    const auto m = micro::models()[GetParam()];
    const auto gm = micro::ground(m, micro::evidence(m));
    const auto trace = run_chain(gm, settings(101000, 1000, 5));
    ASSERT_EQ(trace.size(), 100000u);
    for (const auto& e : micro::expected(m)) {
        const auto answer = eval_query(trace, parse_query(*gm, e.query));
        EXPECT_LE(micro::distance(e, answer), 0.02) << m.name << ": " << e.query;
    }
}

INSTANTIATE_TEST_SUITE_P(Micro, MicroModelAgreement, ::testing::Values(0u, 1u, 2u, 3u), [](const auto& info) {
    std::string n = micro::models()[info.param].name;
    std::replace(n.begin(), n.end(), '-', '_');
    return n;
});

TEST(Oracle, IndicatorMassSumsToOne) {
    for (int K : {1, 2, 3, 4}) {
        for (int N : {1, 2, 3}) EXPECT_NEAR(oracle::total_indicator_mass(K, N, 0.7), 1.0, 1e-12) << K << " " << N;
    }
}

TEST(Oracle, IdenticalObservationsRaiseCoreference) {
    // Two draws seen with the same colour corefer more often than under the prior.
    oracle::MicroSpec spec{3, 1.0, {"red", "blue"}, {0.5, 0.5}, 0.05, {{0}, {0}}};
    const double posterior = oracle::enumerate(spec).coref[0][1];
    spec.error = 0.5;  // observation carries no information
    const double prior = oracle::enumerate(spec).coref[0][1];
    EXPECT_GT(posterior, prior);
}

TEST(Chain, PriorCountsMatchUrn) {
    // No evidence: n for three draws is 1, 2, 3 with probability 1/3, 1/2, 1/6.
    const auto gm = prior_mixture(1.0, 60, 3);
    const auto trace = run_chain(gm, settings(60000, 1000, 3));
    const auto a = eval_query(trace, parse_query(*gm, "CountPosterior(Ball)"));
    const double tv = 0.5 * (std::abs(a.mass("1") - 1.0 / 3.0) + std::abs(a.mass("2") - 0.5) + std::abs(a.mass("3") - 1.0 / 6.0));
    EXPECT_LE(tv, 0.02);
}

TEST(Chain, InitialCountsFollowUrn) {
    const auto gm = prior_mixture(1.0, 200, 20);
    const int n = 20000;
    const int ball = gm->symbols().require_type("Ball");
    double sum = 0.0, sq = 0.0;
    for (int i = 0; i < n; ++i) {
        Engine e(gm, static_cast<std::uint64_t>(i) + 1);
        e.initialize();
        const double c = static_cast<double>(e.count(ball));
        sum += c;
        sq += c * c;
    }
    const double mean = sum / n;
    const double se = std::sqrt((sq / n - mean * mean) / n);
    EXPECT_NEAR(mean, dp::expected_num_clusters(1.0, 20), 3.0 * se);
    EXPECT_NEAR(mean, 3.598, 0.05);
}

TEST(Chain, EvidenceNeverChanges) {
    const auto m = micro::models()[0];
    const auto gm = micro::ground(m, micro::evidence(m));
    ASSERT_FALSE(gm->observed.empty());
    const auto trace = run_chain(gm, settings(2000, 0, 9));
    for (const auto& s : trace.samples) {
        for (const auto& [v, x] : gm->observed) ASSERT_EQ(s.scalars[v], x);
    }
}

TEST(Chain, ActiveCountsMatchRecount) {
    SmartiesParams p;
    p.draws = 60;
    p.seed = 4;
    const auto corpus = generate_smarties(p);
    const auto model = load("smarties");
    const auto gm = std::make_shared<const GroundModel>(ground(model.network, corpus.evidence));
    Engine e(gm, 11);
    e.initialize();
    for (int it = 0; it < 50; ++it) {
        e.iterate();
        const auto fresh = e.recount();
        ASSERT_EQ(fresh, e.state().atom_counts);
        for (std::size_t t = 0; t < fresh.size(); ++t) {
            const long active = std::count_if(fresh[t].begin(), fresh[t].end(), [](long c) { return c > 0; });
            ASSERT_EQ(active, e.state().active[t]);
        }
    }
}

TEST(Chain, SameSeedSameTrace) {
    const auto m = micro::models()[3];
    const auto gm = micro::ground(m, micro::evidence(m));
    const auto a = run_chain(gm, settings(3000, 100, 21));
    const auto b = run_chain(gm, settings(3000, 100, 21));
    const auto c = run_chain(gm, settings(3000, 100, 22));
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) ASSERT_EQ(a.samples[i].scalars, b.samples[i].scalars);
    bool differs = false;
    for (std::size_t i = 0; i < a.size(); ++i) differs = differs || a.samples[i].scalars != c.samples[i].scalars;
    EXPECT_TRUE(differs);
}

TEST(Chain, StrongEvidencePinsAttribute) {
    oracle::MicroSpec spec{2, 1.0, {"red", "blue"}, {0.5, 0.5}, 0.001, {}};
    const auto model = compile_model(micro::kMixture, ModelConfig::parse(micro::config_for(spec, false, 0.0)));
    Evidence ev;
    ev.objects.emplace_back("Draw", std::vector<std::string>{"d1", "d2", "d3"});
    for (const char* d : {"d1", "d2", "d3"}) ev.observe("Seen", {d}, "red");
    const auto gm = std::make_shared<const GroundModel>(ground(model.network, ev));
    const auto trace = run_chain(gm, settings(5000, 500, 2));
    EXPECT_GT(eval_query(trace, parse_query(*gm, "AttributePosterior(Colour(Ref(d2)))")).mass("red"), 0.99);
}

TEST(Chain, ThinningAndBurnin) {
    const auto gm = prior_mixture(1.0, 10, 2);
    ChainSettings s = settings(100, 10, 1);
    s.thin = 3;
    const auto trace = run_chain(gm, s);
    EXPECT_EQ(trace.size(), 30u);
    EXPECT_EQ(trace.samples.front().iteration, 13u);
    s.burnin = 100;
    EXPECT_THROW(run_chain(gm, s), Error);
}

TEST(Chain, NumberStatementEvidenceIsRejected) {
    const auto model = load("smarties_blog");
    SmartiesParams p;
    p.draws = 10;
    const auto corpus = generate_smarties(p);
    const auto gm = std::make_shared<const GroundModel>(ground(model.network, corpus.evidence));
    try {
        Engine e(gm, 1);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::NumberStatementInference);
    }
}

TEST(Chain, NumberStatementForwardSampling) {
    const auto model = load("smarties_blog");
    Evidence ev;
    ev.objects.emplace_back("Draw", std::vector<std::string>{"d1", "d2", "d3"});
    const auto gm = std::make_shared<const GroundModel>(ground(model.network, ev));
    const int smartie = gm->symbols().require_type("Smartie");
    const int n = 10000;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
        Engine e(gm, static_cast<std::uint64_t>(i) + 1);
        e.initialize();
        sum += static_cast<double>(e.count(smartie));
    }
    EXPECT_NEAR(sum / n, 6.0, 3.0 * std::sqrt(6.0 / n));
}

TEST(Trace, ExportRoundTrip) {
    const auto m = micro::models()[2];
    const auto gm = micro::ground(m, micro::evidence(m));
    const auto trace = run_chain(gm, settings(50, 0, 3));
    std::ostringstream out;
    write_trace(out, trace);
    const auto table = TraceTable::parse(out.str());
    EXPECT_EQ(table.header, (std::vector<std::string>{"iteration", "n(Ball)", "RefL[l1]", "RefR[r1]", "RefR[r2]"}));
    ASSERT_EQ(table.rows.size(), 50u);
    EXPECT_EQ(table.rows[0][0], "1");
    EXPECT_EQ(table.rows[0][1], std::to_string(trace.samples[0].counts[0]));
}
