#include <gtest/gtest.h>

#include <unistd.h>

#include "npblog/cli.hpp"

using namespace npblog;
namespace fs = std::filesystem;

namespace {

std::string models_dir() { return NPBLOG_MODELS_DIR; }
std::string model_file(const std::string& name) { return models_dir() + "/" + name + ".npblog"; }
std::string config_file(const std::string& name) { return models_dir() + "/" + name + ".cfg"; }

struct Result {
    int code;
    std::string out, err;
};

Result run(std::vector<std::string> args) {
    args.insert(args.begin(), "npblog");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = cli::main(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) { return detail::read_file(p.string()); }

class Cli : public ::testing::Test {
  protected:
    fs::path dir;

    void SetUp() override {
        const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
        dir = fs::temp_directory_path() / ("npblog_cli_" + std::to_string(::getpid()) + "_" + info->name());
        fs::remove_all(dir);
        fs::create_directories(dir);
    }
    void TearDown() override { fs::remove_all(dir); }

    fs::path write(const std::string& name, const std::string& text) {
        const auto p = dir / name;
        cli::write_file(p, text);
        return p;
    }
};

}  // namespace

TEST_F(Cli, CheckAcceptsBundledModels) {
    for (const char* m : {"citations", "citations_blog", "smarties", "smarties_blog"}) {
        const auto r = run({"check", "--model", model_file(m), "--config", config_file(m)});
        EXPECT_EQ(r.code, 0) << m << ": " << r.err;
    }
    const auto r = run({"check", "--model", model_file("citations"), "--config", config_file("citations")});
    EXPECT_NE(r.out.find("StickFamily(Pub)"), std::string::npos) << r.out;
    EXPECT_NE(r.out.find("StickFamily(Author)"), std::string::npos);
    EXPECT_NE(r.out.find("CollectionFamily(PubAuthorsDist)"), std::string::npos);
}

TEST_F(Cli, CheckReportsSyntaxErrors) {
    const auto bad = write("bad.npblog", "type Author;\nName(a) ~ ;\n");
    const auto r = run({"check", "--model", bad.string(), "--config", config_file("citations")});
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("ParseError"), std::string::npos) << r.err;
    EXPECT_NE(r.err.find("2:11"), std::string::npos) << r.err;
}

TEST_F(Cli, CheckReportsExchangeabilityViolations) {
    auto src = slurp(model_file("smarties"));
    src += "ObsColour(d) ~ NoiseDist{Colour(1)};\n";
    const auto bad = write("bad.npblog", src);
    const auto r = run({"check", "--model", bad.string(), "--config", config_file("smarties")});
    EXPECT_EQ(r.code, 1);
    EXPECT_FALSE(r.err.empty());
}

TEST_F(Cli, MissingOptionsAndFiles) {
    EXPECT_EQ(run({"check", "--model", model_file("smarties")}).code, 1);
    EXPECT_EQ(run({}).code, 1);
    const auto r = run({"check", "--model", (dir / "none.npblog").string(), "--config", config_file("smarties")});
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("IoError"), std::string::npos) << r.err;
}

TEST_F(Cli, RunIsReproducible) {
    ASSERT_EQ(run({"generate", "smarties", "--out", dir.string(), "--draws", "30", "--seed", "3"}).code, 0);
    auto go = [&](const std::string& out) {
        return run({"run", "--model", model_file("smarties"), "--config", config_file("smarties"), "--evidence",
                    (dir / "evidence.json").string(), "--iters", "200", "--burnin", "20", "--seed", "7", "--chains", "2",
                    "--out", (dir / out).string()});
    };
    ASSERT_EQ(go("a").code, 0);
    ASSERT_EQ(go("b").code, 0);
    for (const char* f : {"trace_chain0.tsv", "trace_chain1.tsv", "answers_chain0.tsv", "answers.tsv", "hist_Smartie.tsv"}) {
        ASSERT_TRUE(fs::exists(dir / "a" / f)) << f;
        EXPECT_EQ(slurp(dir / "a" / f), slurp(dir / "b" / f)) << f;
    }
    EXPECT_NE(slurp(dir / "a" / "trace_chain0.tsv"), slurp(dir / "a" / "trace_chain1.tsv"));
}

TEST_F(Cli, CitationRunAndEval) {
    ASSERT_EQ(run({"generate", "citations", "--out", dir.string(), "--pubs", "6", "--authors", "8", "--seed", "2"}).code, 0);
    const auto queries = write("queries.txt", "# pairs\nCoreference(RefPub, c1, c2)\nCountPosterior(Pub)\n");
    const auto r = run({"run", "--model", model_file("citations"), "--config", config_file("citations"), "--evidence",
                        (dir / "evidence.json").string(), "--queries", queries.string(), "--iters", "60", "--seed", "1",
                        "--out", (dir / "out").string()});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_TRUE(fs::exists(dir / "out" / "hist_Pub.tsv"));

    std::istringstream answers(slurp(dir / "out" / "answers.tsv"));
    std::string line;
    bool found = false;
    while (std::getline(answers, line)) {
        const std::string key = "Coreference(RefPub, c1, c2)\ttrue\t";
        if (line.rfind(key, 0) != 0) continue;
        found = true;
        const double p = std::stod(line.substr(key.size()));
        EXPECT_GE(p, 0.0);
        EXPECT_LE(p, 1.0);
    }
    EXPECT_TRUE(found);

    const auto e = run({"eval", "--trace", (dir / "out" / "trace_chain0.tsv").string(), "--truth", (dir / "truth.json").string()});
    ASSERT_EQ(e.code, 0) << e.err;
    EXPECT_NE(e.out.find("RefPub\tsamples 60"), std::string::npos) << e.out;
}

TEST_F(Cli, EvalOnPerfectTrace) {
    write("truth.json", R"({"partitions": {"RefPub": [["c1", "c3"], ["c2"]]}})");
    write("trace.tsv", "iteration\tn(Pub)\tRefPub[c1]\tRefPub[c2]\tRefPub[c3]\n1\t2\t4\t0\t4\n2\t2\t1\t2\t1\n");
    const auto r = run({"eval", "--trace", (dir / "trace.tsv").string(), "--truth", (dir / "truth.json").string()});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.out, "RefPub\tsamples 2\tper-sample 1\tconsensus 1\n");
}

TEST_F(Cli, EvalRejectsEmptyTrace) {
    write("truth.json", R"({"partitions": {"RefPub": [["c1"]]}})");
    write("trace.tsv", "iteration\tn(Pub)\tRefPub[c1]\n");
    const auto r = run({"eval", "--trace", (dir / "trace.tsv").string(), "--truth", (dir / "truth.json").string()});
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("EmptyTrace"), std::string::npos) << r.err;
}

TEST_F(Cli, NumberStatementRunFails) {
    ASSERT_EQ(run({"generate", "smarties", "--out", dir.string(), "--draws", "5"}).code, 0);
    const auto r = run({"run", "--model", model_file("smarties_blog"), "--config", config_file("smarties_blog"), "--evidence",
                        (dir / "evidence.json").string(), "--iters", "10", "--out", (dir / "out").string()});
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("NumberStatementInference"), std::string::npos) << r.err;
}
