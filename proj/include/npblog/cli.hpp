#pragma once

// Command-line driver.
//
//   npblog check    --model M --config C
//   npblog run      --model M --config C --evidence E [--queries Q] [--iters N] [--burnin B]
//                   [--thin T] [--seed S] [--chains K] --out DIR
//   npblog eval     --trace TRACE.tsv --truth TRUTH.json [--function F]
//   npblog generate citations|smarties --out DIR [--seed S] [generator options]
//
// Exit codes: 0 success, 1 model or user error, 2 internal error.
// NPBLOG_LOG sets the log level (trace, debug, info, warn, error, off; default warn).

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "npblog/citation_app.hpp"

namespace npblog::cli {

namespace fs = std::filesystem;

struct RunManifest {
    std::string model, config, evidence, queries, out;
    ChainSettings chain;
    std::size_t chains = 1;

    void validate() const {
        chain.validate();
        if (chains < 1) throw Error(ErrorCode::InvalidParam, "--chains must be at least 1");
        for (const auto* p : {&model, &config, &evidence}) {
            if (!fs::exists(*p)) throw Error(ErrorCode::IoError, "no such file: " + *p);
        }
        if (!queries.empty() && !fs::exists(queries)) throw Error(ErrorCode::IoError, "no such file: " + queries);
    }
};

inline std::shared_ptr<spdlog::logger> logger() {
    static auto log = [] {
        auto l = spdlog::stderr_color_mt("npblog");
        const char* env = std::getenv("NPBLOG_LOG");
        l->set_level(env ? spdlog::level::from_str(env) : spdlog::level::warn);
        l->set_pattern("[%l] %v");
        return l;
    }();
    return log;
}

inline Model load_model(const std::string& model, const std::string& config) {
    return compile_model(detail::read_file(model), ModelConfig::load(config), model);
}

inline void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::IoError, "cannot write '" + path.string() + "'");
    out << text;
}

inline int cmd_check(const std::string& model, const std::string& config, std::ostream& out) {
    const auto m = load_model(model, config);
    out << m.network->describe();
    return 0;
}

/// Queries asked when no query file is given: the count posterior of every
/// unknown type and the new-object probability of every DP type.
inline std::vector<Query> default_queries(const GroundModel& gm) {
    std::vector<Query> qs;
    const auto& net = *gm.network;
    for (int t : net.unknown_types()) {
        const auto& name = gm.symbols().type(t).name;
        qs.push_back(parse_query(gm, "CountPosterior(" + name + ")"));
        if (net.stick_family[static_cast<std::size_t>(t)] >= 0) qs.push_back(parse_query(gm, "NewObjectProbability(" + name + ")"));
    }
    return qs;
}

inline std::string answers_text(const Trace& trace, const std::vector<Query>& queries) {
    std::vector<QueryAnswer> answers;
    for (const auto& q : queries) answers.push_back(eval_query(trace, q));
    std::ostringstream s;
    write_answers(s, answers);
    return s.str();
}

/// Writes trace_chain<i>.tsv and answers_chain<i>.tsv per chain, then the
/// pooled answers.tsv and hist_<Type>.tsv.
inline int cmd_run(const RunManifest& m, std::ostream& out) {
    m.validate();
    auto log = logger();
    const auto model = load_model(m.model, m.config);
    const auto evidence = Evidence::load(m.evidence);
    auto gm = std::make_shared<const GroundModel>(ground(model.network, evidence));
    const auto queries = m.queries.empty() ? default_queries(*gm) : parse_queries(*gm, detail::read_file(m.queries));
    log->info("{} ground variables, {} observed; {} chain(s) of {} iterations", gm->layout.num_vars, gm->observed.size(),
              m.chains, m.chain.iters);

    std::vector<Trace> traces(m.chains);
    std::vector<std::exception_ptr> failures(m.chains);
    {
        std::vector<std::jthread> workers;
        for (std::size_t c = 0; c < m.chains; ++c) {
            workers.emplace_back([&, c] {
                try {
                    ChainSettings s = m.chain;
                    s.seed = m.chain.seed + c;
                    traces[c] = run_chain(gm, s, [&](const Engine&, std::size_t it) {
                        if (it % 100 == 0) log->debug("chain {} iteration {}", c, it);
                    });
                } catch (...) {
                    failures[c] = std::current_exception();
                }
            });
        }
    }
    for (const auto& f : failures) {
        if (f) std::rethrow_exception(f);
    }

    fs::create_directories(m.out);
    for (std::size_t c = 0; c < m.chains; ++c) {
        std::ostringstream t;
        write_trace(t, traces[c]);
        write_file(fs::path(m.out) / ("trace_chain" + std::to_string(c) + ".tsv"), t.str());
        write_file(fs::path(m.out) / ("answers_chain" + std::to_string(c) + ".tsv"), answers_text(traces[c], queries));
    }
    const auto pooled = pool_traces(traces);
    write_file(fs::path(m.out) / "answers.tsv", answers_text(pooled, queries));
    for (int t : pooled.types) {
        std::ostringstream h;
        write_histogram(h, pooled, t);
        write_file(fs::path(m.out) / ("hist_" + gm->symbols().type(t).name + ".tsv"), h.str());
    }
    out << "wrote " << m.chains << " chain(s), " << pooled.size() << " pooled samples to " << m.out << "\n";
    return 0;
}

/// Recovery of every truth partition with matching trace columns, or of `function` only.
inline int cmd_eval(const std::string& trace_path, const std::string& truth_path, const std::string& function, std::ostream& out) {
    const auto table = TraceTable::load(trace_path);
    const auto truth = GroundTruth::load(truth_path);
    std::vector<std::string> functions;
    if (!function.empty()) {
        functions.push_back(function);
    } else {
        for (const auto& [f, p] : truth.partitions) {
            if (std::any_of(table.header.begin(), table.header.end(), [&](const std::string& h) { return h.rfind(f + "[", 0) == 0; })) {
                functions.push_back(f);
            }
        }
        if (functions.empty()) throw Error(ErrorCode::ItemSetMismatch, "trace has no columns for any partition in the ground truth");
    }
    for (const auto& f : functions) {
        const auto samples = trace_partitions(table, f);
        const auto r = evaluate_recovery(samples, consensus_of(samples), truth.partition(f));
        out << f << "\tsamples " << r.samples << "\tper-sample " << format_double(r.per_sample) << "\tconsensus "
            << format_double(r.consensus) << "\n";
    }
    return 0;
}

inline void write_corpus(const Corpus& c, const std::string& dir, std::ostream& out) {
    fs::create_directories(dir);
    write_file(fs::path(dir) / "evidence.json", c.evidence.to_json().dump(1) + "\n");
    write_file(fs::path(dir) / "truth.json", c.truth.to_json().dump(1) + "\n");
    out << "wrote " << c.evidence.observations.size() << " observations to " << dir << "\n";
}

inline int main(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"NP-BLOG interpreter and inference engine", "npblog"};
    app.require_subcommand(1);

    std::string model, config;
    auto* check = app.add_subcommand("check", "parse, resolve and compile a model; print its families");
    check->add_option("--model", model, "model source (.npblog)")->required();
    check->add_option("--config", config, "model configuration")->required();

    RunManifest run_m;
    auto* run = app.add_subcommand("run", "run Gibbs chains and answer queries");
    run->add_option("--model", run_m.model)->required();
    run->add_option("--config", run_m.config)->required();
    run->add_option("--evidence", run_m.evidence)->required();
    run->add_option("--queries", run_m.queries, "one query per line; defaults to counts and new-object probabilities");
    run->add_option("--iters", run_m.chain.iters)->capture_default_str();
    run->add_option("--burnin", run_m.chain.burnin)->capture_default_str();
    run->add_option("--thin", run_m.chain.thin)->capture_default_str();
    run->add_option("--seed", run_m.chain.seed)->capture_default_str();
    run->add_option("--chains", run_m.chains, "independent chains, seeded seed + index")->capture_default_str();
    run->add_option("--out", run_m.out, "output directory")->required();

    std::string trace_path, truth_path, function;
    auto* eval = app.add_subcommand("eval", "score a trace against ground-truth partitions");
    eval->add_option("--trace", trace_path)->required();
    eval->add_option("--truth", truth_path)->required();
    eval->add_option("--function", function, "indicator to score; default: every partition in the truth file");

    auto* gen = app.add_subcommand("generate", "write a synthetic evidence set with ground truth");
    gen->require_subcommand(1);
    std::string gen_out;
    SyntheticCorpusParams cp;
    auto* gen_cit = gen->add_subcommand("citations", "citation corpus for the citation model");
    gen_cit->add_option("--out", gen_out)->required();
    gen_cit->add_option("--seed", cp.seed)->capture_default_str();
    gen_cit->add_option("--pubs", cp.num_pubs)->capture_default_str();
    gen_cit->add_option("--authors", cp.num_authors)->capture_default_str();
    gen_cit->add_option("--citations-per-pub", cp.citations_per_pub)->capture_default_str();
    gen_cit->add_option("--min-authors", cp.min_authors_per_pub)->capture_default_str();
    gen_cit->add_option("--max-authors", cp.max_authors_per_pub)->capture_default_str();
    gen_cit->add_option("--title-noise", cp.title_noise)->capture_default_str();
    gen_cit->add_option("--name-noise", cp.name_noise)->capture_default_str();
    SmartiesParams sp;
    auto* gen_sm = gen->add_subcommand("smarties", "draws from a box of Smarties");
    gen_sm->add_option("--out", gen_out)->required();
    gen_sm->add_option("--seed", sp.seed)->capture_default_str();
    gen_sm->add_option("--colours", sp.colours)->capture_default_str();
    gen_sm->add_option("--draws", sp.draws)->capture_default_str();
    gen_sm->add_option("--palette", sp.palette)->capture_default_str();
    gen_sm->add_option("--error", sp.error)->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*check) return cmd_check(model, config, out);
        if (*run) return cmd_run(run_m, out);
        if (*eval) return cmd_eval(trace_path, truth_path, function, out);
        if (*gen_cit) write_corpus(generate_corpus(cp), gen_out, out);
        if (*gen_sm) write_corpus(generate_smarties(sp), gen_out, out);
        return 0;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace npblog::cli
