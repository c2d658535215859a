// cagen: corpus validation, generation, evaluation and reporting for
// counter-argument experiments.
#include <iostream>

#include "CLI11.hpp"
#include "cag/commands.hpp"
#include "cag/error.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Counter-argument generation and evaluation harness"};
    app.require_subcommand(1);

    std::string config_path = "config.json";
    std::string run_dir = "run";
    std::string corpus_path;
    std::string human_path;
    bool strict = false;
    bool verbose = false;
    std::size_t fan_out = 0;

    auto* validate = app.add_subcommand("validate", "Check a corpus file and print its statistics");
    validate->add_option("corpus", corpus_path, "Corpus JSONL file")->required();
    validate->add_flag("--strict", strict, "Fail on pairs longer than three sentences");

    auto* generate = app.add_subcommand("generate", "Retrieve evidence and generate counter-arguments");
    generate->add_option("--config", config_path, "Harness config (JSON)")->required();
    generate->add_option("--run-dir", run_dir, "Run directory")->required();
    generate->add_option("--corpus", corpus_path, "Corpus JSONL; copied into the run directory");
    generate->add_flag("--strict", strict, "Reject corpora with over-length pairs");
    generate->add_option("--fan-out", fan_out, "Concurrent items (overrides config)");

    auto* evaluate = app.add_subcommand("evaluate", "Judge generations and compute reference metrics");
    evaluate->add_option("--config", config_path, "Harness config (JSON)")->required();
    evaluate->add_option("--run-dir", run_dir, "Run directory")->required();
    evaluate->add_option("--human", human_path, "Human score file (TSV)");
    evaluate->add_option("--fan-out", fan_out, "Concurrent items (overrides config)");
    evaluate->add_flag("--verbose-similarity", verbose, "Keep every sentence-pair similarity");

    auto* report = app.add_subcommand("report", "Rank candidates and write report tables");
    report->add_option("--run-dir", run_dir, "Run directory")->required();

    CLI11_PARSE(app, argc, argv);

    cag::cli::CommandIO io{std::cout, std::cerr};
    try {
        if (*validate) return cag::cli::cmd_validate(corpus_path, strict, io);
        if (*report) return cag::cli::cmd_report(run_dir, io);
        const auto config = cag::load_config(config_path);
        if (*generate) {
            cag::cli::GenerateOptions opts;
            if (!corpus_path.empty()) opts.corpus = corpus_path;
            if (fan_out) opts.fan_out = fan_out;
            opts.strict = strict;
            return cag::cli::cmd_generate(config, run_dir, opts, io);
        }
        cag::cli::EvaluateOptions opts;
        if (!human_path.empty()) opts.human_scores = human_path;
        if (fan_out) opts.fan_out = fan_out;
        opts.verbose_similarity = verbose;
        return cag::cli::cmd_evaluate(config, run_dir, opts, io);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
