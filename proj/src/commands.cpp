#include "cag/commands.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "cag/corpus.hpp"
#include "cag/error.hpp"
#include "cag/judging.hpp"
#include "cag/pipeline.hpp"
#include "cag/ranking.hpp"
#include "cag/refmetrics.hpp"
#include "cag/scoresheet.hpp"
#include "cag/segment.hpp"
#include "cag/text.hpp"
#include "cag/utilization.hpp"

namespace cag::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string utc_now() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void write_text(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + path.string());
    out << content;
}

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

json read_json(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("missing input: " + path.string());
    return json::parse(in);
}

std::vector<json> read_jsonl(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("missing input: " + path.string());
    std::vector<json> out;
    std::string line;
    while (std::getline(in, line))
        if (!text::is_blank(line)) out.push_back(json::parse(line));
    return out;
}

void reset_dir(const fs::path& dir) {
    fs::remove_all(dir);
    fs::create_directories(dir);
}

json load_manifest(const RunLayout& run) {
    if (fs::exists(run.manifest())) return read_json(run.manifest());
    return json{{"run_id", "run-" + utc_now()}, {"created_at", utc_now()}, {"stages", json::object()}};
}

void save_stage(const RunLayout& run, const std::string& stage, json record,
                const json* config_snapshot) {
    json m = load_manifest(run);
    if (config_snapshot) m["config"] = *config_snapshot;
    m["updated_at"] = utc_now();
    m["stages"][stage] = std::move(record);
    write_json(run.manifest(), m);
}

std::string fmt(double v, int decimals = 4) {
    if (std::isnan(v)) return "NA";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    return buf;
}

std::vector<ArgumentPair> run_corpus(const RunLayout& run) {
    if (!fs::exists(run.corpus())) throw ValidationError("missing input: " + run.corpus().string());
    return corpus::load_corpus(run.corpus(), false);
}

}  // namespace

int cmd_validate(const fs::path& corpus_path, bool strict, CommandIO io) {
    std::vector<ArgumentPair> pairs;
    try {
        pairs = corpus::load_corpus(corpus_path, false);
    } catch (const Error& e) {
        io.err << "invalid corpus: " << e.what() << '\n';
        return 1;
    }
    int violations = 0;
    for (const auto& p : pairs) {
        if (!corpus::satisfies_strict(p)) {
            ++violations;
            try {
                corpus::check_strict(p);
            } catch (const ValidationError& e) {
                io.err << (strict ? "error: " : "warning: ") << e.what() << '\n';
            }
        }
    }
    io.out << "corpus: " << corpus_path.string() << '\n';
    io.out << "items: " << pairs.size() << '\n';
    if (!pairs.empty()) {
        const auto s = corpus::corpus_stats(pairs);
        char buf[256];
        std::snprintf(buf, sizeof buf,
                      "%-18s %10s %10s\n%-18s %10.2f %10.2f\n%-18s %10.2f %10.2f\n", "",
                      "#sentence", "#words", "arguments", s.mean_sentences_arg, s.mean_words_arg,
                      "counter-arguments", s.mean_sentences_counter, s.mean_words_counter);
        io.out << buf;
    }
    io.out << "over-length pairs (>3 sentences): " << violations << '\n';
    return strict && violations > 0 ? 1 : 0;
}

int cmd_generate(const HarnessConfig& config, const fs::path& run_dir, const GenerateOptions& options,
                 CommandIO io) {
    const RunLayout run{run_dir};
    fs::create_directories(run.root);
    const std::string started = utc_now();

    std::vector<ArgumentPair> pairs;
    if (options.corpus) {
        pairs = corpus::load_corpus(*options.corpus, options.strict);
        corpus::save_corpus(run.corpus(), pairs);
    } else {
        pairs = run_corpus(run);
        if (options.strict)
            for (const auto& p : pairs) corpus::check_strict(p);
    }
    if (config.systems.empty()) throw ValidationError("config lists no systems");

    ProviderSet providers = make_providers(config);
    pipeline::ExperimentOptions opts;
    opts.query_model = config.query_model;
    opts.fan_out = options.fan_out.value_or(config.fan_out);
    opts.parse_attempts = config.max_attempts();
    const auto result =
        pipeline::run_experiment(*providers.chat, *providers.search, pairs, config.systems, opts);

    reset_dir(run.evidence_dir());
    for (const auto& b : result.bundles) write_json(run.evidence(b.id()), to_json(b));
    write_generations(run.generations(), result.generations);

    json items = json::array();
    std::size_t failed = 0;
    for (const auto& s : result.items) {
        json item{{"argument_id", s.argument_id}, {"status", s.ok ? "ok" : "failed"}};
        if (!s.ok) {
            item["error"] = s.error;
            ++failed;
        }
        item["query_retries"] = s.query_retries;
        items.push_back(item);
    }
    std::size_t flagged = 0;
    for (const auto& g : result.generations) flagged += g.over_length_flag;
    json stage = providers.stats->to_json();
    stage["started_at"] = started;
    stage["finished_at"] = utc_now();
    stage["items"] = items;
    stage["records"] = result.generations.size();
    stage["evidence_bundles"] = result.bundles.size();
    stage["over_length_records"] = flagged;
    save_stage(run, "generate", stage, &config.snapshot);

    io.out << "generated " << result.generations.size() << " records for " << pairs.size()
           << " arguments x " << config.systems.size() << " systems (" << result.bundles.size()
           << " evidence bundles, " << failed << " failed items, " << flagged
           << " over-length)\n";
    io.out << "provider calls: " << providers.stats->provider_calls()
           << ", cache hits: " << providers.stats->cache_hits() << '\n';
    return failed > 0 ? 1 : 0;
}

int cmd_evaluate(const HarnessConfig& config, const fs::path& run_dir, const EvaluateOptions& options,
                 CommandIO io) {
    const RunLayout run{run_dir};
    const std::string started = utc_now();
    const auto pairs = run_corpus(run);
    const auto generations = read_generations(run.generations());
    if (generations.empty()) throw ValidationError("no generations in " + run.generations().string());
    fs::create_directories(run.scores_dir());
    fs::create_directories(run.reports_dir());

    // Human scores first: a bad file should fail before any provider work.
    std::optional<ScoreSheet> human;
    const auto candidates = judging::candidate_ids(config.systems);
    if (options.human_scores) human = ingest_human_scores(*options.human_scores, &candidates);

    ProviderSet providers = make_providers(config);
    const std::size_t fan_out = options.fan_out.value_or(config.fan_out);

    std::map<std::string, std::vector<std::string>> item_problems;
    for (const auto& judge : config.judges) {
        auto js = judging::build_judge_sheet(*providers.chat, judge.id, judge.model, generations,
                                             pairs, config.systems, fan_out, config.max_attempts());
        save_score_sheet(run.scores_dir() / (judge.id + ".tsv"), js.sheet);
        for (const auto& f : js.failures)
            item_problems[f.item_id].push_back(judge.id + "/" + f.candidate_id + ": " + f.error);
        io.out << "judge " << judge.id << ": " << js.sheet.present_count() << " scores, "
               << js.failures.size() << " masked candidates\n";
    }
    if (human) {
        save_score_sheet(run.scores_dir() / "human.tsv", *human);
        io.out << "human scores: " << human->items().size() << " items x "
               << human->candidates().size() << " candidates x " << human->evaluators().size()
               << " evaluators, " << human->masked_count() << " masked cells\n";
    }

    std::optional<refmetrics::SynonymLexicon> lexicon;
    if (config.synonyms) lexicon = refmetrics::SynonymLexicon::load(*config.synonyms);
    refmetrics::ScoreOptions sopts;
    sopts.synonyms = lexicon ? &*lexicon : nullptr;
    sopts.units = config.units;
    const auto table = refmetrics::score_generations(generations, pairs, *providers.embed, sopts);
    {
        std::ostringstream items;
        for (const auto& m : table.per_item)
            items << json{{"argument_id", m.argument_id},
                          {"system_id", m.system_id},
                          {"bleu", m.bleu},
                          {"rouge", m.rouge},
                          {"meteor", m.meteor},
                          {"bertscore", m.bertscore}}
                         .dump()
                  << '\n';
        write_text(run.scores_dir() / "refmetrics_items.jsonl", items.str());
    }
    write_text(run.reports_dir() / "refmetrics.txt", refmetrics::render_table(table));
    {
        std::ostringstream tex;
        for (const auto& row : table.rows) tex << refmetrics::format_latex_row(row.system_id, row) << '\n';
        write_text(run.reports_dir() / "refmetrics.tex", tex.str());
    }
    write_json(run.reports_dir() / "refmetrics.json", refmetrics::to_json(table));
    io.out << refmetrics::render_table(table);

    std::ostringstream util;
    std::size_t util_count = 0;
    const bool verbose = options.verbose_similarity || config.verbose_similarity;
    for (const auto& g : generations) {
        if (!g.with_knowledge) continue;
        try {
            const auto bundle = evidence_bundle_from_json(read_json(run.evidence(*g.evidence_ref)));
            const auto rec = analysis::evidence_utilization(g, bundle, *providers.embed,
                                                            config.thresholds, verbose);
            util << to_json(rec).dump() << '\n';
            ++util_count;
        } catch (const Error& e) {
            item_problems[g.argument_id].push_back("utilization/" + g.system_id + ": " + e.what());
        }
    }
    write_text(run.scores_dir() / "utilization.jsonl", util.str());

    json items = json::array();
    for (const auto& p : pairs) {
        json item{{"argument_id", p.id}};
        auto it = item_problems.find(p.id);
        item["status"] = it == item_problems.end() ? "ok" : "partial";
        if (it != item_problems.end()) item["problems"] = it->second;
        items.push_back(item);
    }
    json stage = providers.stats->to_json();
    stage["started_at"] = started;
    stage["finished_at"] = utc_now();
    stage["items"] = items;
    stage["judges"] = json::array();
    for (const auto& j : config.judges) stage["judges"].push_back(j.id);
    stage["human_scores"] = options.human_scores ? json(options.human_scores->string()) : json(nullptr);
    stage["utilization_records"] = util_count;
    save_stage(run, "evaluate", stage, &config.snapshot);
    io.out << "provider calls: " << providers.stats->provider_calls()
           << ", cache hits: " << providers.stats->cache_hits() << '\n';
    return item_problems.empty() ? 0 : 1;
}

int cmd_report(const fs::path& run_dir, CommandIO io) {
    const RunLayout run{run_dir};
    if (!fs::is_directory(run.scores_dir()))
        throw ValidationError("missing input: " + run.scores_dir().string() + " (run evaluate first)");
    fs::create_directories(run.reports_dir());

    // Score sheets: human first, then judges by name.
    std::vector<std::pair<std::string, ScoreSheet>> sheets;
    std::vector<fs::path> judge_files;
    for (const auto& entry : fs::directory_iterator(run.scores_dir())) {
        if (entry.path().extension() != ".tsv") continue;
        if (entry.path().stem() == "human") continue;
        judge_files.push_back(entry.path());
    }
    std::sort(judge_files.begin(), judge_files.end());
    if (fs::exists(run.scores_dir() / "human.tsv"))
        sheets.emplace_back("human", ingest_human_scores(run.scores_dir() / "human.tsv"));
    for (const auto& f : judge_files) sheets.emplace_back(f.stem().string(), ingest_human_scores(f));
    if (sheets.empty()) throw ValidationError("missing input: no score sheets in " + run.scores_dir().string());

    std::vector<std::string> columns;
    for (const auto& [name, sheet] : sheets)
        for (const auto& c : sheet.candidates())
            if (std::find(columns.begin(), columns.end(), c) == columns.end()) columns.push_back(c);

    json report;
    std::ostringstream overall, per_dim;
    overall << "method\tevaluator";
    per_dim << "method\tevaluator\tdimension";
    for (const auto& c : columns) {
        overall << '\t' << c;
        per_dim << '\t' << c;
    }
    overall << '\n';
    per_dim << '\n';

    std::vector<std::pair<std::string, std::map<ranking::ItemCandidate, double>>> methods;
    auto column_values = [&](const ScoreSheet& sheet, const std::vector<double>& values) {
        std::vector<double> out(columns.size(), std::nan(""));
        for (std::size_t c = 0; c < sheet.candidates().size(); ++c) {
            auto it = std::find(columns.begin(), columns.end(), sheet.candidates()[c]);
            out[static_cast<std::size_t>(it - columns.begin())] = values[c];
        }
        return out;
    };
    auto emit_row = [&](std::ostringstream& os, const std::vector<std::string>& lead,
                        const std::vector<double>& values) {
        for (std::size_t i = 0; i < lead.size(); ++i) os << (i ? "\t" : "") << lead[i];
        for (double v : values) os << '\t' << fmt(v);
        os << '\n';
    };

    json overall_json = json::array();
    for (const auto& [name, sheet] : sheets) {
        const auto table = ranking::rank_table(sheet);
        const auto pooled = column_values(sheet, table.pooled_mean_rank());
        emit_row(overall, {name, "*"}, pooled);
        json row{{"method", name}, {"evaluator", "*"}};
        json ranks = json::object();
        for (std::size_t c = 0; c < columns.size(); ++c)
            ranks[columns[c]] = std::isnan(pooled[c]) ? json(nullptr) : json(pooled[c]);
        row["mean_rank"] = ranks;
        overall_json.push_back(row);
        if (sheet.evaluators().size() > 1) {
            for (const auto& ev : table.evaluators) emit_row(overall, {name, ev.evaluator}, column_values(sheet, ev.mean_rank));
        }
        const auto dims = ranking::per_dimension_ranks(sheet);
        for (auto d : kDimensions)
            emit_row(per_dim, {name, "*", std::string(dimension_name(d))},
                     column_values(sheet, dims.back()[static_cast<std::size_t>(d)]));
        methods.emplace_back(name, table.pooled_item_ranks());
    }
    report["overall_ranks"] = overall_json;
    write_text(run.reports_dir() / "overall_ranks.tsv", overall.str());
    write_text(run.reports_dir() / "per_dimension_ranks.tsv", per_dim.str());

    // Reference metrics as ranking methods over the generated candidates.
    const fs::path items_path = run.scores_dir() / "refmetrics_items.jsonl";
    if (fs::exists(items_path)) {
        std::map<std::string, std::map<std::string, std::array<double, 4>>> by_item;
        for (const auto& j : read_jsonl(items_path))
            by_item[j.at("argument_id").get<std::string>()][j.at("system_id").get<std::string>()] = {
                j.at("bleu").get<double>(), j.at("rouge").get<double>(),
                j.at("meteor").get<double>(), j.at("bertscore").get<double>()};
        static constexpr std::array<const char*, 4> kMetricNames = {"bleu", "rouge", "meteor", "bertscore"};
        for (std::size_t m = 0; m < kMetricNames.size(); ++m) {
            std::map<ranking::ItemCandidate, double> ranks;
            for (const auto& [item, systems] : by_item) {
                if (systems.size() < 2) continue;
                std::vector<double> vals;
                for (const auto& [sys, v] : systems) vals.push_back(v[m]);
                const auto r = ranking::rank_descending(vals);
                std::size_t k = 0;
                for (const auto& [sys, v] : systems) ranks[{item, sys}] = r[k++];
            }
            methods.emplace_back(kMetricNames[m], std::move(ranks));
        }
    }

    if (methods.size() >= 2) {
        try {
            const auto cm = ranking::correlation_matrix(methods);
            write_text(run.reports_dir() / "correlation.tsv", ranking::render_matrix_tsv(cm));
            report["correlation"] = ranking::to_json(cm);
            io.out << "Spearman correlation over " << cm.aligned_pairs << " (item, candidate) pairs:\n"
                   << ranking::render_matrix_tsv(cm);
        } catch (const PreconditionError& e) {
            report["correlation"] = json{{"error", e.what()}};
            io.err << "correlation skipped: " << e.what() << '\n';
        }
    }

    const fs::path util_path = run.scores_dir() / "utilization.jsonl";
    if (fs::exists(util_path)) {
        std::vector<analysis::UtilizationRecord> recs;
        for (const auto& j : read_jsonl(util_path)) recs.push_back(analysis::utilization_record_from_json(j));
        if (!recs.empty()) {
            const auto rows = analysis::utilization_summary(recs);
            write_text(run.reports_dir() / "utilization_summary.tsv", analysis::render_summary(rows));
            json u = json::array();
            for (const auto& r : rows)
                u.push_back({{"system_id", r.system_id},
                             {"total", r.total},
                             {"utilized", r.utilized},
                             {"partial", r.partial},
                             {"not_utilized", r.not_utilized},
                             {"utilized_fraction", r.utilized_fraction()},
                             {"partial_fraction", r.partial_fraction()}});
            report["utilization"] = u;
            io.out << "evidence utilization:\n" << analysis::render_summary(rows);
        }
    }
    write_json(run.reports_dir() / "report.json", report);
    io.out << "overall mean ranks (1 = best):\n" << overall.str();

    json stage{{"finished_at", utc_now()}, {"provider_calls", 0}, {"methods", json::array()}};
    for (const auto& m : methods) stage["methods"].push_back(m.first);
    if (fs::exists(run.corpus())) {
        json items = json::array();
        for (const auto& p : corpus::load_corpus(run.corpus(), false)) {
            bool ranked = false;
            for (const auto& m : methods)
                for (const auto& [key, r] : m.second) ranked = ranked || key.first == p.id;
            items.push_back({{"argument_id", p.id}, {"status", ranked ? "reported" : "excluded"}});
        }
        stage["items"] = items;
    }
    save_stage(run, "report", stage, nullptr);
    return 0;
}

}  // namespace cag::cli
