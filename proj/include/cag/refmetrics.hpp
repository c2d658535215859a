#pragma once

#include <filesystem>
#include <map>
#include "json.hpp"
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "cag/corpus.hpp"
#include "cag/pipeline.hpp"
#include "cag/providers.hpp"

namespace cag::refmetrics {

// Lowercases and splits into word tokens, emitting every punctuation
// character as its own token. Apostrophes and hyphens between letters
// stay inside the word ("don't", "well-known").
std::vector<std::string> tokenize(std::string_view text);

struct MetricResult {
    std::string metric_name;
    double value = 0.0;  // in [0, 1]
    nlohmann::json details = nlohmann::json::object();
};

inline constexpr int kBleuMaxOrder = 4;
inline constexpr double kBleuEpsilon = 0.1;

// Sentence BLEU up to 4-grams, uniform weights, brevity penalty. Orders
// with zero clipped matches use (epsilon / candidate n-gram count) as
// precision; orders the candidate is too short to contain are left out
// of the geometric mean. No unigram overlap scores exactly 0.
MetricResult bleu(std::string_view candidate, std::string_view reference);

// ROUGE-L F1 (beta = 1) over tokens.
MetricResult rouge_l(std::string_view candidate, std::string_view reference);

std::size_t lcs_length(const std::vector<std::string>& a, const std::vector<std::string>& b);

// Symmetric synonym lookup built from groups of interchangeable words.
class SynonymLexicon {
public:
    void add_group(const std::vector<std::string>& words);
    bool synonyms(const std::string& a, const std::string& b) const;
    bool empty() const { return group_of_.empty(); }

    // One group per line, words separated by tabs; '#' starts a comment.
    static SynonymLexicon load(const std::filesystem::path& path);

private:
    std::unordered_map<std::string, std::vector<std::size_t>> group_of_;
    std::size_t groups_ = 0;
};

struct MeteorParams {
    double alpha = 0.9;   // recall weight: Fmean = PR / (alpha P + (1 - alpha) R)
    double beta = 3.0;    // fragmentation exponent
    double gamma = 0.5;   // maximum penalty
};

// Unigram alignment in stages (exact, Porter stem, synonym); within a
// stage each candidate token, left to right, takes the first unaligned
// reference token it matches. Penalty = gamma * frag^beta with
// frag = (chunks - 1) / (matches - 1), so a single in-order chunk costs
// nothing.
MetricResult meteor(std::string_view candidate, std::string_view reference,
                    const SynonymLexicon* synonyms = nullptr, const MeteorParams& params = {});

enum class EmbeddingUnits { Sentence, Token };

// Greedy max-cosine alignment between unit embeddings (negative cosines
// clamped to 0): precision averages over candidate units, recall over
// reference units, F1 is their harmonic mean.
MetricResult embedding_f1(std::string_view candidate, std::string_view reference,
                          EmbeddingProvider& embedder, EmbeddingUnits units = EmbeddingUnits::Sentence);

// Same computation on precomputed unit embeddings.
MetricResult embedding_f1_from_vectors(const std::vector<EmbeddingVector>& candidate_units,
                                       const std::vector<EmbeddingVector>& reference_units);

std::vector<std::string> embedding_units(std::string_view text, EmbeddingUnits units);

struct ItemMetrics {
    std::string argument_id;
    std::string system_id;
    double bleu = 0, rouge = 0, meteor = 0, bertscore = 0;  // each in [0, 1]
};

struct MetricRow {
    std::string system_id;
    double bleu = 0, rouge = 0, meteor = 0, bertscore = 0, avg = 0;  // x100
    std::size_t items = 0;
};

struct MetricTable {
    std::vector<MetricRow> rows;       // system order of first appearance
    std::vector<ItemMetrics> per_item;  // generation order
};

struct ScoreOptions {
    const SynonymLexicon* synonyms = nullptr;
    EmbeddingUnits units = EmbeddingUnits::Sentence;
};

// Scores every generation against its gold reference. Embeddings are
// fetched in one batch up front; the per-item metric work then runs in
// parallel. Rows hold per-system means x100 and their average.
MetricTable score_generations(const std::vector<GenerationRecord>& generations,
                              const std::vector<ArgumentPair>& corpus, EmbeddingProvider& embedder,
                              const ScoreOptions& options = {});

// "name & 20.80 & 18.67 & 16.81 & 86.15 & 35.60 \\" (two decimals).
std::string format_latex_row(const std::string& name, const MetricRow& row);
std::string render_table(const MetricTable& table);
nlohmann::json to_json(const MetricTable& table);

}  // namespace cag::refmetrics
