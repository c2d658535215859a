#pragma once

#include <filesystem>
#include "json.hpp"
#include <optional>
#include <string>
#include <vector>

#include "cag/corpus.hpp"
#include "cag/providers.hpp"

namespace cag {

inline constexpr std::size_t kQueriesPerArgument = 5;

// One generation system: a model run with or without retrieved evidence.
struct SystemConfig {
    std::string id;
    std::string model;
    bool with_knowledge = false;
};

struct EvidenceBundle {
    std::string argument_id;
    std::vector<std::string> queries;   // exactly kQueriesPerArgument
    std::vector<SearchAnswer> answers;  // aligned with queries
    std::string concatenated_context;

    // Bundles are stored one per argument, so the argument id names them.
    const std::string& id() const { return argument_id; }
    friend bool operator==(const EvidenceBundle&, const EvidenceBundle&) = default;
};

nlohmann::json to_json(const EvidenceBundle& b);
EvidenceBundle evidence_bundle_from_json(const nlohmann::json& j);

struct GenerationRecord {
    std::string argument_id;
    std::string system_id;
    std::string model_id;
    bool with_knowledge = false;
    std::string counter_text;
    std::optional<std::string> evidence_ref;
    bool over_length_flag = false;
    int repair_prompts = 0;

    friend bool operator==(const GenerationRecord&, const GenerationRecord&) = default;
};

nlohmann::json to_json(const GenerationRecord& r);
GenerationRecord generation_record_from_json(const nlohmann::json& j);

std::vector<GenerationRecord> read_generations(const std::filesystem::path& path);
void write_generations(const std::filesystem::path& path, const std::vector<GenerationRecord>& recs);

namespace pipeline {

struct QueryResult {
    std::vector<std::string> queries;
    int retries = 0;
};

// Extracts a list of query strings from a JSON-shaped reply: a bare array,
// an object holding one array, or either inside a fenced code block.
// Items may be strings or objects with a "query"/"question" field.
std::optional<std::vector<std::string>> parse_query_list(const std::string& reply);

// Asks for five challenge queries; re-prompts (up to `max_attempts` total
// calls) while the reply does not parse to exactly five non-empty strings.
QueryResult generate_queries(ChatProvider& chat, const std::string& model_id,
                             const std::string& argument, int max_attempts = 3);

// Answers joined with a blank line, in query order.
std::string join_context(const std::vector<SearchAnswer>& answers);

EvidenceBundle retrieve_evidence(SearchProvider& search, const std::string& argument_id,
                                 const std::vector<std::string>& queries);

GenerationRecord generate_with_knowledge(ChatProvider& chat, const SystemConfig& system,
                                         const ArgumentPair& pair, const EvidenceBundle& evidence);

// `evidence` must be null; supplying one is a contract violation.
GenerationRecord generate_parametric(ChatProvider& chat, const SystemConfig& system,
                                     const ArgumentPair& pair,
                                     const EvidenceBundle* evidence = nullptr);

struct ItemStatus {
    std::string argument_id;
    bool ok = true;
    std::string error;
    int query_retries = 0;
};

struct ExperimentResult {
    std::vector<EvidenceBundle> bundles;       // corpus order, successful items only
    std::vector<GenerationRecord> generations;  // corpus order x config order
    std::vector<ItemStatus> items;             // one per corpus pair
};

struct ExperimentOptions {
    // Model used for query generation; defaults to the first knowledge system's.
    std::string query_model;
    std::size_t fan_out = 4;
    int parse_attempts = 3;
};

// Runs every (pair, system) combination. Queries and evidence are produced
// once per argument and shared by all knowledge systems. A failure at any
// stage drops the whole item and is reported in `items`.
ExperimentResult run_experiment(ChatProvider& chat, SearchProvider& search,
                                const std::vector<ArgumentPair>& corpus,
                                const std::vector<SystemConfig>& systems,
                                const ExperimentOptions& options = {});

}  // namespace pipeline
}  // namespace cag
