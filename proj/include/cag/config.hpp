#pragma once

#include <filesystem>
#include <memory>
#include "json.hpp"
#include <optional>
#include <string>
#include <vector>

#include "cag/pipeline.hpp"
#include "cag/providers.hpp"
#include "cag/refmetrics.hpp"
#include "cag/utilization.hpp"

namespace cag {

// kind "mock" or "http". For http, `endpoint` is the full URL and the
// credential comes from `api_key_env`.
struct ProviderSpec {
    std::string kind = "mock";
    std::string id;
    std::string endpoint;
    std::string model;
    std::string api_key_env;
    nlohmann::json extra_body = nlohmann::json::object();
    std::size_t dimension = 256;  // mock embedder only
    int timeout_s = 120;
};

struct JudgeConfig {
    std::string id;
    std::string model;
};

struct HarnessConfig {
    std::filesystem::path cache_dir = "cache";
    std::size_t fan_out = 4;
    int retries = 2;  // re-tries after the first attempt
    long backoff_ms = 500;
    ProviderSpec chat, search, embed;
    std::string query_model;
    std::vector<SystemConfig> systems;
    std::vector<JudgeConfig> judges;
    analysis::Thresholds thresholds;
    refmetrics::EmbeddingUnits units = refmetrics::EmbeddingUnits::Sentence;
    std::optional<std::filesystem::path> synonyms;
    bool verbose_similarity = false;
    nlohmann::json snapshot;  // config as loaded, for the manifest

    int max_attempts() const { return retries + 1; }
};

// Relative paths inside the file resolve against the file's directory.
HarnessConfig load_config(const std::filesystem::path& path);
HarnessConfig parse_config(const nlohmann::json& j, const std::filesystem::path& base_dir);

struct ProviderSet {
    std::shared_ptr<ChatProvider> chat;
    std::shared_ptr<SearchProvider> search;
    std::shared_ptr<EmbeddingProvider> embed;
    std::shared_ptr<CallStats> stats;
};

// Builds cached providers. Live (http) providers read their credential
// from the environment and fail fast, naming the variable, when unset.
ProviderSet make_providers(const HarnessConfig& config);

}  // namespace cag
