#pragma once

#include <chrono>
#include "json.hpp"
#include <string>

#include "cag/providers.hpp"

namespace cag::http {

struct Endpoint {
    std::string url;  // scheme://host[:port]/path
    std::string api_key;
    // Merged into every request body (e.g. a search-tool connector list).
    nlohmann::json extra_body = nlohmann::json::object();
    std::chrono::seconds timeout{120};
};

// Reads a required credential from the environment. Throws
// ValidationError naming the variable when it is unset or empty.
std::string require_env(const std::string& name);

// OpenAI-compatible chat completions: {"model", "messages", ...knobs}.
class HttpChat final : public ChatProvider {
public:
    HttpChat(std::string provider_id, Endpoint endpoint);
    std::string id() const override { return id_; }
    std::string complete(const ChatRequest& request) override;

private:
    std::string id_;
    Endpoint ep_;
};

// A search-grounded chat endpoint: sends the web-search prompt for the
// question and returns the reply as bullet evidence. URLs are collected
// from "citations", "documents" or "search_results" when present.
class HttpSearch final : public SearchProvider {
public:
    HttpSearch(std::string provider_id, Endpoint endpoint, std::string model);
    std::string id() const override { return id_; }
    SearchAnswer search(const std::string& question) override;

private:
    std::string id_;
    Endpoint ep_;
    std::string model_;
};

// OpenAI-compatible embeddings: {"model", "input": [...]} -> data[i].embedding.
class HttpEmbedding final : public EmbeddingProvider {
public:
    HttpEmbedding(std::string provider_id, Endpoint endpoint, std::string model);
    std::string id() const override { return id_; }
    std::vector<EmbeddingVector> embed(std::span<const std::string> texts) override;

private:
    std::string id_;
    Endpoint ep_;
    std::string model_;
};

// POSTs JSON and returns the parsed reply. Transport failures, 429 and 5xx
// raise transient ProviderErrors; other non-2xx statuses are permanent.
nlohmann::json post_json(const Endpoint& ep, const nlohmann::json& body);

}  // namespace cag::http
