#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <functional>
#include <memory>
#include "json.hpp"
#include <span>
#include <string>
#include <vector>

namespace cag {

struct ChatRequest {
    std::string model_id;
    std::string prompt;
    // Generation knobs forwarded to the provider; empty means provider defaults.
    nlohmann::json knobs = nlohmann::json::object();
    // Distinguishes deliberate re-prompts of an identical prompt (retries
    // after a bad parse, length repair). Part of the cache identity, never
    // sent to the provider.
    int sample = 0;
};

struct SearchAnswer {
    std::string query;
    std::string answer_text;  // bullet-point evidence
    std::vector<std::string> source_urls;
    std::string retrieved_at;  // ISO-8601 UTC
    bool no_results = false;

    friend bool operator==(const SearchAnswer&, const SearchAnswer&) = default;
};

nlohmann::json to_json(const SearchAnswer& a);
SearchAnswer search_answer_from_json(const nlohmann::json& j);

struct EmbeddingVector {
    std::vector<double> values;
    bool zero_norm = false;  // only legal for empty input

    std::size_t dimension() const noexcept { return values.size(); }
    friend bool operator==(const EmbeddingVector&, const EmbeddingVector&) = default;
};

class ChatProvider {
public:
    virtual ~ChatProvider() = default;
    virtual std::string id() const = 0;
    virtual std::string complete(const ChatRequest& request) = 0;
};

class SearchProvider {
public:
    virtual ~SearchProvider() = default;
    virtual std::string id() const = 0;
    virtual SearchAnswer search(const std::string& question) = 0;
};

class EmbeddingProvider {
public:
    virtual ~EmbeddingProvider() = default;
    virtual std::string id() const = 0;
    virtual std::vector<EmbeddingVector> embed(std::span<const std::string> texts) = 0;
};

struct RetryPolicy {
    int max_attempts = 3;
    std::chrono::milliseconds base_backoff{500};

    // Calls `fn` until it succeeds, retrying transient ProviderErrors with
    // exponential backoff. The final error carries the attempt count.
    template <typename Fn>
    auto run(const std::string& what, Fn&& fn) const -> decltype(fn());

    void sleep_before_retry(int attempt) const;
};

// Provider-call and cache-hit counters shared by all cached providers of a run.
struct CallStats {
    std::atomic<std::uint64_t> chat_calls{0};
    std::atomic<std::uint64_t> search_calls{0};
    std::atomic<std::uint64_t> embed_calls{0};
    std::atomic<std::uint64_t> chat_hits{0};
    std::atomic<std::uint64_t> search_hits{0};
    std::atomic<std::uint64_t> embed_hits{0};

    std::uint64_t provider_calls() const { return chat_calls + search_calls + embed_calls; }
    std::uint64_t cache_hits() const { return chat_hits + search_hits + embed_hits; }
    nlohmann::json to_json() const;
};

}  // namespace cag

#include "cag/error.hpp"

namespace cag {

template <typename Fn>
auto RetryPolicy::run(const std::string& what, Fn&& fn) const -> decltype(fn()) {
    const int limit = max_attempts < 1 ? 1 : max_attempts;
    for (int attempt = 1;; ++attempt) {
        try {
            return fn();
        } catch (const ProviderError& e) {
            if (!e.transient() || attempt >= limit)
                throw ProviderError(what + " failed after " + std::to_string(attempt) +
                                        " attempt(s): " + e.what(),
                                    e.transient(), attempt);
            sleep_before_retry(attempt);
        }
    }
}

}  // namespace cag
