#pragma once

#include <atomic>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "cag/providers.hpp"

namespace cag::mock {

// FNV-1a, stable across platforms; drives every synthetic mock decision.
std::uint64_t stable_hash(std::string_view s);

// Replies from per-substring queues. The first rule whose substring occurs
// in the prompt and still has replies answers; a rule's last reply repeats.
class ScriptedChat final : public ChatProvider {
public:
    explicit ScriptedChat(std::string provider_id = "scripted-chat");

    std::string id() const override { return id_; }
    std::string complete(const ChatRequest& request) override;

    void add(std::string match, std::vector<std::string> replies);
    void set_default(std::string reply) { default_reply_ = std::move(reply); }
    // The next `n` calls fail with a transient transport error.
    void fail_next(int n) { failures_left_ = n; }

    int calls() const { return calls_; }
    std::vector<ChatRequest> requests() const;

private:
    struct Rule {
        std::string match;
        std::deque<std::string> replies;
    };
    std::string id_;
    mutable std::mutex mu_;
    std::vector<Rule> rules_;
    std::optional<std::string> default_reply_;
    std::atomic<int> failures_left_{0};
    std::atomic<int> calls_{0};
    std::vector<ChatRequest> log_;
};

// Deterministic offline stand-in for a chat model. Recognises each prompt
// template and produces a plausible, hash-derived reply of the right shape:
// a JSON query list, a 2-3 sentence rebuttal (reusing a context sentence
// when evidence is supplied), a five-line judge verdict, or a summary.
class SyntheticChat final : public ChatProvider {
public:
    std::string id() const override { return "mock-chat"; }
    std::string complete(const ChatRequest& request) override;
    int calls() const { return calls_; }

private:
    std::atomic<int> calls_{0};
};

// Records every request before forwarding it.
class RecordingChat final : public ChatProvider {
public:
    explicit RecordingChat(std::shared_ptr<ChatProvider> inner) : inner_(std::move(inner)) {}
    std::string id() const override { return inner_->id(); }
    std::string complete(const ChatRequest& request) override;
    std::vector<ChatRequest> requests() const;

private:
    std::shared_ptr<ChatProvider> inner_;
    mutable std::mutex mu_;
    std::vector<ChatRequest> log_;
};

// Question -> bullets lookup; unknown questions return an empty answer
// flagged as no_results unless synthetic mode is on, in which case
// deterministic bullets are derived from the question.
class MockSearch final : public SearchProvider {
public:
    explicit MockSearch(bool synthetic = false) : synthetic_(synthetic) {}
    std::string id() const override { return "mock-search"; }
    SearchAnswer search(const std::string& question) override;

    void add(std::string question, std::string bullets);
    void fail_next(int n) { failures_left_ = n; }
    int calls() const { return calls_; }

private:
    bool synthetic_;
    mutable std::mutex mu_;
    std::map<std::string, std::string> answers_;
    std::atomic<int> failures_left_{0};
    std::atomic<int> calls_{0};
};

// Signed feature hashing of lowercase word tokens. Texts sharing many
// words get high cosine similarity; identical texts get identical vectors.
class HashedEmbedding final : public EmbeddingProvider {
public:
    explicit HashedEmbedding(std::size_t dimension = 256) : dim_(dimension) {}
    std::string id() const override { return "mock-embed-hash-" + std::to_string(dim_); }
    std::vector<EmbeddingVector> embed(std::span<const std::string> texts) override;
    int calls() const { return calls_; }
    std::size_t batch_items() const { return items_; }

private:
    std::size_t dim_;
    std::atomic<int> calls_{0};
    std::atomic<std::size_t> items_{0};
};

// Assigns each distinct text the next unit basis vector e_k.
class BasisEmbedding final : public EmbeddingProvider {
public:
    explicit BasisEmbedding(std::size_t dimension) : dim_(dimension) {}
    std::string id() const override { return "mock-embed-basis"; }
    std::vector<EmbeddingVector> embed(std::span<const std::string> texts) override;

private:
    std::size_t dim_;
    std::mutex mu_;
    std::unordered_map<std::string, std::size_t> vocab_;
};

// Fixed text -> vector table; unknown texts are a provider error.
class TableEmbedding final : public EmbeddingProvider {
public:
    std::string id() const override { return "mock-embed-table"; }
    std::vector<EmbeddingVector> embed(std::span<const std::string> texts) override;
    void add(std::string text, std::vector<double> values);
    int calls() const { return calls_; }

private:
    std::map<std::string, std::vector<double>> table_;
    std::atomic<int> calls_{0};
};

}  // namespace cag::mock
