#pragma once

#include <array>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>

#include "cag/providers.hpp"

namespace cag {

std::string sha256_hex(std::string_view data);

// Content-addressed response store: one file per key under
// <root>/<key[0:2]>/<key>. Writes go through a temp file and rename, so
// readers never observe a partial entry; writes to the same key are
// serialized within the process.
class DiskCache {
public:
    explicit DiskCache(std::filesystem::path root);

    std::optional<std::string> get(const std::string& key) const;
    void put(const std::string& key, std::string_view value);

    const std::filesystem::path& root() const { return root_; }

private:
    std::filesystem::path path_for(const std::string& key) const;
    std::mutex& lock_for(const std::string& key);

    std::filesystem::path root_;
    std::array<std::mutex, 64> locks_;
};

// Cache key material: a canonical JSON document hashed with SHA-256.
std::string chat_cache_key(const std::string& provider_id, const ChatRequest& req);
std::string search_cache_key(const std::string& provider_id, const std::string& question);
std::string embed_cache_key(const std::string& provider_id, const std::string& text);

class CachedChat final : public ChatProvider {
public:
    CachedChat(std::shared_ptr<ChatProvider> inner, std::shared_ptr<DiskCache> cache,
               RetryPolicy retry, std::shared_ptr<CallStats> stats);
    std::string id() const override { return inner_->id(); }
    std::string complete(const ChatRequest& request) override;

private:
    std::shared_ptr<ChatProvider> inner_;
    std::shared_ptr<DiskCache> cache_;
    RetryPolicy retry_;
    std::shared_ptr<CallStats> stats_;
};

class CachedSearch final : public SearchProvider {
public:
    CachedSearch(std::shared_ptr<SearchProvider> inner, std::shared_ptr<DiskCache> cache,
                 RetryPolicy retry, std::shared_ptr<CallStats> stats);
    std::string id() const override { return inner_->id(); }
    SearchAnswer search(const std::string& question) override;

private:
    std::shared_ptr<SearchProvider> inner_;
    std::shared_ptr<DiskCache> cache_;
    RetryPolicy retry_;
    std::shared_ptr<CallStats> stats_;
};

// Per-text caching: a batch with some cached texts sends only the misses
// (deduplicated) to the provider, then reassembles results in input order.
class CachedEmbedding final : public EmbeddingProvider {
public:
    CachedEmbedding(std::shared_ptr<EmbeddingProvider> inner, std::shared_ptr<DiskCache> cache,
                    RetryPolicy retry, std::shared_ptr<CallStats> stats);
    std::string id() const override { return inner_->id(); }
    std::vector<EmbeddingVector> embed(std::span<const std::string> texts) override;

private:
    std::shared_ptr<EmbeddingProvider> inner_;
    std::shared_ptr<DiskCache> cache_;
    RetryPolicy retry_;
    std::shared_ptr<CallStats> stats_;
};

}  // namespace cag
