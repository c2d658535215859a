#include "cag/cache.hpp"

#include <openssl/evp.h>

#include <atomic>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <unistd.h>
#include <unordered_map>

#include "cag/error.hpp"
#include "cag/text.hpp"

namespace cag {

using nlohmann::json;
namespace fs = std::filesystem;

std::string sha256_hex(std::string_view data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
        throw Error("sha256 failed");
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    out.reserve(len * 2);
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 0xF]);
    }
    return out;
}

DiskCache::DiskCache(fs::path root) : root_(std::move(root)) {
    std::error_code ec;
    fs::create_directories(root_, ec);
    if (ec) throw Error("cannot create cache directory " + root_.string() + ": " + ec.message());
}

fs::path DiskCache::path_for(const std::string& key) const {
    return root_ / key.substr(0, 2) / key;
}

std::mutex& DiskCache::lock_for(const std::string& key) {
    return locks_[std::hash<std::string>{}(key) % locks_.size()];
}

std::optional<std::string> DiskCache::get(const std::string& key) const {
    std::ifstream in(path_for(key), std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void DiskCache::put(const std::string& key, std::string_view value) {
    static std::atomic<unsigned long> counter{0};
    std::lock_guard<std::mutex> guard(lock_for(key));
    const fs::path final_path = path_for(key);
    std::error_code ec;
    fs::create_directories(final_path.parent_path(), ec);
    if (ec) throw Error("cache write failed for " + final_path.string() + ": " + ec.message());
    fs::path tmp = final_path;
    tmp += ".tmp." + std::to_string(::getpid()) + "." + std::to_string(counter++);
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        out.write(value.data(), static_cast<std::streamsize>(value.size()));
        if (!out) throw Error("cache write failed for " + tmp.string());
    }
    fs::rename(tmp, final_path, ec);
    if (ec) {
        fs::remove(tmp);
        throw Error("cache write failed for " + final_path.string() + ": " + ec.message());
    }
}

std::string chat_cache_key(const std::string& provider_id, const ChatRequest& req) {
    json doc{{"kind", "chat"},
             {"provider", provider_id},
             {"model", req.model_id},
             {"prompt", req.prompt},
             {"knobs", req.knobs},
             {"sample", req.sample}};
    return sha256_hex(doc.dump());
}

std::string search_cache_key(const std::string& provider_id, const std::string& question) {
    json doc{{"kind", "search"}, {"provider", provider_id}, {"question", question}};
    return sha256_hex(doc.dump());
}

std::string embed_cache_key(const std::string& provider_id, const std::string& t) {
    json doc{{"kind", "embed"}, {"provider", provider_id}, {"text", t}};
    return sha256_hex(doc.dump());
}

CachedChat::CachedChat(std::shared_ptr<ChatProvider> inner, std::shared_ptr<DiskCache> cache,
                       RetryPolicy retry, std::shared_ptr<CallStats> stats)
    : inner_(std::move(inner)), cache_(std::move(cache)), retry_(retry), stats_(std::move(stats)) {}

std::string CachedChat::complete(const ChatRequest& req) {
    if (text::is_blank(req.prompt)) throw PreconditionError("chat_complete: empty prompt");
    const std::string key = chat_cache_key(inner_->id(), req);
    if (auto hit = cache_->get(key)) {
        ++stats_->chat_hits;
        return json::parse(*hit).at("response").get<std::string>();
    }
    std::string reply = retry_.run("chat_complete", [&] {
        ++stats_->chat_calls;
        return inner_->complete(req);
    });
    cache_->put(key, json{{"model", req.model_id}, {"response", reply}}.dump());
    return reply;
}

CachedSearch::CachedSearch(std::shared_ptr<SearchProvider> inner, std::shared_ptr<DiskCache> cache,
                           RetryPolicy retry, std::shared_ptr<CallStats> stats)
    : inner_(std::move(inner)), cache_(std::move(cache)), retry_(retry), stats_(std::move(stats)) {}

SearchAnswer CachedSearch::search(const std::string& question) {
    if (text::is_blank(question)) throw PreconditionError("web_search: empty question");
    const std::string key = search_cache_key(inner_->id(), question);
    if (auto hit = cache_->get(key)) {
        ++stats_->search_hits;
        return search_answer_from_json(json::parse(*hit));
    }
    SearchAnswer a = retry_.run("web_search", [&] {
        ++stats_->search_calls;
        return inner_->search(question);
    });
    a.no_results = a.no_results || text::is_blank(a.answer_text);
    cache_->put(key, to_json(a).dump());
    return a;
}

CachedEmbedding::CachedEmbedding(std::shared_ptr<EmbeddingProvider> inner,
                                 std::shared_ptr<DiskCache> cache, RetryPolicy retry,
                                 std::shared_ptr<CallStats> stats)
    : inner_(std::move(inner)), cache_(std::move(cache)), retry_(retry), stats_(std::move(stats)) {}

std::vector<EmbeddingVector> CachedEmbedding::embed(std::span<const std::string> texts) {
    for (const auto& t : texts)
        if (text::is_blank(t)) throw PreconditionError("embed_sentences: empty text in batch");

    std::vector<std::optional<EmbeddingVector>> out(texts.size());
    std::vector<std::string> misses;
    std::unordered_map<std::string, std::size_t> miss_index;
    for (std::size_t i = 0; i < texts.size(); ++i) {
        if (miss_index.count(texts[i])) continue;
        if (auto hit = cache_->get(embed_cache_key(inner_->id(), texts[i]))) {
            ++stats_->embed_hits;
            out[i] = EmbeddingVector{json::parse(*hit).at("values").get<std::vector<double>>()};
        } else {
            miss_index.emplace(texts[i], misses.size());
            misses.push_back(texts[i]);
        }
    }
    if (!misses.empty()) {
        auto fresh = retry_.run("embed_sentences", [&] {
            ++stats_->embed_calls;
            return inner_->embed(misses);
        });
        if (fresh.size() != misses.size())
            throw ProviderError("embed_sentences: provider returned " +
                                    std::to_string(fresh.size()) + " vectors for " +
                                    std::to_string(misses.size()) + " texts",
                                false);
        for (std::size_t k = 0; k < misses.size(); ++k)
            cache_->put(embed_cache_key(inner_->id(), misses[k]),
                        json{{"values", fresh[k].values}}.dump());
        for (std::size_t i = 0; i < texts.size(); ++i) {
            if (out[i]) continue;
            out[i] = fresh[miss_index.at(texts[i])];
        }
    }
    // Cached duplicates of an earlier position are filled here.
    std::vector<EmbeddingVector> result;
    result.reserve(texts.size());
    for (std::size_t i = 0; i < texts.size(); ++i) {
        if (!out[i]) {
            for (std::size_t k = 0; k < i; ++k)
                if (texts[k] == texts[i]) out[i] = out[k];
        }
        result.push_back(*out[i]);
    }
    for (auto& v : result) {
        if (v.values.empty()) throw ProviderError("embed_sentences: empty vector", false);
        if (v.values.size() != result.front().values.size())
            throw ProviderError("embed_sentences: dimension mismatch within batch", false);
        bool zero = true;
        for (double x : v.values) zero = zero && x == 0.0;
        v.zero_norm = zero;
    }
    return result;
}

}  // namespace cag
