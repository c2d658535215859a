#include "cag/config.hpp"

#include <cctype>
#include <fstream>

#include "cag/cache.hpp"
#include "cag/error.hpp"
#include "cag/http_providers.hpp"
#include "cag/mock.hpp"

namespace cag {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

ProviderSpec parse_provider(const json& j, const char* role, const char* default_env) {
    ProviderSpec p;
    p.api_key_env = default_env;
    if (j.is_null()) return p;
    p.kind = j.value("kind", "mock");
    if (p.kind != "mock" && p.kind != "http")
        throw ValidationError(std::string("providers.") + role + ".kind must be 'mock' or 'http'");
    p.id = j.value("id", std::string{});
    p.endpoint = j.value("endpoint", std::string{});
    p.model = j.value("model", std::string{});
    p.api_key_env = j.value("api_key_env", std::string(default_env));
    p.extra_body = j.value("extra_body", json::object());
    p.dimension = j.value("dimension", std::size_t{256});
    p.timeout_s = j.value("timeout_s", 120);
    if (p.kind == "http" && p.endpoint.empty())
        throw ValidationError(std::string("providers.") + role + ".endpoint is required for http");
    if (p.id.empty()) p.id = p.kind == "http" ? p.endpoint : std::string{};
    return p;
}

bool safe_id(const std::string& id) {
    if (id.empty() || id == "." || id == "..") return false;
    for (unsigned char c : id)
        if (!(std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '+')) return false;
    return true;
}

http::Endpoint endpoint_for(const ProviderSpec& p) {
    http::Endpoint ep;
    ep.url = p.endpoint;
    ep.api_key = http::require_env(p.api_key_env);
    ep.extra_body = p.extra_body;
    ep.timeout = std::chrono::seconds(p.timeout_s);
    return ep;
}

}  // namespace

HarnessConfig parse_config(const json& j, const fs::path& base_dir) {
    HarnessConfig c;
    c.snapshot = j;
    auto resolve = [&](const std::string& p) {
        fs::path path(p);
        return path.is_absolute() ? path : base_dir / path;
    };
    c.cache_dir = resolve(j.value("cache_dir", std::string("cache")));
    c.fan_out = j.value("fan_out", std::size_t{4});
    c.retries = j.value("retries", 2);
    c.backoff_ms = j.value("backoff_ms", 500L);
    if (c.retries < 0) throw ValidationError("retries must be >= 0");

    const json providers = j.value("providers", json::object());
    c.chat = parse_provider(providers.value("chat", json()), "chat", "CHAT_API_KEY");
    c.search = parse_provider(providers.value("search", json()), "search", "SEARCH_API_KEY");
    c.embed = parse_provider(providers.value("embed", json()), "embed", "EMBED_API_KEY");

    c.query_model = j.value("query_model", std::string{});
    for (const auto& s : j.value("systems", json::array())) {
        SystemConfig sys{s.at("id").get<std::string>(), s.at("model").get<std::string>(),
                         s.value("with_knowledge", false)};
        if (!safe_id(sys.id) || sys.id == "gold")
            throw ValidationError("invalid system id '" + sys.id + "'");
        for (const auto& other : c.systems)
            if (other.id == sys.id) throw ValidationError("duplicate system id '" + sys.id + "'");
        c.systems.push_back(sys);
    }
    for (const auto& jj : j.value("judges", json::array())) {
        JudgeConfig jc{jj.at("id").get<std::string>(), jj.at("model").get<std::string>()};
        if (!safe_id(jc.id) || jc.id == "human" || jc.id == "refmetrics_items" ||
            jc.id == "utilization")
            throw ValidationError("invalid judge id '" + jc.id + "'");
        c.judges.push_back(jc);
    }
    const json util = j.value("utilization", json::object());
    c.thresholds.utilized = util.value("utilized_threshold", 0.70);
    c.thresholds.partial = util.value("partial_threshold", 0.65);
    if (c.thresholds.partial > c.thresholds.utilized)
        throw ValidationError("partial_threshold must not exceed utilized_threshold");
    c.verbose_similarity = util.value("verbose", false);

    const json metrics = j.value("metrics", json::object());
    const std::string units = metrics.value("embedding_units", std::string("sentence"));
    if (units == "sentence") c.units = refmetrics::EmbeddingUnits::Sentence;
    else if (units == "token") c.units = refmetrics::EmbeddingUnits::Token;
    else throw ValidationError("metrics.embedding_units must be 'sentence' or 'token'");
    if (auto it = metrics.find("synonyms"); it != metrics.end() && it->is_string())
        c.synonyms = resolve(it->get<std::string>());
    return c;
}

HarnessConfig load_config(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("config file not found: " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ValidationError("config " + path.string() + ": " + e.what());
    }
    return parse_config(j, path.parent_path().empty() ? fs::path(".") : path.parent_path());
}

ProviderSet make_providers(const HarnessConfig& c) {
    ProviderSet set;
    set.stats = std::make_shared<CallStats>();
    auto cache = std::make_shared<DiskCache>(c.cache_dir);
    RetryPolicy retry{c.max_attempts(), std::chrono::milliseconds(c.backoff_ms)};

    std::shared_ptr<ChatProvider> chat;
    if (c.chat.kind == "http") chat = std::make_shared<http::HttpChat>(c.chat.id, endpoint_for(c.chat));
    else chat = std::make_shared<mock::SyntheticChat>();

    std::shared_ptr<SearchProvider> search;
    if (c.search.kind == "http")
        search = std::make_shared<http::HttpSearch>(c.search.id + "#" + c.search.model,
                                                   endpoint_for(c.search), c.search.model);
    else search = std::make_shared<mock::MockSearch>(true);

    std::shared_ptr<EmbeddingProvider> embed;
    if (c.embed.kind == "http")
        embed = std::make_shared<http::HttpEmbedding>(c.embed.id + "#" + c.embed.model,
                                                      endpoint_for(c.embed), c.embed.model);
    else embed = std::make_shared<mock::HashedEmbedding>(c.embed.dimension);

    set.chat = std::make_shared<CachedChat>(chat, cache, retry, set.stats);
    set.search = std::make_shared<CachedSearch>(search, cache, retry, set.stats);
    set.embed = std::make_shared<CachedEmbedding>(embed, cache, retry, set.stats);
    return set;
}

}  // namespace cag
