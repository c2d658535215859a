#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "cag/http_providers.hpp"

#include <httplib.h>

#include <chrono>
#include <cstdlib>
#include <ctime>

#include "cag/error.hpp"
#include "cag/prompts.hpp"

namespace cag::http {

using nlohmann::json;

namespace {

struct SplitUrl {
    std::string origin;  // scheme://host:port
    std::string path;
};

SplitUrl split_url(const std::string& url) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) throw ValidationError("endpoint url lacks scheme: " + url);
    const auto path_begin = url.find('/', scheme_end + 3);
    if (path_begin == std::string::npos) return {url, "/"};
    return {url.substr(0, path_begin), url.substr(path_begin)};
}

std::string utc_now() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string message_content(const json& reply) {
    const auto& choices = reply.at("choices");
    if (!choices.is_array() || choices.empty()) throw ProviderError("reply has no choices", false);
    const auto& content = choices.at(0).at("message").at("content");
    if (content.is_string()) return content.get<std::string>();
    // Content-part arrays: concatenate the text parts.
    std::string out;
    for (const auto& part : content)
        if (part.value("type", "") == "text") out += part.value("text", "");
    return out;
}

void collect_urls(const json& node, std::vector<std::string>& urls) {
    if (node.is_object()) {
        for (const char* key : {"url", "uri"}) {
            if (auto it = node.find(key); it != node.end() && it->is_string()) urls.push_back(*it);
        }
        for (const auto& [k, v] : node.items()) collect_urls(v, urls);
    } else if (node.is_array()) {
        for (const auto& v : node) {
            if (v.is_string() && v.get<std::string>().starts_with("http")) urls.push_back(v);
            else collect_urls(v, urls);
        }
    }
}

}  // namespace

std::string require_env(const std::string& name) {
    const char* v = std::getenv(name.c_str());
    if (v == nullptr || *v == '\0')
        throw ValidationError("missing credential: environment variable " + name + " is not set");
    return v;
}

json post_json(const Endpoint& ep, const json& body) {
    const auto parts = split_url(ep.url);
    httplib::Client cli(parts.origin);
    cli.set_connection_timeout(ep.timeout);
    cli.set_read_timeout(ep.timeout);
    cli.set_write_timeout(ep.timeout);
    httplib::Headers headers;
    if (!ep.api_key.empty()) headers.emplace("Authorization", "Bearer " + ep.api_key);

    auto res = cli.Post(parts.path, headers, body.dump(), "application/json");
    if (!res)
        throw ProviderError("POST " + ep.url + ": " + httplib::to_string(res.error()), true);
    if (res->status == 429 || res->status >= 500)
        throw ProviderError("POST " + ep.url + ": HTTP " + std::to_string(res->status), true);
    if (res->status < 200 || res->status >= 300)
        throw ProviderError("POST " + ep.url + ": HTTP " + std::to_string(res->status) + ": " +
                                res->body.substr(0, 200),
                            false);
    try {
        return json::parse(res->body);
    } catch (const json::parse_error& e) {
        throw ProviderError("POST " + ep.url + ": invalid JSON reply", false);
    }
}

HttpChat::HttpChat(std::string provider_id, Endpoint endpoint)
    : id_(std::move(provider_id)), ep_(std::move(endpoint)) {}

std::string HttpChat::complete(const ChatRequest& req) {
    json body = ep_.extra_body;
    for (const auto& [k, v] : req.knobs.items()) body[k] = v;
    body["model"] = req.model_id;
    body["messages"] = json::array({json{{"role", "user"}, {"content", req.prompt}}});
    try {
        return message_content(post_json(ep_, body));
    } catch (const json::exception& e) {
        throw ProviderError(std::string("chat reply has unexpected shape: ") + e.what(), false);
    }
}

HttpSearch::HttpSearch(std::string provider_id, Endpoint endpoint, std::string model)
    : id_(std::move(provider_id)), ep_(std::move(endpoint)), model_(std::move(model)) {}

SearchAnswer HttpSearch::search(const std::string& question) {
    json body = ep_.extra_body;
    body["model"] = model_;
    body["messages"] =
        json::array({json{{"role", "user"}, {"content", prompts::web_search(question)}}});
    SearchAnswer a;
    a.query = question;
    a.retrieved_at = utc_now();
    try {
        const json reply = post_json(ep_, body);
        a.answer_text = message_content(reply);
        for (const char* key : {"citations", "documents", "search_results"})
            if (auto it = reply.find(key); it != reply.end()) collect_urls(*it, a.source_urls);
    } catch (const json::exception& e) {
        throw ProviderError(std::string("search reply has unexpected shape: ") + e.what(), false);
    }
    a.no_results = a.answer_text.find_first_not_of(" \t\r\n") == std::string::npos;
    return a;
}

HttpEmbedding::HttpEmbedding(std::string provider_id, Endpoint endpoint, std::string model)
    : id_(std::move(provider_id)), ep_(std::move(endpoint)), model_(std::move(model)) {}

std::vector<EmbeddingVector> HttpEmbedding::embed(std::span<const std::string> texts) {
    json body = ep_.extra_body;
    body["model"] = model_;
    body["input"] = std::vector<std::string>(texts.begin(), texts.end());
    std::vector<EmbeddingVector> out(texts.size());
    try {
        const json reply = post_json(ep_, body);
        const auto& data = reply.at("data");
        if (data.size() != texts.size())
            throw ProviderError("embedding reply has " + std::to_string(data.size()) +
                                    " items for " + std::to_string(texts.size()) + " inputs",
                                false);
        for (std::size_t i = 0; i < data.size(); ++i) {
            const std::size_t idx = data[i].value("index", i);
            if (idx >= out.size()) throw ProviderError("embedding reply index out of range", false);
            out[idx].values = data[i].at("embedding").get<std::vector<double>>();
        }
    } catch (const json::exception& e) {
        throw ProviderError(std::string("embedding reply has unexpected shape: ") + e.what(), false);
    }
    return out;
}

}  // namespace cag::http
