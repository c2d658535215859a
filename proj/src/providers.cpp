#include "cag/providers.hpp"

#include <thread>

namespace cag {

using nlohmann::json;

json to_json(const SearchAnswer& a) {
    return json{{"query", a.query},
                {"answer_text", a.answer_text},
                {"source_urls", a.source_urls},
                {"retrieved_at", a.retrieved_at},
                {"no_results", a.no_results}};
}

SearchAnswer search_answer_from_json(const json& j) {
    SearchAnswer a;
    a.query = j.at("query").get<std::string>();
    a.answer_text = j.at("answer_text").get<std::string>();
    a.source_urls = j.value("source_urls", std::vector<std::string>{});
    a.retrieved_at = j.value("retrieved_at", std::string{});
    a.no_results = j.value("no_results", false);
    return a;
}

void RetryPolicy::sleep_before_retry(int attempt) const {
    if (base_backoff.count() <= 0) return;
    const auto delay = base_backoff * (1LL << (attempt - 1));
    std::this_thread::sleep_for(delay);
}

json CallStats::to_json() const {
    return json{{"provider_calls",
                 {{"chat", chat_calls.load()},
                  {"search", search_calls.load()},
                  {"embed", embed_calls.load()}}},
                {"cache_hits",
                 {{"chat", chat_hits.load()},
                  {"search", search_hits.load()},
                  {"embed", embed_hits.load()}}}};
}

}  // namespace cag
