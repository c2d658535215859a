#include <cstdlib>

#include "cag/error.hpp"
#include "cag/http_providers.hpp"
#include "cag/prompts.hpp"
#include "doctest.h"
#include "http_server.hpp"

using namespace cag;
using nlohmann::json;

namespace {

http::Endpoint endpoint(const testutil::LocalServer& s, const std::string& path) {
    http::Endpoint ep;
    ep.url = s.url(path);
    ep.api_key = "secret";
    ep.timeout = std::chrono::seconds(5);
    return ep;
}

}  // namespace

TEST_CASE("http chat posts the prompt and model with knobs") {
    testutil::LocalServer server([](const std::string&, const json& body) {
        return std::pair{200, testutil::chat_reply("echo: " + body["messages"][0]["content"].get<std::string>())};
    });
    http::HttpChat chat("chat", endpoint(server, "/v1/chat/completions"));
    ChatRequest req;
    req.model_id = "model-x";
    req.prompt = "Hello\nthere";
    req.knobs = {{"temperature", 0.2}};
    req.sample = 4;
    CHECK(chat.complete(req) == "echo: Hello\nthere");
    const auto bodies = server.bodies();
    REQUIRE(bodies.size() == 1);
    CHECK(bodies[0]["model"] == "model-x");
    CHECK(bodies[0]["temperature"] == 0.2);
    CHECK(bodies[0]["messages"][0]["role"] == "user");
    CHECK_FALSE(bodies[0].contains("sample"));
    CHECK(server.auth_headers()[0] == "Bearer secret");
}

TEST_CASE("http status codes map to transient and permanent errors") {
    int status = 429;
    testutil::LocalServer server([&](const std::string&, const json&) {
        return std::pair{status, json{{"error", "nope"}}};
    });
    http::HttpChat chat("chat", endpoint(server, "/chat"));
    ChatRequest req{"m", "p", json::object(), 0};
    for (int code : {429, 500, 503}) {
        status = code;
        try {
            chat.complete(req);
            FAIL("expected error");
        } catch (const ProviderError& e) {
            CHECK(e.transient());
        }
    }
    for (int code : {400, 401, 404}) {
        status = code;
        try {
            chat.complete(req);
            FAIL("expected error");
        } catch (const ProviderError& e) {
            CHECK_FALSE(e.transient());
        }
    }
}

TEST_CASE("unreachable endpoints are transient") {
    http::Endpoint ep;
    ep.url = "http://127.0.0.1:1/chat";
    ep.timeout = std::chrono::seconds(1);
    http::HttpChat chat("chat", ep);
    try {
        chat.complete(ChatRequest{"m", "p", json::object(), 0});
        FAIL("expected error");
    } catch (const ProviderError& e) {
        CHECK(e.transient());
    }
}

TEST_CASE("http search sends the web-search prompt and collects sources") {
    testutil::LocalServer server([](const std::string&, const json&) {
        json reply = testutil::chat_reply("- point one\n- point two");
        reply["citations"] = json::array({{{"url", "https://a.example/x"}}, {{"url", "https://b.example/y"}}});
        return std::pair{200, reply};
    });
    auto ep = endpoint(server, "/search");
    ep.extra_body = {{"connectors", json::array({{{"id", "web-search"}}})}};
    http::HttpSearch search("search", ep, "cmd");
    const auto a = search.search("Is the sky green");
    CHECK(a.query == "Is the sky green");
    CHECK(a.answer_text == "- point one\n- point two");
    CHECK(a.source_urls == std::vector<std::string>{"https://a.example/x", "https://b.example/y"});
    CHECK_FALSE(a.no_results);
    CHECK(a.retrieved_at.size() == 20);
    const auto body = server.bodies().at(0);
    CHECK(body["messages"][0]["content"] == prompts::web_search("Is the sky green"));
    CHECK(body["connectors"][0]["id"] == "web-search");
    CHECK(body["model"] == "cmd");
}

TEST_CASE("http embedding reorders by index") {
    testutil::LocalServer server([](const std::string&, const json& body) {
        json data = json::array();
        const auto n = body["input"].size();
        for (std::size_t i = n; i-- > 0;)
            data.push_back({{"index", i}, {"embedding", {double(i), 1.0}}});
        return std::pair{200, json{{"data", data}}};
    });
    http::HttpEmbedding embed("embed", endpoint(server, "/embed"), "e5");
    const std::vector<std::string> texts = {"a", "b", "c"};
    const auto v = embed.embed(texts);
    REQUIRE(v.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) CHECK(v[i].values == std::vector<double>{double(i), 1.0});
    CHECK(server.bodies().at(0)["model"] == "e5");
}

TEST_CASE("missing credentials name the variable") {
    ::unsetenv("CAG_TEST_MISSING_KEY");
    try {
        http::require_env("CAG_TEST_MISSING_KEY");
        FAIL("expected error");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("CAG_TEST_MISSING_KEY") != std::string::npos);
    }
    ::setenv("CAG_TEST_PRESENT_KEY", "v", 1);
    CHECK(http::require_env("CAG_TEST_PRESENT_KEY") == "v");
}
