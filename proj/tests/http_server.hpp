#pragma once

#include <httplib.h>

#include <functional>
#include <mutex>
#include <thread>

#include "json.hpp"

namespace testutil {

// Local HTTP endpoint for provider tests. Each POST body is recorded and
// passed to the handler, which returns (status, JSON reply).
class LocalServer {
public:
    using Handler = std::function<std::pair<int, nlohmann::json>(const std::string& path,
                                                                 const nlohmann::json& body)>;

    explicit LocalServer(Handler handler) : handler_(std::move(handler)) {
        server_.Post(R"(/.*)", [this](const httplib::Request& req, httplib::Response& res) {
            const auto body = nlohmann::json::parse(req.body);
            {
                std::lock_guard<std::mutex> lock(mu_);
                bodies_.push_back(body);
                auth_.push_back(req.get_header_value("Authorization"));
            }
            auto [status, reply] = handler_(req.path, body);
            res.status = status;
            res.set_content(reply.dump(), "application/json");
        });
        port_ = server_.bind_to_any_port("127.0.0.1");
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }
    ~LocalServer() {
        server_.stop();
        thread_.join();
    }

    std::string url(const std::string& path) const {
        return "http://127.0.0.1:" + std::to_string(port_) + path;
    }
    std::vector<nlohmann::json> bodies() const {
        std::lock_guard<std::mutex> lock(mu_);
        return bodies_;
    }
    std::vector<std::string> auth_headers() const {
        std::lock_guard<std::mutex> lock(mu_);
        return auth_;
    }

private:
    Handler handler_;
    httplib::Server server_;
    int port_ = 0;
    std::thread thread_;
    mutable std::mutex mu_;
    std::vector<nlohmann::json> bodies_;
    std::vector<std::string> auth_;
};

inline nlohmann::json chat_reply(const std::string& content) {
    return {{"choices", nlohmann::json::array({{{"message", {{"role", "assistant"}, {"content", content}}}}})}};
}

}  // namespace testutil
