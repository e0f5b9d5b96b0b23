#pragma once

#include <chrono>
#include <string>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "flexnav/common.hpp"
#include "flexnav/providers.hpp"

namespace flexnav::runner {

// ---------------------------------------------------------------------------
// OpenAI-compatible chat adapter
//
// Speaks the chat-completions wire format over HTTP. The provider request is
// a JSON array of chat messages (the planner encoding); any other request
// text is wrapped as a single user message, which lets every role bind to a
// chat endpoint.

inline nlohmann::json build_chat_request(const std::string& model,
                                         const std::string& request) {
    nlohmann::json messages;
    try {
        messages = nlohmann::json::parse(request);
        if (!messages.is_array()) throw nlohmann::json::other_error::create(501, "", nullptr);
    } catch (const nlohmann::json::exception&) {
        messages = nlohmann::json::array({{{"content", request}, {"role", "user"}}});
    }
    return nlohmann::json{{"messages", messages}, {"model", model}, {"temperature", 0.0}};
}

inline std::string extract_chat_content(const std::string& body) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(body);
    } catch (const nlohmann::json::parse_error& e) {
        throw ProviderError(std::string("chat response is not JSON: ") + e.what());
    }
    try {
        return j.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const nlohmann::json::exception&) {
        throw ProviderError("chat response missing choices[0].message.content");
    }
}

// Splits "http://host:port/prefix" into base and path prefix.
inline std::pair<std::string, std::string> split_endpoint(const std::string& endpoint) {
    auto scheme = endpoint.find("://");
    if (scheme == std::string::npos)
        throw ConfigError("endpoint must include a scheme: " + endpoint);
    auto slash = endpoint.find('/', scheme + 3);
    if (slash == std::string::npos) return {endpoint, ""};
    return {endpoint.substr(0, slash), endpoint.substr(slash)};
}

class ChatAdapter : public Provider {
public:
    ChatAdapter(std::string endpoint, std::string model, std::string api_key,
                double timeout_s = 30.0, int retries = 2, int backoff_ms = 250)
        : endpoint_(std::move(endpoint)),
          model_(std::move(model)),
          api_key_(std::move(api_key)),
          timeout_s_(timeout_s),
          retries_(retries),
          backoff_ms_(backoff_ms) {}

    std::string complete(const std::string& request) override {
        const std::string body = build_chat_request(model_, request).dump();
        std::string last_error;
        for (int attempt = 0; attempt <= retries_; ++attempt) {
            if (attempt > 0 && backoff_ms_ > 0)
                std::this_thread::sleep_for(
                    std::chrono::milliseconds(backoff_ms_ << (attempt - 1)));
            try {
                return post_once(body);
            } catch (const ProviderError& e) {
                last_error = e.what();
            }
        }
        throw ProviderError("chat endpoint failed after " + std::to_string(retries_ + 1) +
                            " attempts: " + last_error);
    }

private:
    std::string post_once(const std::string& body) {
        auto [base, prefix] = split_endpoint(endpoint_);
        httplib::Client client(base);
        client.set_connection_timeout(std::chrono::duration<double>(timeout_s_));
        client.set_read_timeout(std::chrono::duration<double>(timeout_s_));
        httplib::Headers headers;
        if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);
        auto res = client.Post(prefix + "/chat/completions", headers, body,
                               "application/json");
        if (!res)
            throw ProviderError("transport error talking to " + endpoint_ + ": " +
                                httplib::to_string(res.error()));
        if (res->status != 200)
            throw ProviderError("chat endpoint returned status " +
                                std::to_string(res->status) + ": " + res->body);
        return extract_chat_content(res->body);
    }

    std::string endpoint_;
    std::string model_;
    std::string api_key_;
    double timeout_s_;
    int retries_;
    int backoff_ms_;
};

}  // namespace flexnav::runner
