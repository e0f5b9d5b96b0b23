#pragma once

#include <cstdlib>
#include <string>

#include "flexnav/chat_adapter.hpp"
#include "flexnav/runner.hpp"

namespace flexnav::runner {

inline std::string env_or(const char* name, const std::string& fallback) {
    const char* v = std::getenv(name);
    return v ? std::string(v) : fallback;
}

// Live provider set: every role bound to an OpenAI-compatible chat endpoint.
// Per-role endpoint/model come from the config's provider bindings; an empty
// endpoint falls back to FLEXNAV_API_BASE, and the key comes from
// FLEXNAV_API_KEY.
inline ProviderFactory live_factory() {
    return [](const envgraph::NavGraph&, const envgraph::Episode&, const RunConfig& config) {
        const std::string default_base = env_or("FLEXNAV_API_BASE", "");
        const std::string api_key = env_or("FLEXNAV_API_KEY", "");
        ProviderSet set;
        for (const auto& role : provider_roles()) {
            bool is_follower = role.rfind("follower", 0) == 0;
            if (is_follower && std::stoi(role.substr(8)) >= config.follower_count) continue;
            ProviderBinding b = config.binding(role);
            std::string endpoint = b.endpoint.empty() ? default_base : b.endpoint;
            if (endpoint.empty())
                throw ConfigError("role '" + role +
                                  "' has no endpoint; set FLEXNAV_API_BASE or "
                                  "providers." +
                                  role + ".endpoint");
            set.by_role(role) = std::make_shared<ChatAdapter>(
                endpoint, b.model.empty() ? "gpt-4o-mini" : b.model, api_key, b.timeout_s,
                b.retries);
        }
        set.followers.resize(config.follower_count);
        return set;
    };
}

}  // namespace flexnav::runner
