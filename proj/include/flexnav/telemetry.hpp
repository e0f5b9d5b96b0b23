#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "flexnav/common.hpp"

namespace flexnav {

// ---------------------------------------------------------------------------
// Cost ledger
//
// One entry per provider role. Character counts stand in for exact token
// accounting: estimated tokens = chars / 4. Wall time is tracked in memory
// for run summaries but deliberately kept out of serialized per-episode
// records and traces, which must be byte-reproducible.

struct RoleStats {
    std::uint64_t calls = 0;
    std::uint64_t prompt_chars = 0;
    std::uint64_t response_chars = 0;
    double wall_ms = 0.0;  // not serialized into episode records

    std::uint64_t estimated_tokens() const { return (prompt_chars + response_chars) / 4; }
};

class CostLedger {
public:
    void record(const std::string& role, size_t prompt_chars, size_t response_chars,
                double wall_ms) {
        RoleStats& s = roles_[role];
        s.calls += 1;
        s.prompt_chars += prompt_chars;
        s.response_chars += response_chars;
        s.wall_ms += wall_ms;
    }

    std::uint64_t calls(const std::string& role) const {
        auto it = roles_.find(role);
        return it == roles_.end() ? 0 : it->second.calls;
    }

    std::uint64_t total_calls() const {
        std::uint64_t n = 0;
        for (const auto& [_, s] : roles_) n += s.calls;
        return n;
    }

    std::uint64_t total_estimated_tokens() const {
        std::uint64_t n = 0;
        for (const auto& [_, s] : roles_) n += s.estimated_tokens();
        return n;
    }

    double total_wall_ms() const {
        double t = 0;
        for (const auto& [_, s] : roles_) t += s.wall_ms;
        return t;
    }

    const std::map<std::string, RoleStats>& roles() const { return roles_; }

    // Deterministic serialization: counts only, no timing.
    nlohmann::json to_json() const {
        nlohmann::json j = nlohmann::json::object();
        for (const auto& [role, s] : roles_) {
            j[role] = {{"calls", s.calls},
                       {"prompt_chars", s.prompt_chars},
                       {"response_chars", s.response_chars},
                       {"est_tokens", s.estimated_tokens()}};
        }
        return j;
    }

private:
    std::map<std::string, RoleStats> roles_;
};

// ---------------------------------------------------------------------------
// Trace
//
// Append-only event log for one episode. Provider calls are logged with
// request/response hashes so a replayed run can be checked for bit-equality
// without storing full bodies here (full bodies live in recordings).

struct TraceEvent {
    std::string kind;    // "call" | "warning" | "state"
    std::string role;    // provider role for "call" events, else ""
    std::string detail;
    std::string request_hash;   // hex fnv1a64, "" for non-call events
    std::string response_hash;
};

class Trace {
public:
    void call(const std::string& role, std::string_view request, std::string_view response) {
        events_.push_back({"call", role, "", hash_hex(request), hash_hex(response)});
    }

    void warning(const std::string& msg) { events_.push_back({"warning", "", msg, "", ""}); }

    void state(const std::string& msg) { events_.push_back({"state", "", msg, "", ""}); }

    const std::vector<TraceEvent>& events() const { return events_; }

    size_t warning_count() const {
        size_t n = 0;
        for (const auto& e : events_)
            if (e.kind == "warning") ++n;
        return n;
    }

    nlohmann::json to_json() const {
        nlohmann::json arr = nlohmann::json::array();
        size_t seq = 0;
        for (const auto& e : events_) {
            nlohmann::json j{{"seq", seq++}, {"kind", e.kind}};
            if (!e.role.empty()) j["role"] = e.role;
            if (!e.detail.empty()) j["detail"] = e.detail;
            if (!e.request_hash.empty()) {
                j["request_hash"] = e.request_hash;
                j["response_hash"] = e.response_hash;
            }
            arr.push_back(j);
        }
        return arr;
    }

private:
    std::vector<TraceEvent> events_;
};

}  // namespace flexnav
