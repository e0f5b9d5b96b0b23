#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "flexnav/common.hpp"
#include "flexnav/perceive.hpp"
#include "flexnav/plan.hpp"
#include "flexnav/providers.hpp"

namespace flexnav::verify {

// ---------------------------------------------------------------------------
// Verdict

struct Verdict {
    bool feasible = true;
    std::string reason;  // nonempty iff infeasible

    static Verdict ok() { return {true, ""}; }
    static Verdict rejected(std::string reason) {
        if (trim(reason).empty()) reason = "no reason given";
        return {false, std::move(reason)};
    }
};

// The view the verifier should look at: the observation view matching the
// direction the planner chose.
inline const perceive::ViewDescriptor& select_direction_view(
    const perceive::Observation& observation, int direction_bucket) {
    for (const auto& v : observation.views)
        if (v.orientation_bucket == direction_bucket) return v;
    throw ValidationError("direction must be one of the 4 view buckets, got " +
                          std::to_string(direction_bucket));
}

// ---------------------------------------------------------------------------
// Verifier wire format
//
//   request:  {"guidance": <guidance text>, "view": <view payload>}
//   response: FEASIBLE [reason...] | INFEASIBLE [reason...]
//
// Verification assists navigation but never gates it: an unparseable
// response or an exhausted retry budget degrades to a Feasible verdict with
// a warning rather than stalling the episode.

inline std::string verifier_request(const std::string& view_payload,
                                    const std::string& guidance_text) {
    return nlohmann::json{{"guidance", guidance_text}, {"view", view_payload}}.dump();
}

inline Verdict parse_verdict(const std::string& raw, const WarnFn& warn = {}) {
    std::string t = trim(raw);
    auto after_token = [&](size_t len) {
        std::string rest = t.substr(len);
        size_t i = 0;
        while (i < rest.size() && (rest[i] == ':' || rest[i] == ',' || rest[i] == '-' ||
                                   std::isspace(static_cast<unsigned char>(rest[i]))))
            ++i;
        return trim(rest.substr(i));
    };
    if (t.size() >= 10 && iequals(t.substr(0, 10), "INFEASIBLE"))
        return Verdict::rejected(after_token(10));
    if (t.size() >= 8 && iequals(t.substr(0, 8), "FEASIBLE")) return Verdict::ok();
    warn_to(warn, "unparseable verifier response treated as feasible: " + t);
    return Verdict::ok();
}

inline Verdict run_verifier(Provider& verifier, const perceive::ViewDescriptor& view,
                            const plan::Guidance& guidance, int retries = 0,
                            const WarnFn& warn = {}) {
    try {
        std::string raw = with_retries(retries, warn, [&] {
            return verifier.complete(verifier_request(view.scene_text, guidance.text));
        });
        return parse_verdict(raw, warn);
    } catch (const ProviderError& e) {
        warn_to(warn, std::string("verifier unavailable, proceeding as feasible: ") +
                          e.what());
        return Verdict::ok();
    }
}

// ---------------------------------------------------------------------------
// Plan / verify loop
//
// One outer pipeline iteration: plan, verify, and re-plan with feedback
// until a guidance is accepted or the caps run out. Re-plans consume the
// global planner-call budget; parse retries hit the ledger but not the
// budget. On cap exhaustion the most recent guidance is accepted with a
// warning so the episode keeps making forward progress.

struct PlanVerifyContext {
    Provider& planner;
    Provider& verifier;
    std::string principle;
    std::string instruction;
    const plan::NavHistory& history;
    const perceive::Observation& observation;
    int replan_cap = 3;
    int planner_budget_remaining = 10;  // global planner-call budget left
    int parse_retries = 2;
    int verifier_retries = 0;
    bool strict_violations = false;     // strict mode: one re-plan on violations
    bool history_include_guidance = false;
    WarnFn warn;
};

struct PlanVerifyResult {
    plan::PlannerOutput output;
    int planner_calls_budgeted = 0;
    int verifier_calls = 0;
};

// Calls the planner once, retrying malformed output. Throws ParseError once
// retries are exhausted; the caller aborts the episode.
inline plan::PlannerOutput call_planner(Provider& planner, const plan::MessageList& messages,
                                        int parse_retries, const WarnFn& warn) {
    const std::string request = plan::messages_to_json(messages);
    for (int attempt = 0;; ++attempt) {
        std::string raw = planner.complete(request);
        try {
            return plan::parse_planner_output(raw);
        } catch (const ParseError& e) {
            if (attempt >= parse_retries) throw;
            warn_to(warn, std::string("malformed planner output, retrying: ") + e.what());
        }
    }
}

inline PlanVerifyResult plan_verify_loop(PlanVerifyContext& ctx) {
    PlanVerifyResult result;
    const int cap = std::min(ctx.replan_cap, ctx.planner_budget_remaining);
    if (cap < 1) throw ValidationError("plan_verify_loop called without planner budget");

    std::optional<std::string> feedback;
    std::optional<plan::Guidance> last_guidance;
    bool violation_replan_used = false;

    while (result.planner_calls_budgeted < cap) {
        auto messages =
            plan::build_plan_prompt(ctx.principle, ctx.instruction, ctx.history,
                                    ctx.observation, feedback, ctx.history_include_guidance);
        auto output = call_planner(ctx.planner, messages, ctx.parse_retries, ctx.warn);
        result.planner_calls_budgeted += 1;

        if (output.finished()) {
            result.output = output;
            return result;
        }
        plan::Guidance guidance = *output.guidance;
        last_guidance = guidance;

        auto violations = plan::validate_action_phrases(guidance.text);
        if (!violations.empty()) {
            warn_to(ctx.warn,
                    "guidance uses action phrases outside the action space: " +
                        join(violations, ", "));
            if (ctx.strict_violations && !violation_replan_used &&
                result.planner_calls_budgeted < cap) {
                violation_replan_used = true;
                feedback = "the guidance used action phrases outside the allowed action "
                           "space: " +
                           join(violations, ", ");
                continue;
            }
        }

        const auto& view = select_direction_view(ctx.observation, guidance.direction_bucket);
        Verdict verdict =
            run_verifier(ctx.verifier, view, guidance, ctx.verifier_retries, ctx.warn);
        result.verifier_calls += 1;
        if (verdict.feasible) {
            result.output = plan::PlannerOutput::plan(std::move(guidance));
            return result;
        }
        feedback = verdict.reason;
    }

    warn_to(ctx.warn, "re-plan cap exhausted; proceeding with the most recent guidance");
    result.output = plan::PlannerOutput::plan(*last_guidance);
    return result;
}

}  // namespace flexnav::verify
