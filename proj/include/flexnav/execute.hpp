#pragma once

#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "flexnav/common.hpp"
#include "flexnav/envgraph.hpp"
#include "flexnav/perceive.hpp"
#include "flexnav/providers.hpp"
#include "flexnav/textualize.hpp"
#include "flexnav/trajectory.hpp"

namespace flexnav::execute {

// ---------------------------------------------------------------------------
// Actions

struct CandidateAction {
    bool stop = false;
    std::string node;  // move target; empty iff stop

    static CandidateAction stop_action() { return {true, ""}; }
    static CandidateAction move_to(std::string id) { return {false, std::move(id)}; }

    friend bool operator==(const CandidateAction&, const CandidateAction&) = default;
};

// ---------------------------------------------------------------------------
// Memory map: topological record of everywhere the agent has been, persisted
// across guidances within one episode. Grows monotonically.

class MemoryMap {
public:
    void visit(const std::string& node) {
        if (visited_.insert(node).second) visited_order_.push_back(node);
    }

    void observe_edge(const std::string& a, const std::string& b) {
        edges_.insert(a < b ? std::make_pair(a, b) : std::make_pair(b, a));
    }

    bool has_visited(const std::string& node) const { return visited_.count(node) > 0; }
    const std::vector<std::string>& visited_order() const { return visited_order_; }
    const std::set<std::pair<std::string, std::string>>& observed_edges() const {
        return edges_;
    }

    // Compact textual summary handed to followers.
    std::string summary() const {
        if (visited_order_.empty()) return "visited: none";
        return "visited: " + join(visited_order_, " -> ");
    }

private:
    std::vector<std::string> visited_order_;
    std::set<std::string> visited_;
    std::set<std::pair<std::string, std::string>> edges_;
};

// ---------------------------------------------------------------------------
// Guidance context fed to followers: either just the current guidance, or
// all guidances so far concatenated (the default).

enum class ContextMode { Single, Multi };

inline ContextMode context_mode_from_string(const std::string& s) {
    if (s == "single") return ContextMode::Single;
    if (s == "multi") return ContextMode::Multi;
    throw ConfigError("unknown guidance_context_mode '" + s + "' (expected single|multi)");
}

inline std::string guidance_context(ContextMode mode,
                                    const std::vector<std::string>& guidances) {
    if (guidances.empty())
        throw ValidationError("guidance_context requires at least one guidance");
    if (mode == ContextMode::Single) return guidances.back();
    return join(guidances, ". ");
}

// ---------------------------------------------------------------------------
// Follower wire format
//
//   request: {"context":..., "map":..., "neighbors":[{"distance_m":...,
//             "heading_deg":..., "id":...}], "node":..., "observation":...}
//   response: a neighbor id, or STOP
//
// heading_deg is relative to the agent's current heading, in (-180, 180];
// a purely vertical neighbor reports 0. observation carries the stored
// scene texts of the current node (absolute buckets), when present.

inline std::string follower_request(const envgraph::NavGraph& graph,
                                    const std::string& context, const std::string& node,
                                    double agent_heading, const MemoryMap& map) {
    const auto& vp = graph.viewpoint(node);
    nlohmann::json neighbors = nlohmann::json::array();
    for (const auto& nb : graph.neighbors(node)) {
        const auto& nvp = graph.viewpoint(nb);
        double rel = 0.0;
        try {
            rel = normalize_delta(envgraph::heading_between(vp.pose, nvp.pose.position) -
                                  agent_heading);
        } catch (const ValidationError&) {
            // vertical neighbor
        }
        neighbors.push_back({{"distance_m", graph.edge_weight(node, nb)},
                             {"heading_deg", rel},
                             {"id", nb}});
    }
    std::string observation;
    if (vp.scene_descriptions) {
        std::vector<std::string> parts;
        for (const auto& [bucket, text] : *vp.scene_descriptions)
            parts.push_back(std::to_string(bucket) + ": " + text);
        observation = join(parts, "; ");
    }
    return nlohmann::json{{"context", context},
                          {"map", map.summary()},
                          {"neighbors", neighbors},
                          {"node", node},
                          {"observation", observation}}
        .dump();
}

inline constexpr const char* kStopToken = "STOP";

// ---------------------------------------------------------------------------
// Voting

struct VoteOption {
    CandidateAction action;
    std::vector<int> proposers;  // follower indices, ascending
};

// Unanimous when every vote cast named the same action. Followers that fail
// or answer with something other than STOP or a current neighbor abstain;
// an empty option list means every follower abstained and the step fails.
struct VoteResult {
    std::vector<VoteOption> options;  // deduplicated, ordered by first proposer

    bool unanimous() const { return options.size() == 1; }
    bool empty() const { return options.empty(); }
};

inline VoteResult step_votes(const std::vector<Provider*>& followers,
                             const envgraph::NavGraph& graph, const std::string& context,
                             const std::string& node, double agent_heading,
                             const MemoryMap& map, const WarnFn& warn = {}) {
    if (followers.empty())
        throw ValidationError("step_votes requires at least one follower");
    const std::string request = follower_request(graph, context, node, agent_heading, map);
    const auto neighbor_ids = graph.neighbors(node);

    VoteResult result;
    for (size_t i = 0; i < followers.size(); ++i) {
        std::optional<CandidateAction> action;
        try {
            std::string raw = trim(followers[i]->complete(request));
            if (iequals(raw, kStopToken)) {
                action = CandidateAction::stop_action();
            } else if (std::find(neighbor_ids.begin(), neighbor_ids.end(), raw) !=
                       neighbor_ids.end()) {
                action = CandidateAction::move_to(raw);
            } else {
                warn_to(warn, "follower " + std::to_string(i) +
                                  " proposed a non-neighbor '" + raw + "'; abstaining");
            }
        } catch (const ProviderError& e) {
            warn_to(warn, "follower " + std::to_string(i) +
                              " failed and abstains: " + e.what());
        }
        if (!action) continue;
        bool found = false;
        for (auto& opt : result.options) {
            if (opt.action == *action) {
                opt.proposers.push_back(static_cast<int>(i));
                found = true;
                break;
            }
        }
        if (!found) result.options.push_back({*action, {static_cast<int>(i)}});
    }
    return result;
}

// ---------------------------------------------------------------------------
// Tie-break
//
// Disagreement is resolved by a language model answering a multiple-choice
// question over the textualized candidate actions. An unusable answer (or a
// failed call) falls back to the plurality vote, ties broken by the lowest
// proposing follower index.

inline std::string option_letter(size_t index) {
    return std::string(1, static_cast<char>('A' + index));
}

inline std::string build_tiebreak_prompt(const std::string& guidance_context,
                                         const std::string& iteration_trajectory,
                                         const std::vector<std::string>& option_texts) {
    std::string prompt =
        "You are helping a navigation agent follow a guidance. The follower models "
        "disagree on the next action.\n"
        "Guidance: " +
        guidance_context +
        "\n"
        "Executed so far for this guidance: " +
        iteration_trajectory +
        "\n"
        "Proposed actions:\n";
    for (size_t i = 0; i < option_texts.size(); ++i)
        prompt += option_letter(i) + ". " + option_texts[i] + "\n";
    prompt += "Answer with the single letter of the action that best follows the guidance.";
    return prompt;
}

// Returns the chosen option index, or nullopt when no standalone letter in
// range appears in the answer.
inline std::optional<size_t> parse_tiebreak_answer(const std::string& raw,
                                                   size_t option_count) {
    for (const auto& token : word_tokens(raw)) {
        if (token.size() != 1) continue;
        char c = token[0];
        if (c >= 'a' && static_cast<size_t>(c - 'a') < option_count)
            return static_cast<size_t>(c - 'a');
    }
    return std::nullopt;
}

inline CandidateAction plurality_fallback(const VoteResult& votes) {
    const VoteOption* best = nullptr;
    for (const auto& opt : votes.options) {
        if (!best || opt.proposers.size() > best->proposers.size() ||
            (opt.proposers.size() == best->proposers.size() &&
             opt.proposers.front() < best->proposers.front()))
            best = &opt;
    }
    return best->action;
}

inline CandidateAction tie_break(Provider& provider, const std::string& guidance_context,
                                 const std::string& iteration_trajectory,
                                 const VoteResult& votes,
                                 const std::vector<std::string>& option_texts,
                                 const WarnFn& warn = {}) {
    if (votes.options.empty())
        throw ValidationError("tie_break requires at least one option");
    const std::string prompt =
        build_tiebreak_prompt(guidance_context, iteration_trajectory, option_texts);
    try {
        std::string answer = provider.complete(prompt);
        auto idx = parse_tiebreak_answer(answer, votes.options.size());
        if (idx) return votes.options[*idx].action;
        warn_to(warn, "unparseable tie-break answer '" + trim(answer) +
                          "'; falling back to plurality");
    } catch (const ProviderError& e) {
        warn_to(warn, std::string("tie-break call failed; falling back to plurality: ") +
                          e.what());
    }
    return plurality_fallback(votes);
}

// ---------------------------------------------------------------------------
// Guidance execution

struct AgentPose {
    std::string node;
    double heading = 0.0;
};

struct ExecutionContext {
    const envgraph::NavGraph& graph;
    std::vector<Provider*> followers;
    Provider* tiebreaker = nullptr;  // required when followers can disagree
    int max_moves = 5;
    ContextMode context_mode = ContextMode::Multi;
    WarnFn warn;
};

// Front-view scene text at `node` for an agent heading, "" when the node
// carries no stored descriptions.
inline std::string front_scene(const envgraph::NavGraph& graph, const std::string& node,
                               double heading) {
    const auto& vp = graph.viewpoint(node);
    if (!vp.scene_descriptions) return "";
    return vp.scene_descriptions->at(perceive::snap_to_bucket(heading));
}

// Executes one verified guidance: up to max_moves moves decided by follower
// vote (tie-broken on disagreement), ending early when the ensemble stops or
// every follower abstains. Updates the agent pose and the memory map; the
// heading is retained on stop and across purely vertical moves.
inline TrajectorySegment execute_guidance(const ExecutionContext& ctx, AgentPose& pose,
                                          MemoryMap& map,
                                          const std::vector<std::string>& guidances,
                                          Rng& rng) {
    const std::string context = guidance_context(ctx.context_mode, guidances);
    TrajectorySegment segment;
    map.visit(pose.node);

    while (static_cast<int>(segment.steps.size()) < ctx.max_moves) {
        VoteResult votes = step_votes(ctx.followers, ctx.graph, context, pose.node,
                                      pose.heading, map, ctx.warn);
        if (votes.empty()) {
            warn_to(ctx.warn, "every follower abstained; ending guidance execution");
            break;
        }

        CandidateAction action;
        std::string rendered_action_text;
        if (votes.unanimous()) {
            action = votes.options.front().action;
        } else {
            std::vector<std::string> option_texts;
            option_texts.reserve(votes.options.size());
            for (const auto& opt : votes.options) {
                if (opt.action.stop) {
                    option_texts.push_back("stop here");
                } else {
                    double new_heading = pose.heading;
                    try {
                        new_heading = envgraph::heading_between(
                            ctx.graph.viewpoint(pose.node).pose,
                            ctx.graph.viewpoint(opt.action.node).pose.position);
                    } catch (const ValidationError&) {
                    }
                    option_texts.push_back(textualize::describe_move(
                        ctx.graph, pose.node, opt.action.node, pose.heading,
                        front_scene(ctx.graph, opt.action.node, new_heading), rng));
                }
            }
            if (!ctx.tiebreaker)
                throw ConfigError("split vote but no tiebreaker provider configured");
            action = tie_break(*ctx.tiebreaker, context,
                               textualize::describe_trajectory(segment), votes,
                               option_texts, ctx.warn);
            for (size_t i = 0; i < votes.options.size(); ++i) {
                if (votes.options[i].action == action && !action.stop)
                    rendered_action_text = option_texts[i];
            }
        }

        if (action.stop) {
            segment.stopped = true;
            break;
        }

        const std::string from = pose.node;
        const std::string to = action.node;
        double distance = ctx.graph.edge_weight(from, to);
        double new_heading = pose.heading;
        double heading_delta = 0.0;
        try {
            new_heading = envgraph::heading_between(ctx.graph.viewpoint(from).pose,
                                                    ctx.graph.viewpoint(to).pose.position);
            heading_delta = normalize_delta(new_heading - pose.heading);
        } catch (const ValidationError&) {
            // vertical move keeps the heading
        }
        std::string action_text =
            !rendered_action_text.empty()
                ? rendered_action_text
                : textualize::describe_move(ctx.graph, from, to, pose.heading,
                                            front_scene(ctx.graph, to, new_heading), rng);

        segment.steps.push_back({from, to, action_text, heading_delta, distance});
        pose.node = to;
        pose.heading = new_heading;
        map.visit(to);
        map.observe_edge(from, to);
    }
    return segment;
}

}  // namespace flexnav::execute
