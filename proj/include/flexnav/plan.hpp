#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "flexnav/common.hpp"
#include "flexnav/perceive.hpp"

namespace flexnav::plan {

// ---------------------------------------------------------------------------
// Chat messages (planner wire format: JSON array of {role, content})

struct ChatMessage {
    std::string role;  // "system" | "user" | "assistant"
    std::string content;
};

using MessageList = std::vector<ChatMessage>;

inline std::string messages_to_json(const MessageList& messages) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& m : messages) arr.push_back({{"content", m.content}, {"role", m.role}});
    return arr.dump();
}

inline MessageList messages_from_json(const std::string& raw) {
    nlohmann::json arr = nlohmann::json::parse(raw);
    MessageList out;
    for (const auto& m : arr)
        out.push_back({m.at("role").get<std::string>(), m.at("content").get<std::string>()});
    return out;
}

// ---------------------------------------------------------------------------
// Action space
//
// The closed set of action phrases a guidance may use. Matching is
// case-insensitive on whole phrases.

inline const std::vector<std::string>& action_phrases() {
    static const std::vector<std::string> phrases{
        "go downstairs", "go upstairs", "go forward", "go through", "go past",
        "turn around",   "turn left",   "turn right", "turn left at", "turn right at",
        "go to",         "go into",     "go out of",  "stop",
    };
    return phrases;
}

inline std::string action_space_text() {
    return join(action_phrases(), ", ");
}

// Movement verbs that open an imperative phrase. A verb occurrence whose
// following words do not continue into one of the action phrases is a
// violation.
inline const std::vector<std::string>& movement_verbs() {
    static const std::vector<std::string> verbs{
        "go",    "turn",  "stop",  "walk",   "head",    "move",  "proceed",
        "step",  "run",   "jump",  "climb",  "enter",   "exit",  "leave",
        "cross", "pass",  "ascend", "descend", "approach", "follow", "continue",
    };
    return verbs;
}

// Scans guidance text for movement verb phrases outside the action space.
// Returns the violating phrases (verb plus its next word); empty means ok.
// Pure and idempotent; enforcement policy belongs to the caller.
inline std::vector<std::string> validate_action_phrases(const std::string& guidance_text) {
    const auto tokens = word_tokens(guidance_text);

    // Pre-tokenized action space, grouped for prefix matching.
    static const std::vector<std::vector<std::string>> phrase_tokens = [] {
        std::vector<std::vector<std::string>> out;
        for (const auto& p : action_phrases()) out.push_back(word_tokens(p));
        return out;
    }();

    std::vector<std::string> violations;
    for (size_t i = 0; i < tokens.size(); ++i) {
        bool is_verb = false;
        for (const auto& v : movement_verbs()) {
            if (tokens[i] == v) {
                is_verb = true;
                break;
            }
        }
        if (!is_verb) continue;

        bool matched = false;
        for (const auto& phrase : phrase_tokens) {
            if (i + phrase.size() > tokens.size()) continue;
            bool eq = true;
            for (size_t k = 0; k < phrase.size(); ++k) {
                if (tokens[i + k] != phrase[k]) {
                    eq = false;
                    break;
                }
            }
            if (eq) {
                matched = true;
                break;
            }
        }
        if (!matched) {
            std::string phrase = tokens[i];
            if (i + 1 < tokens.size()) phrase += " " + tokens[i + 1];
            violations.push_back(phrase);
        }
    }
    return violations;
}

// ---------------------------------------------------------------------------
// Planner output

// One planning step: reasoning, a view direction, and a fine-grained
// instruction whose action phrases stay inside the action space.
struct Guidance {
    std::string thought;
    int direction_bucket = 0;  // agent-relative: 0 front, 90 right, 180 back, 270 left
    std::string text;

    friend bool operator==(const Guidance&, const Guidance&) = default;
};

struct PlannerOutput {
    std::optional<Guidance> guidance;  // empty means the planner declared completion

    bool finished() const { return !guidance.has_value(); }

    static PlannerOutput finished_output() { return {}; }
    static PlannerOutput plan(Guidance g) { return {std::move(g)}; }
};

inline constexpr const char* kFinishToken = "Finished!";

namespace detail {
inline size_t find_ci(const std::string& haystack, const std::string& needle) {
    std::string h = to_lower(haystack), n = to_lower(needle);
    return h.find(n);
}
}  // namespace detail

// Parses raw planner text. The finish token is sticky: any output containing
// it parses as Finished regardless of other fields. Otherwise the three
// labeled fields are extracted; a missing Guidance field or an unparseable
// Direction is a ParseError (the runner may retry the planner).
inline PlannerOutput parse_planner_output(const std::string& raw) {
    if (detail::find_ci(raw, kFinishToken) != std::string::npos)
        return PlannerOutput::finished_output();

    struct Label {
        const char* name;
        size_t pos;
    };
    std::array<Label, 3> labels{{{"Thought:", detail::find_ci(raw, "thought:")},
                                 {"Direction:", detail::find_ci(raw, "direction:")},
                                 {"Guidance:", detail::find_ci(raw, "guidance:")}}};

    auto field = [&](size_t idx) -> std::optional<std::string> {
        size_t pos = labels[idx].pos;
        if (pos == std::string::npos) return std::nullopt;
        size_t start = pos + std::string(labels[idx].name).size();
        size_t end = raw.size();
        for (const auto& other : labels) {
            if (other.pos != std::string::npos && other.pos > pos && other.pos < end)
                end = other.pos;
        }
        return trim(raw.substr(start, end - start));
    };

    auto guidance_text = field(2);
    if (!guidance_text || guidance_text->empty())
        throw ParseError("planner output has no Guidance field");
    auto direction_text = field(1);
    if (!direction_text || direction_text->empty())
        throw ParseError("planner output has no Direction field");

    std::string dir = *direction_text;
    while (!dir.empty() && (dir.back() == '.' || dir.back() == '!')) dir.pop_back();
    int bucket;
    try {
        bucket = perceive::bucket_for_label(dir);
    } catch (const ParseError&) {
        throw ParseError("unparseable Direction value '" + *direction_text + "'");
    }

    Guidance g;
    g.thought = field(0).value_or("");
    g.direction_bucket = bucket;
    g.text = *guidance_text;
    return PlannerOutput::plan(std::move(g));
}

// Inverse of parse for well-formed guidances; parse(format(g)) == g as long
// as the thought text does not itself contain a field label.
inline std::string format_planner_output(const Guidance& g) {
    return "Thought: " + g.thought + "\nDirection: " +
           perceive::orientation_label(g.direction_bucket) + "\nGuidance: " + g.text;
}

// ---------------------------------------------------------------------------
// Navigation history

struct HistoryEntry {
    std::string trajectory_text;
    std::optional<std::string> guidance_text;
};

// Append-only within an episode. The default rendering shows trajectory
// texts only; previously issued guidances can be folded in for ablations.
class NavHistory {
public:
    void append(std::string trajectory_text, std::optional<std::string> guidance_text = {}) {
        iterations_.push_back({std::move(trajectory_text), std::move(guidance_text)});
    }

    bool empty() const { return iterations_.empty(); }
    size_t size() const { return iterations_.size(); }
    const std::vector<HistoryEntry>& iterations() const { return iterations_; }

    std::string render(bool include_guidance = false) const {
        if (iterations_.empty()) return "none";
        std::vector<std::string> lines;
        for (size_t i = 0; i < iterations_.size(); ++i) {
            const auto& it = iterations_[i];
            std::string line = std::to_string(i + 1) + ". ";
            if (include_guidance && it.guidance_text)
                line += "Guidance: " + *it.guidance_text + " Trajectory: ";
            line += it.trajectory_text;
            lines.push_back(line);
        }
        return join(lines, "\n");
    }

private:
    std::vector<HistoryEntry> iterations_;
};

// ---------------------------------------------------------------------------
// System principle
//
// Six sections in fixed order. The defaults below are the versioned assets
// shipped under prompts/; they are a working reconstruction, not normative
// text, and every section is configurable.

struct SystemPrinciple {
    std::string role;
    std::string objective;
    std::string input_definitions;
    std::string output_requirements;
    std::string abilities;
    std::string constraints;

    static SystemPrinciple defaults();
};

inline SystemPrinciple SystemPrinciple::defaults() {
    SystemPrinciple p;
    p.role = "You are a navigation agent moving through the inside of a building.";
    p.objective =
        "Your responsibility is to plan the trajectory toward the destination described "
        "by the instruction. Another agent (the Instruction Follower, referred to as "
        "Agent2) will execute each plan you produce and take you there.";
    p.input_definitions =
        "Instruction is the task you must complete. Navigation History lists what has "
        "already been explored, one entry per executed guidance. Current Observation "
        "gives your height off ground, your inferred position, the scene visible in each "
        "of the four directions (front, right, back, left), and the objects within 3 "
        "meters.";
    p.output_requirements =
        "Reply with exactly three labeled fields. Thought: the procedure of your "
        "decision-making. Direction: the direction to proceed, one of front, right, "
        "back, left. Guidance: a fine-grained command for Agent2 whose action phrases "
        "are confined to this action space: " +
        action_space_text() + ".";
    p.abilities =
        "First review the Navigation History and summarize the preceding trajectory so "
        "you do not visit the same place again. Then use common sense to determine the "
        "next place to explore from your current position and the four views. When you "
        "determine that the destination has been reached, output \"Finished!\" instead "
        "of the three fields.";
    p.constraints =
        "Do not interact with any objects. Do not use action phrases outside the action "
        "space. Keep each guidance short enough to execute in at most 5 movements.";
    return p;
}

// Concatenates the six sections in order under stable headers. Every section
// must be nonempty.
inline std::string build_system_principle(const SystemPrinciple& p) {
    const std::array<std::pair<const char*, const std::string*>, 6> sections{{
        {"Role", &p.role},
        {"Objective", &p.objective},
        {"Input Definitions", &p.input_definitions},
        {"Output Requirements", &p.output_requirements},
        {"Abilities", &p.abilities},
        {"Constraints", &p.constraints},
    }};
    std::string out;
    for (const auto& [header, text] : sections) {
        if (trim(*text).empty())
            throw ConfigError(std::string("system principle section '") + header +
                              "' is empty");
        if (!out.empty()) out += "\n\n";
        out += std::string(header) + ": " + *text;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Plan prompt
//
// System message carries the principle; the user message carries labeled
// Instruction / Navigation History / Current Observation blocks, plus the
// infeasibility feedback block when a previous guidance was rejected.

inline MessageList build_plan_prompt(const std::string& principle,
                                     const std::string& instruction,
                                     const NavHistory& history,
                                     const perceive::Observation& observation,
                                     const std::optional<std::string>& feedback = {},
                                     bool history_include_guidance = false) {
    std::string user = "Instruction: " + instruction + "\n\nNavigation History: " +
                       history.render(history_include_guidance) +
                       "\n\nCurrent Observation: " + observation.formatted_text;
    if (feedback)
        user += "\n\nThe previous guidance was infeasible because: " + *feedback;
    return {{"system", principle}, {"user", user}};
}

}  // namespace flexnav::plan
