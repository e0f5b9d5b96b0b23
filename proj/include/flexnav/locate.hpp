#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "flexnav/common.hpp"
#include "flexnav/envgraph.hpp"
#include "flexnav/providers.hpp"

namespace flexnav::locate {

// ---------------------------------------------------------------------------
// Localization result

struct ScoredCandidate {
    std::string object_id;
    std::string name;
    double score = 0.0;
};

struct LocalizationResult {
    std::string target_phrase;
    std::vector<ScoredCandidate> candidates;
    std::optional<std::string> chosen_id;    // argmax score, ties by smallest id
    std::optional<std::string> chosen_name;  // name of the chosen object

    bool grounded() const { return chosen_id.has_value(); }
};

// ---------------------------------------------------------------------------
// Target extraction
//
//   extractor wire: request = the raw instruction, response = a short noun
//   phrase naming the target object.
//
// An empty response falls back to the full instruction as the phrase.

inline std::string extract_target(Provider& extractor, const std::string& instruction,
                                  const WarnFn& warn = {}) {
    if (trim(instruction).empty())
        throw ValidationError("extract_target requires a nonempty instruction");
    std::string phrase = trim(extractor.complete(instruction));
    if (phrase.empty()) {
        warn_to(warn, "empty target-extractor response; using the full instruction");
        return instruction;
    }
    return phrase;
}

// ---------------------------------------------------------------------------
// Object scoring
//
//   scorer wire: request = {"candidates":[names...], "target": phrase},
//   response = JSON array of scores in [0, 1], one per candidate.

inline std::string scorer_request(const std::vector<std::string>& candidate_names,
                                  const std::string& target_phrase) {
    return nlohmann::json{{"candidates", candidate_names}, {"target", target_phrase}}.dump();
}

inline std::vector<double> parse_scores(const std::string& raw, size_t expected,
                                        const WarnFn& warn = {}) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(raw);
    } catch (const nlohmann::json::parse_error& e) {
        throw ProviderError(std::string("scorer response is not JSON: ") + e.what());
    }
    if (!j.is_array() || j.size() != expected)
        throw ProviderError("scorer must return exactly " + std::to_string(expected) +
                            " scores");
    std::vector<double> scores;
    for (const auto& v : j) {
        double s = v.get<double>();
        if (s < 0.0 || s > 1.0) {
            warn_to(warn, "score " + std::to_string(s) + " outside [0,1]; clamping");
            s = std::min(1.0, std::max(0.0, s));
        }
        scores.push_back(s);
    }
    return scores;
}

// Step 5: scores every object within 3 m of the final node against the
// target phrase and picks the argmax (ties by lexicographically smallest
// object id). Runs exactly once per episode, after the navigation ends; no
// candidates means grounding fails, which leaves navigation metrics intact.
inline LocalizationResult run_locator(Provider& scorer, const envgraph::NavGraph& graph,
                                      const std::string& final_node,
                                      const std::string& target_phrase,
                                      const WarnFn& warn = {}) {
    LocalizationResult result;
    result.target_phrase = target_phrase;

    auto nearby = graph.objects_within(final_node, 3.0);
    if (nearby.empty()) return result;

    std::vector<std::string> names;
    names.reserve(nearby.size());
    for (const auto& obj : nearby) names.push_back(obj.name);

    auto scores =
        parse_scores(scorer.complete(scorer_request(names, target_phrase)), names.size(),
                     warn);

    const ScoredCandidate* best = nullptr;
    for (size_t i = 0; i < nearby.size(); ++i) {
        result.candidates.push_back({nearby[i].object_id, nearby[i].name, scores[i]});
    }
    for (const auto& c : result.candidates) {
        if (!best || c.score > best->score ||
            (c.score == best->score && c.object_id < best->object_id))
            best = &c;
    }
    result.chosen_id = best->object_id;
    result.chosen_name = best->name;
    return result;
}

}  // namespace flexnav::locate
