#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "flexnav/common.hpp"
#include "flexnav/envgraph.hpp"
#include "flexnav/perceive.hpp"
#include "flexnav/plan.hpp"
#include "flexnav/providers.hpp"

namespace flexnav::mocks {

// Deterministic reference providers. They implement the same wire formats as
// live adapters, so every wrapper (recording, replay, instrumentation)
// composes with them unchanged.

// ---------------------------------------------------------------------------
// Scene perception: echoes the stored scene texts as the per-view
// descriptions and synthesizes a position from the front view.

class MockScenePerceiver : public Provider {
public:
    std::string complete(const std::string& request) override {
        nlohmann::json j = nlohmann::json::parse(request);
        int round = j.at("round").get<int>();
        if (round == 1) return j.at("views").dump();
        if (round == 2) {
            std::string front = j.at("descriptions")[0].get<std::string>();
            if (trim(front).empty()) return "in an unmapped area";
            return "probably " + front;
        }
        throw ProviderError("unknown perceiver round " + std::to_string(round));
    }
};

// ---------------------------------------------------------------------------
// Feasibility verifiers

class AlwaysFeasibleVerifier : public Provider {
public:
    std::string complete(const std::string&) override { return "FEASIBLE"; }
};

// Rejects any guidance containing one of the configured keywords.
class KeywordRejectVerifier : public Provider {
public:
    explicit KeywordRejectVerifier(std::vector<std::pair<std::string, std::string>> rules)
        : rules_(std::move(rules)) {}

    std::string complete(const std::string& request) override {
        nlohmann::json j = nlohmann::json::parse(request);
        std::string guidance = to_lower(j.at("guidance").get<std::string>());
        for (const auto& [keyword, reason] : rules_) {
            if (guidance.find(to_lower(keyword)) != std::string::npos)
                return "INFEASIBLE: " + reason;
        }
        return "FEASIBLE";
    }

private:
    std::vector<std::pair<std::string, std::string>> rules_;  // keyword -> reason
};

// Scripted sequence of verdicts ("FEASIBLE" / "INFEASIBLE: reason" lines).
using ScriptedSequenceVerifier = ScriptedProvider;

// ---------------------------------------------------------------------------
// Instruction follower: greedy-toward-named-landmark reference.
//
// Scans the guidance context for the latest mention of an annotated object
// name and walks greedily (by geodesic) toward the viewpoint annotating it,
// stopping when no neighbor improves. Without a landmark it falls back to
// the last directional phrase in the context (forward / left / right /
// around) and picks the neighbor closest to that relative heading.

class LandmarkFollower : public Provider {
public:
    explicit LandmarkFollower(const envgraph::NavGraph& graph) : graph_(graph) {
        for (const auto& [id, vp] : graph.viewpoints())
            for (const auto& obj : vp.objects) name_to_nodes_[to_lower(obj.name)].insert(id);
    }

    std::string complete(const std::string& request) override {
        nlohmann::json j = nlohmann::json::parse(request);
        const std::string context = to_lower(j.at("context").get<std::string>());
        const std::string node = j.at("node").get<std::string>();

        if (auto target = landmark_target(context, node)) {
            if (*target == node) return "STOP";
            double here = graph_.geodesic(node, *target);
            std::string best;
            double best_dist = here;
            for (const auto& nb : graph_.neighbors(node)) {
                double d = graph_.geodesic(nb, *target);
                if (d < best_dist) {
                    best_dist = d;
                    best = nb;
                }
            }
            return best.empty() ? "STOP" : best;
        }

        if (auto heading = directional_target(context)) {
            std::string best;
            double best_off = 1e18;
            for (const auto& nb : j.at("neighbors")) {
                double off =
                    std::abs(normalize_delta(nb.at("heading_deg").get<double>() - *heading));
                if (off < best_off) {
                    best_off = off;
                    best = nb.at("id").get<std::string>();
                }
            }
            if (!best.empty()) return best;
        }
        return "STOP";
    }

private:
    // Latest-mentioned annotated object name in the context; longer names win
    // on equal positions so "maroon pillow" beats "pillow".
    std::optional<std::string> landmark_target(const std::string& context,
                                               const std::string& node) const {
        size_t best_pos = 0;
        size_t best_len = 0;
        const std::set<std::string>* nodes = nullptr;
        for (const auto& [name, owners] : name_to_nodes_) {
            size_t pos = context.rfind(name);
            if (pos == std::string::npos) continue;
            if (!nodes || pos > best_pos || (pos == best_pos && name.size() > best_len)) {
                best_pos = pos;
                best_len = name.size();
                nodes = &owners;
            }
        }
        if (!nodes) return std::nullopt;
        // nearest reachable instance of the landmark
        std::string best;
        double best_dist = std::numeric_limits<double>::infinity();
        for (const auto& owner : *nodes) {
            double d = graph_.geodesic(node, owner);
            if (d < best_dist) {
                best_dist = d;
                best = owner;
            }
        }
        if (best.empty()) return std::nullopt;
        return best;
    }

    static std::optional<double> directional_target(const std::string& context) {
        struct Phrase {
            const char* text;
            double heading;
        };
        static const Phrase phrases[] = {{"go forward", 0.0},
                                         {"turn left", -90.0},
                                         {"turn right", 90.0},
                                         {"turn around", 180.0},
                                         {"go upstairs", 0.0},
                                         {"go downstairs", 0.0}};
        std::optional<double> heading;
        size_t best_pos = 0;
        for (const auto& p : phrases) {
            size_t pos = context.rfind(p.text);
            if (pos == std::string::npos) continue;
            if (!heading || pos >= best_pos) {
                best_pos = pos;
                heading = p.heading;
            }
        }
        return heading;
    }

    const envgraph::NavGraph& graph_;
    std::map<std::string, std::set<std::string>> name_to_nodes_;
};

// ---------------------------------------------------------------------------
// Route-following planner: plans along the shortest path to the nearest
// goal, one chunk per call, then declares completion. Tracks its own assumed
// pose; it never inspects the prompt beyond consuming it.

class RouteMockPlanner : public Provider {
public:
    RouteMockPlanner(const envgraph::NavGraph& graph, const envgraph::Episode& episode,
                     int chunk_len = 3)
        : graph_(graph) {
        // shortest path to the nearest goal via predecessor search
        std::string goal;
        double best = std::numeric_limits<double>::infinity();
        for (const auto& g : episode.goal_viewpoints) {
            double d = graph.geodesic(episode.start_viewpoint, g);
            if (d < best) {
                best = d;
                goal = g;
            }
        }
        if (!goal.empty() && std::isfinite(best))
            path_ = shortest_path(graph, episode.start_viewpoint, goal);
        heading_ = episode.start_heading;
        chunk_len_ = std::max(1, chunk_len);
    }

    std::string complete(const std::string&) override {
        if (cursor_ + 1 >= path_.size()) return plan::kFinishToken;
        size_t end = std::min(path_.size() - 1, cursor_ + chunk_len_);
        const std::string& here = path_[cursor_];
        const std::string& next = path_[cursor_ + 1];
        const std::string& dest = path_[end];

        double toward = heading_;
        try {
            toward = envgraph::heading_between(graph_.viewpoint(here).pose,
                                               graph_.viewpoint(next).pose.position);
        } catch (const ValidationError&) {
        }
        int bucket = perceive::snap_to_bucket(toward - heading_);

        std::string landmark;
        auto objs = graph_.objects_within(dest, 3.0);
        if (!objs.empty()) landmark = objs.front().name;
        std::string guidance =
            landmark.empty() ? "go forward" : "go to the " + landmark;

        // assume the follower completes the chunk
        try {
            heading_ = envgraph::heading_between(graph_.viewpoint(path_[end - 1]).pose,
                                                 graph_.viewpoint(dest).pose.position);
        } catch (const ValidationError&) {
        }
        cursor_ = end;

        return "Thought: continue along the planned route toward " +
               (landmark.empty() ? dest : landmark) +
               "\nDirection: " + perceive::orientation_label(bucket) +
               "\nGuidance: " + guidance;
    }

    static std::vector<std::string> shortest_path(const envgraph::NavGraph& graph,
                                                  const std::string& from,
                                                  const std::string& to) {
        std::map<std::string, double> dist;
        std::map<std::string, std::string> prev;
        using Item = std::pair<double, std::string>;
        std::priority_queue<Item, std::vector<Item>, std::greater<Item>> heap;
        dist[from] = 0.0;
        heap.push({0.0, from});
        while (!heap.empty()) {
            auto [d, u] = heap.top();
            heap.pop();
            if (d > dist[u]) continue;
            if (u == to) break;
            for (const auto& v : graph.neighbors(u)) {
                double nd = d + graph.edge_weight(u, v);
                auto it = dist.find(v);
                if (it == dist.end() || nd < it->second) {
                    dist[v] = nd;
                    prev[v] = u;
                    heap.push({nd, v});
                }
            }
        }
        std::vector<std::string> path;
        if (!dist.count(to)) return path;
        for (std::string cur = to; cur != from; cur = prev.at(cur)) path.push_back(cur);
        path.push_back(from);
        std::reverse(path.begin(), path.end());
        return path;
    }

private:
    const envgraph::NavGraph& graph_;
    std::vector<std::string> path_;
    size_t cursor_ = 0;
    size_t chunk_len_ = 3;
    double heading_ = 0.0;
};

// ---------------------------------------------------------------------------
// Tie-break: always the first option.

class FirstOptionTieBreaker : public Provider {
public:
    std::string complete(const std::string&) override { return "A"; }
};

// ---------------------------------------------------------------------------
// Target extraction: last-noun-phrase heuristic over a fixed object lexicon,
// optionally extended with extra names (e.g. a scene's annotated objects).
// Returns "" when nothing matches; callers fall back to the instruction.

class NounPhraseExtractor : public Provider {
public:
    NounPhraseExtractor() = default;
    explicit NounPhraseExtractor(const std::vector<std::string>& extra_nouns) {
        for (const auto& n : extra_nouns)
            for (const auto& tok : word_tokens(n)) extra_.insert(tok);
    }

    std::string complete(const std::string& request) override {
        const auto tokens = word_tokens(request);
        // last lexicon noun wins
        size_t noun_idx = tokens.size();
        for (size_t i = 0; i < tokens.size(); ++i)
            if (is_noun(tokens[i])) noun_idx = i;
        if (noun_idx == tokens.size()) return "";
        // extend left over adjectives (non-stopword, non-noun qualifiers)
        size_t start = noun_idx;
        while (start > 0 && !is_stopword(tokens[start - 1]) && !is_noun(tokens[start - 1]) &&
               noun_idx - start < 2)
            --start;
        std::vector<std::string> phrase(tokens.begin() + start, tokens.begin() + noun_idx + 1);
        return join(phrase, " ");
    }

private:
    bool is_noun(const std::string& tok) const {
        static const std::set<std::string> lexicon{
            "lamp",    "pillow",   "chair",   "table",    "sofa",      "couch",
            "bed",     "tv",       "plant",   "towel",    "sink",      "toilet",
            "mirror",  "picture",  "painting", "vase",    "cabinet",   "shelf",
            "desk",    "rug",      "curtain", "fridge",   "oven",      "stove",
            "microwave", "cushion", "stool",  "bench",    "clock",     "book",
            "bottle",  "cup",      "mug",     "bowl",     "pot",       "pan",
            "fan",     "heater",   "radiator", "basket",  "box",       "dresser",
            "nightstand", "wardrobe", "bathtub", "shower", "fireplace", "piano",
        };
        return lexicon.count(tok) > 0 || extra_.count(tok) > 0;
    }

    static bool is_stopword(const std::string& tok) {
        static const std::set<std::string> stop{
            "the", "a",  "an",  "to",  "on",   "in",   "at",   "and",  "or",  "of",
            "my",  "your", "this", "that", "find", "go", "turn", "walk", "is", "near",
            "by",  "with", "for", "next", "then", "please", "locate", "bring", "me",
        };
        return stop.count(tok) > 0;
    }

    std::set<std::string> extra_;
};

// ---------------------------------------------------------------------------
// Object scorer: 1.0 on case-insensitive equality, else token-overlap
// (Jaccard) between candidate name and target phrase.

class OverlapScorer : public Provider {
public:
    std::string complete(const std::string& request) override {
        nlohmann::json j = nlohmann::json::parse(request);
        const std::string target = j.at("target").get<std::string>();
        const auto target_tokens = token_set(target);
        nlohmann::json scores = nlohmann::json::array();
        for (const auto& c : j.at("candidates")) {
            const std::string name = c.get<std::string>();
            scores.push_back(score(name, target, target_tokens));
        }
        return scores.dump();
    }

    static double score(const std::string& name, const std::string& target,
                        const std::set<std::string>& target_tokens) {
        if (iequals(trim(name), trim(target))) return 1.0;
        auto name_tokens = token_set(name);
        if (name_tokens.empty() || target_tokens.empty()) return 0.0;
        size_t common = 0;
        for (const auto& t : name_tokens) common += target_tokens.count(t);
        size_t unions = name_tokens.size() + target_tokens.size() - common;
        return static_cast<double>(common) / static_cast<double>(unions);
    }

    static std::set<std::string> token_set(const std::string& s) {
        auto toks = word_tokens(s);
        return {toks.begin(), toks.end()};
    }
};

}  // namespace flexnav::mocks
