#pragma once

#include <cmath>
#include <string>

#include "flexnav/common.hpp"
#include "flexnav/envgraph.hpp"
#include "flexnav/trajectory.hpp"

namespace flexnav::textualize {

// ---------------------------------------------------------------------------
// Directional phrases
//
// Six fixed phrases describe a move between adjacent viewpoints. A move is
// vertical ("go upstairs/downstairs") when |height delta| exceeds 0.2 m;
// that rule wins over the heading rules since a staircase move is primarily
// vertical. Otherwise the heading rotation decides: strictly under 30
// degrees is "go forward", 30..150 inclusive is a turn (clockwise-positive
// delta = "turn right"), beyond 150 is "turn around".

enum class DirectionalPhrase {
    GoDownstairs,
    GoUpstairs,
    GoForward,
    TurnLeft,
    TurnRight,
    TurnAround,
};

inline std::string to_string(DirectionalPhrase p) {
    switch (p) {
        case DirectionalPhrase::GoDownstairs: return "go downstairs";
        case DirectionalPhrase::GoUpstairs: return "go upstairs";
        case DirectionalPhrase::GoForward: return "go forward";
        case DirectionalPhrase::TurnLeft: return "turn left";
        case DirectionalPhrase::TurnRight: return "turn right";
        case DirectionalPhrase::TurnAround: return "turn around";
    }
    return "go forward";
}

// heading_delta in degrees, normalized to (-180, 180]; height_delta in m.
inline DirectionalPhrase directional_phrase(double heading_delta, double height_delta) {
    if (std::abs(height_delta) > 0.2)
        return height_delta > 0 ? DirectionalPhrase::GoUpstairs
                                : DirectionalPhrase::GoDownstairs;
    double a = std::abs(heading_delta);
    if (a < 30.0) return DirectionalPhrase::GoForward;
    if (a <= 150.0)
        return heading_delta > 0 ? DirectionalPhrase::TurnRight : DirectionalPhrase::TurnLeft;
    return DirectionalPhrase::TurnAround;
}

// ---------------------------------------------------------------------------
// Move description: "{directional phrase} to {object}, facing toward {scene}."
//
// The landmark object is sampled uniformly from the annotations within 3 m
// of the destination. Degenerate forms: with no nearby object the
// "to {object}" clause is omitted; with an empty scene text the
// ", facing toward {scene}" clause is omitted.

inline std::string describe_move(const envgraph::NavGraph& graph, const std::string& from,
                                 const std::string& to, double prev_heading,
                                 const std::string& scene_of_to, Rng& rng) {
    if (!graph.has_edge(from, to))
        throw ValidationError("describe_move: no edge between '" + from + "' and '" + to +
                              "'");
    const auto& src = graph.viewpoint(from);
    const auto& dst = graph.viewpoint(to);
    double height_delta = dst.pose.position.z - src.pose.position.z;
    double heading_delta = 0.0;
    try {
        double new_heading = envgraph::heading_between(src.pose, dst.pose.position);
        heading_delta = normalize_delta(new_heading - prev_heading);
    } catch (const ValidationError&) {
        // purely vertical move: keep heading, stairs rule decides the phrase
    }

    std::string text = to_string(directional_phrase(heading_delta, height_delta));
    auto nearby = graph.objects_within(to, 3.0);
    if (!nearby.empty()) {
        const auto& obj = nearby[rng.pick_index(nearby.size())];
        text += " to " + obj.name;
    }
    if (!scene_of_to.empty()) text += ", facing toward " + scene_of_to;
    text += ".";
    return text;
}

// ---------------------------------------------------------------------------
// Trajectory description fed back into navigation history.

enum class HistoryStyle { Landmark, Symbolic };

inline HistoryStyle history_style_from_string(const std::string& s) {
    if (s == "landmark") return HistoryStyle::Landmark;
    if (s == "symbolic") return HistoryStyle::Symbolic;
    throw ConfigError("unknown history_style '" + s + "' (expected landmark|symbolic)");
}

inline std::string describe_trajectory(const execute::TrajectorySegment& segment,
                                       HistoryStyle style = HistoryStyle::Landmark) {
    if (segment.steps.empty()) return "did not move.";
    std::string out;
    for (size_t i = 0; i < segment.steps.size(); ++i) {
        const auto& step = segment.steps[i];
        if (i) out += " ";
        if (style == HistoryStyle::Landmark) {
            out += step.action_text;
        } else {
            out += "Turn " + std::to_string(static_cast<long>(std::lround(step.heading_delta_deg))) +
                   " degrees. Move " + format_fixed1(step.distance_m) + " meters.";
        }
    }
    return out;
}

}  // namespace flexnav::textualize
