#pragma once

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include <json.hpp>

#include "flexnav/common.hpp"
#include "flexnav/envgraph.hpp"
#include "flexnav/providers.hpp"

namespace flexnav::perceive {

// ---------------------------------------------------------------------------
// Views
//
// Perception discretizes the surroundings into four egocentric views, one
// per 90-degree bucket relative to the agent's heading. Bucket-to-label
// mapping is fixed: 0=front, 90=right, 180=back, 270=left.

struct ViewDescriptor {
    int orientation_bucket = 0;  // 0 | 90 | 180 | 270, agent-relative
    std::string orientation_label;
    std::string scene_text;
};

inline constexpr std::array<const char*, 4> kOrientationLabels{"front", "right", "back",
                                                               "left"};

inline std::string orientation_label(int bucket) {
    switch (bucket) {
        case 0: return "front";
        case 90: return "right";
        case 180: return "back";
        case 270: return "left";
    }
    throw ValidationError("orientation bucket must be one of 0/90/180/270, got " +
                          std::to_string(bucket));
}

inline int bucket_for_label(const std::string& label) {
    std::string l = to_lower(trim(label));
    if (l == "front") return 0;
    if (l == "right") return 90;
    if (l == "back") return 180;
    if (l == "left") return 270;
    throw ParseError("unknown direction label '" + label + "'");
}

// Nearest stored bucket (multiple of 90, mod 360) for an absolute heading.
inline int snap_to_bucket(double heading_deg) {
    long idx = std::lround(normalize_heading(heading_deg) / 90.0) % 4;
    return static_cast<int>(idx * 90);
}

// Rotates the viewpoint's stored absolute scene descriptions into the agent
// frame: relative bucket b reads the stored bucket nearest to
// (agent_heading + b) mod 360. Requires stored descriptions; when a node has
// none the perception provider must synthesize views instead.
inline std::array<ViewDescriptor, 4> discretize_views(const envgraph::NavGraph& graph,
                                                      const std::string& node,
                                                      double agent_heading) {
    const auto& vp = graph.viewpoint(node);
    if (!vp.scene_descriptions)
        throw ValidationError("viewpoint '" + node + "' has no scene descriptions");
    std::array<ViewDescriptor, 4> views;
    for (size_t i = 0; i < 4; ++i) {
        int rel = static_cast<int>(i) * 90;
        int abs_bucket = snap_to_bucket(agent_heading + rel);
        views[i] = {rel, orientation_label(rel), vp.scene_descriptions->at(abs_bucket)};
    }
    return views;
}

// ---------------------------------------------------------------------------
// Floor inference: one story per 3 m of height, never below floor 0.

inline int infer_floor(double height_m, double story_height_m = 3.0) {
    int floor = static_cast<int>(std::floor(height_m / story_height_m));
    return floor < 0 ? 0 : floor;
}

// ---------------------------------------------------------------------------
// Observation

struct Observation {
    std::string node;
    double height_m = 0.0;
    int floor_index = 0;
    std::string position_desc;
    std::array<ViewDescriptor, 4> views;  // front, right, back, left
    std::vector<std::string> objects_in_3m;
    std::string formatted_text;  // always equals format_observation(*this)
};

// Renders the fixed observation template:
//   Height off ground is {height} meters. {Current position}.
//   {Orientation}: {Scene description}. ... Objects in 3m: {objects}.
// One orientation clause per view in order front, right, back, left; height
// with one decimal; objects comma-separated, or the literal "none".
inline std::string format_observation(const Observation& obs) {
    std::string out = "Height off ground is " + format_fixed1(obs.height_m) + " meters. " +
                      obs.position_desc + ".";
    for (const auto& v : obs.views)
        out += " " + v.orientation_label + ": " + v.scene_text + ".";
    out += " Objects in 3m: ";
    out += obs.objects_in_3m.empty() ? "none" : join(obs.objects_in_3m, ", ");
    out += ".";
    return out;
}

// ---------------------------------------------------------------------------
// Scene-perception provider wire format
//
// Round 1 presents all four views jointly (they are captured from the same
// location) and expects four per-view descriptions back. Round 2 asks for a
// description of the current position given the views and the round-1
// descriptions.
//
//   round 1 request:  {"round":1,"views":[v0,v1,v2,v3]}
//   round 1 response: JSON array of 4 strings
//   round 2 request:  {"round":2,"views":[...],"descriptions":[...]}
//   round 2 response: plain position text

inline std::string round1_request(const std::array<std::string, 4>& views) {
    return nlohmann::json{{"round", 1}, {"views", views}}.dump();
}

inline std::string round2_request(const std::array<std::string, 4>& views,
                                  const std::array<std::string, 4>& descriptions) {
    return nlohmann::json{{"descriptions", descriptions}, {"round", 2}, {"views", views}}
        .dump();
}

inline std::array<std::string, 4> parse_round1_response(const std::string& raw) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(raw);
    } catch (const nlohmann::json::parse_error& e) {
        throw ProviderError(std::string("perceiver round-1 response is not JSON: ") +
                            e.what());
    }
    if (!j.is_array() || j.size() != 4)
        throw ProviderError("perceiver round-1 response must be an array of 4 strings");
    std::array<std::string, 4> out;
    for (size_t i = 0; i < 4; ++i) out[i] = j[i].get<std::string>();
    return out;
}

// Payload sent for one view: a stored scene text, or an opaque image
// reference the provider must resolve when the node carries no text.
inline std::array<std::string, 4> view_payloads(const envgraph::NavGraph& graph,
                                                const std::string& node,
                                                double agent_heading) {
    const auto& vp = graph.viewpoint(node);
    std::array<std::string, 4> payloads;
    for (size_t i = 0; i < 4; ++i) {
        int abs_bucket = snap_to_bucket(agent_heading + static_cast<int>(i) * 90);
        if (vp.scene_descriptions)
            payloads[i] = vp.scene_descriptions->at(abs_bucket);
        else
            payloads[i] = "image:" + node + ":" + std::to_string(abs_bucket);
    }
    return payloads;
}

// Step 1 of the pipeline: builds the textual observation for the agent's
// situation at `node`. The provider is consulted in the two-round shape
// above; objects come from the 3 m proximity query and the floor from the
// height rule. Provider failures propagate as ProviderError (retry policy
// belongs to the caller).
inline Observation perceive(Provider& provider, const envgraph::NavGraph& graph,
                            const std::string& node, double agent_heading) {
    const auto& vp = graph.viewpoint(node);
    auto payloads = view_payloads(graph, node, agent_heading);

    auto descriptions = parse_round1_response(provider.complete(round1_request(payloads)));
    std::string position = trim(provider.complete(round2_request(payloads, descriptions)));

    Observation obs;
    obs.node = node;
    obs.height_m = vp.pose.position.z;
    obs.floor_index = infer_floor(obs.height_m);
    obs.position_desc = position;
    for (size_t i = 0; i < 4; ++i) {
        int rel = static_cast<int>(i) * 90;
        obs.views[i] = {rel, orientation_label(rel), descriptions[i]};
    }
    for (const auto& obj : graph.objects_within(node, 3.0))
        obs.objects_in_3m.push_back(obj.name);
    obs.formatted_text = format_observation(obs);
    return obs;
}

}  // namespace flexnav::perceive
