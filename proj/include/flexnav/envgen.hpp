#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "flexnav/common.hpp"
#include "flexnav/envgraph.hpp"

namespace flexnav::envgen {

// Deterministic synthetic multi-floor house: a connected graph of rooms on a
// jittered grid, one chain per floor, staircase links between floors, with
// object annotations near each node and four scene texts per node. The same
// (nodes, floors, seed) triple always yields the same environment.

namespace detail {

inline const std::vector<std::string>& room_types() {
    static const std::vector<std::string> v{
        "living room", "kitchen",     "bedroom", "bathroom", "hallway",
        "office",      "dining room", "lounge",  "laundry room",
    };
    return v;
}

inline const std::vector<std::string>& adjectives() {
    static const std::vector<std::string> v{
        "bright", "cozy", "spacious", "narrow", "tidy", "cluttered", "dim", "sunlit",
    };
    return v;
}

inline const std::vector<std::string>& features() {
    static const std::vector<std::string> v{
        "a wooden floor",  "white walls",    "a large window", "framed pictures",
        "a patterned rug", "potted plants",  "a ceiling fan",  "tall bookshelves",
    };
    return v;
}

inline const std::vector<std::string>& object_names() {
    static const std::vector<std::string> v{
        "lamp",  "pillow", "chair",  "table", "sofa",  "bed",     "plant", "mirror",
        "vase",  "clock",  "towel",  "sink",  "desk",  "shelf",   "cushion",
        "stool", "painting", "rug",  "bench", "dresser",
    };
    return v;
}

}  // namespace detail

inline envgraph::NavGraph generate_environment(int nodes, int floors, std::uint64_t seed) {
    if (nodes < 1) throw ConfigError("generate_environment: nodes must be >= 1");
    if (floors < 1) throw ConfigError("generate_environment: floors must be >= 1");
    if (nodes < floors)
        throw ConfigError("generate_environment: need at least one node per floor");

    Rng rng(seed);
    envgraph::NavGraph graph;
    std::vector<std::vector<std::string>> floor_nodes(floors);
    int object_counter = 0;

    int base = nodes / floors, extra = nodes % floors;
    for (int f = 0; f < floors; ++f) {
        int count = base + (f < extra ? 1 : 0);
        int cols = std::max(1, static_cast<int>(std::ceil(std::sqrt(count))));
        for (int i = 0; i < count; ++i) {
            envgraph::Viewpoint vp;
            char buf[32];
            std::snprintf(buf, sizeof(buf), "f%dn%02d", f, i);
            vp.id = buf;
            double jx = rng.unit() * 1.2 - 0.6;
            double jy = rng.unit() * 1.2 - 0.6;
            vp.pose = envgraph::Pose::at({(i % cols) * 4.0 + jx, (i / cols) * 4.0 + jy,
                                          f * 3.0 + 1.4});

            const auto& rooms = detail::room_types();
            const auto& adjs = detail::adjectives();
            const auto& feats = detail::features();
            std::string room = rooms[rng.pick_index(rooms.size())];
            std::map<int, std::string> scenes;
            for (int bucket : envgraph::kSceneBuckets) {
                scenes[bucket] = "a " + adjs[rng.pick_index(adjs.size())] + " " + room +
                                 " with " + feats[rng.pick_index(feats.size())];
            }
            vp.scene_descriptions = std::move(scenes);

            size_t object_count = 1 + rng.pick_index(3);  // 1..3 objects per node
            const auto& names = detail::object_names();
            for (size_t k = 0; k < object_count; ++k) {
                envgraph::ObjectAnnotation obj;
                obj.object_id = "o" + std::to_string(object_counter++);
                obj.name = names[rng.pick_index(names.size())];
                obj.position = {vp.pose.position.x + (rng.unit() * 3.0 - 1.5),
                                vp.pose.position.y + (rng.unit() * 3.0 - 1.5),
                                vp.pose.position.z + (rng.unit() * 1.0 - 0.2)};
                vp.objects.push_back(std::move(obj));
            }
            graph.add_viewpoint(std::move(vp));
            floor_nodes[f].push_back(buf);
        }
    }

    // chain per floor keeps each floor connected; sprinkle shortcuts
    for (int f = 0; f < floors; ++f) {
        const auto& ids = floor_nodes[f];
        for (size_t i = 0; i + 1 < ids.size(); ++i) graph.add_edge(ids[i], ids[i + 1]);
        for (size_t i = 0; i + 2 < ids.size(); ++i) {
            if (rng.unit() < 0.35) graph.add_edge(ids[i], ids[i + 2]);
        }
    }
    // staircase between the end of one floor and the start of the next
    for (int f = 0; f + 1 < floors; ++f)
        graph.add_edge(floor_nodes[f].back(), floor_nodes[f + 1].front());

    return graph;
}

}  // namespace flexnav::envgen
