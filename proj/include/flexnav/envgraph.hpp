#pragma once

#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <queue>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "flexnav/common.hpp"

namespace flexnav::envgraph {

// ---------------------------------------------------------------------------
// Geometry

struct Vec3 {
    double x = 0, y = 0, z = 0;

    friend bool operator==(const Vec3&, const Vec3&) = default;
};

inline double euclidean(const Vec3& a, const Vec3& b) {
    double dx = a.x - b.x, dy = a.y - b.y, dz = a.z - b.z;
    return std::sqrt(dx * dx + dy * dy + dz * dz);
}

// Agent pose. Heading is a compass angle in [0, 360) with 0 = +y axis and
// clockwise positive; elevation in [-90, 90]. z is height off ground and
// feeds floor/stair logic.
struct Pose {
    Vec3 position;
    double heading = 0.0;
    double elevation = 0.0;

    static Pose at(const Vec3& p, double heading = 0.0, double elevation = 0.0) {
        return Pose{p, normalize_heading(heading), elevation};
    }
};

// Absolute compass heading of the displacement from `from` to `to_position`,
// in [0, 360). Throws on zero planar displacement: a purely vertical move has
// no compass direction and callers must handle it.
inline double heading_between(const Pose& from, const Vec3& to_position) {
    double dx = to_position.x - from.position.x;
    double dy = to_position.y - from.position.y;
    if (dx == 0.0 && dy == 0.0)
        throw ValidationError("heading_between: zero planar displacement");
    return normalize_heading(std::atan2(dx, dy) * 180.0 / M_PI);
}

// ---------------------------------------------------------------------------
// Annotations and viewpoints

struct ObjectAnnotation {
    std::string object_id;  // unique within one viewpoint's annotation set
    std::string name;
    Vec3 position;
};

inline constexpr std::array<int, 4> kSceneBuckets{0, 90, 180, 270};

// A navigable node. scene_descriptions, when present, holds exactly the four
// absolute orientation buckets 0/90/180/270.
struct Viewpoint {
    std::string id;
    Pose pose;
    std::vector<ObjectAnnotation> objects;
    std::optional<std::map<int, std::string>> scene_descriptions;
};

// ---------------------------------------------------------------------------
// NavGraph
//
// Undirected weighted graph over viewpoints. Edge weights are always the
// Euclidean distance between endpoint positions, recomputed from positions
// rather than read from files. Immutable after load; all queries are pure
// reads and safe to share across concurrently running episodes.

class NavGraph {
public:
    NavGraph() = default;

    void add_viewpoint(Viewpoint vp) {
        std::string id = vp.id;
        viewpoints_[id] = std::move(vp);
        adjacency_.emplace(id, std::set<std::string>{});
    }

    void add_edge(const std::string& a, const std::string& b) {
        if (a == b) throw ValidationError("self-loop edge at viewpoint '" + a + "'");
        require(a);
        require(b);
        adjacency_[a].insert(b);
        adjacency_[b].insert(a);
    }

    bool has_viewpoint(const std::string& id) const { return viewpoints_.count(id) > 0; }

    const Viewpoint& viewpoint(const std::string& id) const {
        auto it = viewpoints_.find(id);
        if (it == viewpoints_.end())
            throw ValidationError("unknown viewpoint '" + id + "'");
        return it->second;
    }

    const std::map<std::string, Viewpoint>& viewpoints() const { return viewpoints_; }
    size_t size() const { return viewpoints_.size(); }

    bool has_edge(const std::string& a, const std::string& b) const {
        auto it = adjacency_.find(a);
        return it != adjacency_.end() && it->second.count(b) > 0;
    }

    double edge_weight(const std::string& a, const std::string& b) const {
        if (!has_edge(a, b))
            throw ValidationError("no edge between '" + a + "' and '" + b + "'");
        return euclidean(viewpoint(a).pose.position, viewpoint(b).pose.position);
    }

    // Neighbor ids in sorted order; never contains the node itself.
    std::vector<std::string> neighbors(const std::string& node) const {
        require(node);
        const auto& adj = adjacency_.at(node);
        return {adj.begin(), adj.end()};
    }

    // Shortest weighted path length (Dijkstra). Unreachable pairs yield
    // +infinity; callers surface those in reports rather than failing.
    double geodesic(const std::string& a, const std::string& b) const {
        require(a);
        require(b);
        if (a == b) return 0.0;
        constexpr double inf = std::numeric_limits<double>::infinity();
        std::map<std::string, double> dist;
        using Item = std::pair<double, std::string>;
        std::priority_queue<Item, std::vector<Item>, std::greater<Item>> heap;
        dist[a] = 0.0;
        heap.push({0.0, a});
        while (!heap.empty()) {
            auto [d, u] = heap.top();
            heap.pop();
            if (d > dist[u]) continue;
            if (u == b) return d;
            for (const auto& v : adjacency_.at(u)) {
                double nd = d + edge_weight(u, v);
                auto it = dist.find(v);
                if (it == dist.end() || nd < it->second) {
                    dist[v] = nd;
                    heap.push({nd, v});
                }
            }
        }
        return inf;
    }

    // Annotations within `radius` meters (inclusive) of the node's position,
    // drawn from every viewpoint's annotation set. The same physical object
    // annotated at several viewpoints (same id and position) appears once;
    // ids are only unique per viewpoint, so distinct objects sharing an id
    // stay distinct. Sorted by distance, then object_id.
    std::vector<ObjectAnnotation> objects_within(const std::string& node,
                                                 double radius = 3.0) const {
        if (radius <= 0.0) throw ValidationError("objects_within: radius must be > 0");
        const Vec3 origin = viewpoint(node).pose.position;
        std::map<std::string, std::pair<double, ObjectAnnotation>> best;
        for (const auto& [_, vp] : viewpoints_) {
            for (const auto& obj : vp.objects) {
                double d = euclidean(origin, obj.position);
                if (d > radius) continue;
                char key[256];
                std::snprintf(key, sizeof(key), "%s@%.17g,%.17g,%.17g",
                              obj.object_id.c_str(), obj.position.x, obj.position.y,
                              obj.position.z);
                auto it = best.find(key);
                if (it == best.end() || d < it->second.first)
                    best[key] = {d, obj};
            }
        }
        std::vector<std::pair<double, ObjectAnnotation>> sorted;
        sorted.reserve(best.size());
        for (auto& [_, entry] : best) sorted.push_back(entry);
        std::sort(sorted.begin(), sorted.end(), [](const auto& l, const auto& r) {
            if (l.first != r.first) return l.first < r.first;
            return l.second.object_id < r.second.object_id;
        });
        std::vector<ObjectAnnotation> out;
        out.reserve(sorted.size());
        for (auto& [_, obj] : sorted) out.push_back(obj);
        return out;
    }

    // Signed height difference z(b) - z(a).
    double height_delta(const std::string& a, const std::string& b) const {
        return viewpoint(b).pose.position.z - viewpoint(a).pose.position.z;
    }

    bool connected() const {
        if (viewpoints_.empty()) return true;
        std::set<std::string> seen;
        std::vector<std::string> stack{viewpoints_.begin()->first};
        seen.insert(stack.back());
        while (!stack.empty()) {
            std::string u = stack.back();
            stack.pop_back();
            for (const auto& v : adjacency_.at(u)) {
                if (seen.insert(v).second) stack.push_back(v);
            }
        }
        return seen.size() == viewpoints_.size();
    }

    nlohmann::json to_json() const;
    static NavGraph from_json(const nlohmann::json& j,
                              std::vector<std::string>* warnings = nullptr);

private:
    void require(const std::string& id) const {
        if (!has_viewpoint(id))
            throw ValidationError("unknown viewpoint '" + id + "'");
    }

    std::map<std::string, Viewpoint> viewpoints_;
    std::map<std::string, std::set<std::string>> adjacency_;
};

// ---------------------------------------------------------------------------
// Episode

struct Episode {
    std::string id;
    std::string instruction;
    std::string start_viewpoint;
    double start_heading = 0.0;
    std::vector<std::string> goal_viewpoints;  // nonempty
    std::string target_object;

    // Throws ValidationError unless start and all goals exist in `graph`.
    void validate_against(const NavGraph& graph) const {
        if (goal_viewpoints.empty())
            throw ValidationError("episode '" + id + "': empty goal set");
        if (!graph.has_viewpoint(start_viewpoint))
            throw ValidationError("episode '" + id + "': unknown start viewpoint '" +
                                  start_viewpoint + "'");
        for (const auto& g : goal_viewpoints) {
            if (!graph.has_viewpoint(g))
                throw ValidationError("episode '" + id + "': unknown goal viewpoint '" + g +
                                      "'");
        }
    }
};

// ---------------------------------------------------------------------------
// Environment file format
//
// {"viewpoints": [{"id", "position": [x,y,z], "objects": [{"id","name",
//  "position"}], "scenes": {"0":..,"90":..,"180":..,"270":..}}],
//  "edges": [[a, b], ...]}
//
// Serialization uses canonical (alphabetical) key order and shortest
// round-trip float rendering, so load -> save is byte-stable.

inline nlohmann::json NavGraph::to_json() const {
    nlohmann::json vps = nlohmann::json::array();
    for (const auto& [id, vp] : viewpoints_) {
        nlohmann::json objs = nlohmann::json::array();
        for (const auto& o : vp.objects) {
            objs.push_back({{"id", o.object_id},
                            {"name", o.name},
                            {"position", {o.position.x, o.position.y, o.position.z}}});
        }
        nlohmann::json entry{
            {"id", id},
            {"position", {vp.pose.position.x, vp.pose.position.y, vp.pose.position.z}},
            {"objects", objs}};
        if (vp.scene_descriptions) {
            nlohmann::json scenes = nlohmann::json::object();
            for (const auto& [bucket, text] : *vp.scene_descriptions)
                scenes[std::to_string(bucket)] = text;
            entry["scenes"] = scenes;
        }
        vps.push_back(entry);
    }
    nlohmann::json edges = nlohmann::json::array();
    std::set<std::pair<std::string, std::string>> seen;
    for (const auto& [a, adj] : adjacency_) {
        for (const auto& b : adj) {
            auto key = a < b ? std::make_pair(a, b) : std::make_pair(b, a);
            if (seen.insert(key).second) edges.push_back({key.first, key.second});
        }
    }
    return nlohmann::json{{"edges", edges}, {"viewpoints", vps}};
}

inline NavGraph NavGraph::from_json(const nlohmann::json& j,
                                    std::vector<std::string>* warnings) {
    NavGraph g;
    if (!j.is_object() || !j.contains("viewpoints") || !j.contains("edges"))
        throw ValidationError("environment file must have 'viewpoints' and 'edges' keys");
    for (const auto& entry : j.at("viewpoints")) {
        Viewpoint vp;
        vp.id = entry.at("id").get<std::string>();
        const auto& pos = entry.at("position");
        if (!pos.is_array() || pos.size() != 3)
            throw ValidationError("viewpoint '" + vp.id + "': position must be [x,y,z]");
        vp.pose = Pose::at({pos[0].get<double>(), pos[1].get<double>(), pos[2].get<double>()});
        if (entry.contains("objects")) {
            std::set<std::string> ids;
            for (const auto& o : entry.at("objects")) {
                ObjectAnnotation a;
                a.object_id = o.at("id").get<std::string>();
                a.name = o.at("name").get<std::string>();
                const auto& op = o.at("position");
                a.position = {op[0].get<double>(), op[1].get<double>(), op[2].get<double>()};
                if (!ids.insert(a.object_id).second)
                    throw ValidationError("viewpoint '" + vp.id + "': duplicate object id '" +
                                          a.object_id + "'");
                vp.objects.push_back(std::move(a));
            }
        }
        if (entry.contains("scenes")) {
            std::map<int, std::string> scenes;
            for (const auto& [key, text] : entry.at("scenes").items())
                scenes[std::stoi(key)] = text.get<std::string>();
            for (int b : kSceneBuckets) {
                if (!scenes.count(b))
                    throw ValidationError("viewpoint '" + vp.id +
                                          "': scenes must cover buckets 0/90/180/270");
            }
            if (scenes.size() != 4)
                throw ValidationError("viewpoint '" + vp.id +
                                      "': scenes must have exactly 4 buckets");
            vp.scene_descriptions = std::move(scenes);
        }
        if (g.has_viewpoint(vp.id))
            throw ValidationError("duplicate viewpoint id '" + vp.id + "'");
        g.add_viewpoint(std::move(vp));
    }
    for (const auto& e : j.at("edges")) {
        if (!e.is_array() || e.size() != 2)
            throw ValidationError("edge entries must be [id, id] pairs");
        std::string a = e[0].get<std::string>(), b = e[1].get<std::string>();
        if (!g.has_viewpoint(a) || !g.has_viewpoint(b))
            throw ValidationError("edge [" + a + ", " + b + "] references unknown viewpoint");
        g.add_edge(a, b);
    }
    if (!g.connected() && warnings)
        warnings->push_back("environment graph is disconnected; unreachable geodesics "
                            "will be reported as infinity");
    return g;
}

// Maps a byte offset from a JSON parse error to a 1-based line number.
inline size_t line_of_offset(const std::string& text, size_t offset) {
    size_t line = 1;
    for (size_t i = 0; i < offset && i < text.size(); ++i)
        if (text[i] == '\n') ++line;
    return line;
}

inline NavGraph load_graph(const std::filesystem::path& path,
                           std::vector<std::string>* warnings = nullptr) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open environment file: " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(path.string() + ":" + std::to_string(line_of_offset(text, e.byte)) +
                         ": " + e.what());
    }
    return NavGraph::from_json(j, warnings);
}

inline void save_graph(const NavGraph& graph, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write environment file: " + path.string());
    out << graph.to_json().dump(2) << "\n";
}

}  // namespace flexnav::envgraph
