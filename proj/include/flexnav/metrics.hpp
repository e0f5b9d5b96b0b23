#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "flexnav/envgraph.hpp"
#include "flexnav/locate.hpp"

namespace flexnav::metrics {

// ---------------------------------------------------------------------------
// Episode result

struct EpisodeResult {
    envgraph::Episode episode;
    std::vector<std::string> trajectory;  // node ids, first = start
    std::string final_node;               // always the last trajectory node
    locate::LocalizationResult localization;
    int planner_iterations = 0;
    bool aborted = false;
};

inline void validate_result(const envgraph::NavGraph& graph, const EpisodeResult& r) {
    if (r.trajectory.empty()) throw ValidationError("trajectory must contain the start node");
    if (r.trajectory.front() != r.episode.start_viewpoint)
        throw ValidationError("trajectory must begin at the episode start");
    if (r.final_node != r.trajectory.back())
        throw ValidationError("final_node must equal the last trajectory node");
    for (size_t i = 0; i + 1 < r.trajectory.size(); ++i) {
        if (!graph.has_edge(r.trajectory[i], r.trajectory[i + 1]))
            throw ValidationError("trajectory nodes '" + r.trajectory[i] + "' and '" +
                                  r.trajectory[i + 1] + "' are not adjacent");
    }
}

// ---------------------------------------------------------------------------
// Per-episode metrics
//
// NE, SPL and GP use geodesic (shortest weighted path) distances, the
// discrete-environment convention. Success means the target object is
// annotated within 3 m of a node (visibility is modeled as distance only).

// Trajectory length: sum of Euclidean edge lengths along the walked path.
inline double tl(const envgraph::NavGraph& graph, const EpisodeResult& r) {
    double total = 0.0;
    for (size_t i = 0; i + 1 < r.trajectory.size(); ++i)
        total += euclidean(graph.viewpoint(r.trajectory[i]).pose.position,
                           graph.viewpoint(r.trajectory[i + 1]).pose.position);
    return total;
}

inline double min_goal_geodesic(const envgraph::NavGraph& graph, const EpisodeResult& r,
                                const std::string& from) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& goal : r.episode.goal_viewpoints)
        best = std::min(best, graph.geodesic(from, goal));
    return best;
}

// Navigation error: geodesic distance from the final node to the nearest goal.
inline double ne(const envgraph::NavGraph& graph, const EpisodeResult& r) {
    return min_goal_geodesic(graph, r, r.final_node);
}

inline bool target_visible_at(const envgraph::NavGraph& graph, const std::string& node,
                              const std::string& target_object) {
    if (target_object.empty()) return false;
    for (const auto& obj : graph.objects_within(node, 3.0))
        if (iequals(obj.name, target_object)) return true;
    return false;
}

// Success: the target object lies within 3 m of the final location.
inline int sr(const envgraph::NavGraph& graph, const EpisodeResult& r) {
    return target_visible_at(graph, r.final_node, r.episode.target_object) ? 1 : 0;
}

// Oracle success: the sr test passes at any trajectory node.
inline int osr(const envgraph::NavGraph& graph, const EpisodeResult& r) {
    for (const auto& node : r.trajectory)
        if (target_visible_at(graph, node, r.episode.target_object)) return 1;
    return 0;
}

inline double path_length_weight(double shortest, double traveled) {
    if (shortest == 0.0) return 1.0;  // started at the goal
    return shortest / std::max(traveled, shortest);
}

// Success weighted by path length: SR * L / max(P, L).
inline double spl(const envgraph::NavGraph& graph, const EpisodeResult& r) {
    int success = sr(graph, r);
    if (!success) return 0.0;
    double shortest = min_goal_geodesic(graph, r, r.episode.start_viewpoint);
    if (!std::isfinite(shortest)) return 0.0;
    return success * path_length_weight(shortest, tl(graph, r));
}

// Remote grounding success: navigation succeeded and the locator chose an
// object whose name matches the target.
inline int rgs(const envgraph::NavGraph& graph, const EpisodeResult& r) {
    if (!sr(graph, r)) return 0;
    return r.localization.chosen_name &&
                   iequals(*r.localization.chosen_name, r.episode.target_object)
               ? 1
               : 0;
}

inline double rgspl(const envgraph::NavGraph& graph, const EpisodeResult& r) {
    int grounded = rgs(graph, r);
    if (!grounded) return 0.0;
    double shortest = min_goal_geodesic(graph, r, r.episode.start_viewpoint);
    if (!std::isfinite(shortest)) return 0.0;
    return grounded * path_length_weight(shortest, tl(graph, r));
}

// Goal progress: reduction in geodesic distance to the nearest goal between
// the start and the final position.
inline double gp(const envgraph::NavGraph& graph, const EpisodeResult& r) {
    return min_goal_geodesic(graph, r, r.episode.start_viewpoint) -
           min_goal_geodesic(graph, r, r.final_node);
}

struct EpisodeMetrics {
    double tl = 0, ne = 0, spl = 0, rgspl = 0, gp = 0;
    int sr = 0, osr = 0, rgs = 0;
    bool geodesics_finite = true;  // false when a required geodesic is infinite
};

inline EpisodeMetrics compute_metrics(const envgraph::NavGraph& graph,
                                      const EpisodeResult& r) {
    EpisodeMetrics m;
    m.tl = tl(graph, r);
    m.ne = ne(graph, r);
    m.sr = sr(graph, r);
    m.osr = osr(graph, r);
    m.spl = spl(graph, r);
    m.rgs = rgs(graph, r);
    m.rgspl = rgspl(graph, r);
    double start_geo = min_goal_geodesic(graph, r, r.episode.start_viewpoint);
    m.geodesics_finite = std::isfinite(m.ne) && std::isfinite(start_geo);
    m.gp = m.geodesics_finite ? start_geo - m.ne : 0.0;
    return m;
}

// ---------------------------------------------------------------------------
// Aggregation: macro averages over episodes whose geodesics are finite;
// episodes excluded for infinite geodesics are counted separately.

struct MetricsReport {
    size_t episode_count = 0;
    size_t excluded_count = 0;
    double tl = 0, ne = 0, sr = 0, osr = 0, spl = 0, rgs = 0, rgspl = 0, gp = 0;
};

inline MetricsReport aggregate(const std::vector<EpisodeMetrics>& all) {
    MetricsReport report;
    report.episode_count = all.size();
    size_t included = 0;
    for (const auto& m : all) {
        if (!m.geodesics_finite) {
            report.excluded_count += 1;
            continue;
        }
        included += 1;
        report.tl += m.tl;
        report.ne += m.ne;
        report.sr += m.sr;
        report.osr += m.osr;
        report.spl += m.spl;
        report.rgs += m.rgs;
        report.rgspl += m.rgspl;
        report.gp += m.gp;
    }
    if (included > 0) {
        double n = static_cast<double>(included);
        report.tl /= n;
        report.ne /= n;
        report.sr /= n;
        report.osr /= n;
        report.spl /= n;
        report.rgs /= n;
        report.rgspl /= n;
        report.gp /= n;
    }
    return report;
}

}  // namespace flexnav::metrics
