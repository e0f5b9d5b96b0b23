#pragma once

#include <optional>
#include <string>
#include <vector>

namespace flexnav::execute {

// One executed move within a guidance. heading_delta_deg and distance_m are
// captured at execution time so the symbolic history renderer does not need
// the graph.
struct TrajectoryStep {
    std::string from;
    std::string to;
    std::string action_text;      // landmark-style rendering of this move
    double heading_delta_deg = 0; // normalized to (-180, 180]
    double distance_m = 0;
};

// The moves executed for one guidance, at most the per-guidance move budget.
// `stopped` marks that the followers chose to stop before exhausting it.
struct TrajectorySegment {
    std::vector<TrajectoryStep> steps;  // consecutive steps chain from->to
    bool stopped = false;

    size_t move_count() const { return steps.size(); }
};

}  // namespace flexnav::execute
