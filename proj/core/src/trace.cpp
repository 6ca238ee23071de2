#include "hughes/trace.hpp"

#include <cmath>
#include <stdexcept>

namespace hughes {

std::string event_kind_name(EventKind k) {
    switch (k) {
    case EventKind::exit_left: return "exit_left";
    case EventKind::exit_right: return "exit_right";
    case EventKind::turning_jump: return "turning_jump";
    case EventKind::direction_switch: return "direction_switch";
    case EventKind::front_collision: return "front_collision";
    case EventKind::turning_interaction: return "turning_interaction";
    case EventKind::boundary_cross: return "boundary_cross";
    }
    throw std::logic_error("unreachable event kind");
}

EventKind event_kind_from_name(const std::string& name) {
    if (name == "exit_left") return EventKind::exit_left;
    if (name == "exit_right") return EventKind::exit_right;
    if (name == "turning_jump") return EventKind::turning_jump;
    if (name == "direction_switch") return EventKind::direction_switch;
    if (name == "front_collision") return EventKind::front_collision;
    if (name == "turning_interaction") return EventKind::turning_interaction;
    if (name == "boundary_cross") return EventKind::boundary_cross;
    throw std::invalid_argument("unknown event kind: " + name);
}

std::vector<double> SolutionTrace::turning_jump_times() const {
    std::vector<double> times;
    for (const TraceEvent& e : events)
        if (e.kind == EventKind::turning_jump) times.push_back(e.t);
    return times;
}

const DensitySnapshot& SolutionTrace::snapshot_nearest(double t) const {
    if (snapshots.empty()) throw std::invalid_argument("trace has no snapshots");
    const DensitySnapshot* best = &snapshots.front();
    for (const DensitySnapshot& s : snapshots)
        if (std::abs(s.t - t) < std::abs(best->t - t)) best = &s;
    return *best;
}

} // namespace hughes
