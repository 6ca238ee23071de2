#ifndef HUGHES_TRACE_HPP
#define HUGHES_TRACE_HPP

#include <optional>
#include <string>
#include <vector>

#include "hughes/density.hpp"

namespace hughes {

enum class Scheme { dpa, wft };

enum class EventKind {
    exit_left,
    exit_right,
    turning_jump,      // zeta jumped at an event instant
    direction_switch,  // a particle changed group / the curve swept a front
    front_collision,   // wft: two fronts merged
    turning_interaction, // wft: a front reached the turning curve
    boundary_cross,    // wft: a front crossed x = -1 or x = 1
};

std::string event_kind_name(EventKind k);
EventKind event_kind_from_name(const std::string& name);

struct TraceEvent {
    double t = 0.0;
    EventKind kind = EventKind::exit_left;
    long index = -1;   // particle index / front id where meaningful
    double a = 0.0;    // payload (old zeta / position / left state)
    double b = 0.0;    // payload (new zeta / right state)
};

struct TurningSample {
    double t = 0.0;
    double xi = 0.0;
    double trace_left = 0.0;
    double trace_right = 0.0;
    bool at_event = false; // sample taken at an interaction, kink or jump
};

/// Time-stamped record of a run: density snapshots on the whole line,
/// turning-point samples with one-sided traces, and the event log.
struct SolutionTrace {
    Scheme scheme = Scheme::dpa;
    std::vector<DensitySnapshot> snapshots;
    std::vector<TurningSample> turning;
    std::vector<TraceEvent> events;
    std::optional<double> evacuation_time;

    // wft diagnostics, aligned with snapshots
    std::vector<double> tv_series;
    std::vector<std::size_t> front_counts;
    double max_balance_residual = 0.0;

    std::vector<double> turning_jump_times() const;
    const DensitySnapshot& snapshot_nearest(double t) const;
};

} // namespace hughes

#endif
