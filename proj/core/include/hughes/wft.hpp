#ifndef HUGHES_WFT_HPP
#define HUGHES_WFT_HPP

#include <cstdint>
#include <vector>

#include "hughes/density.hpp"
#include "hughes/model.hpp"
#include "hughes/riemann.hpp"
#include "hughes/scenario.hpp"
#include "hughes/trace.hpp"

namespace hughes::wft {

/// Dyadic density grid {i * eps * rho_max, 0 <= i <= 2^n} with eps = 2^-n,
/// together with the flux values at the nodes (the piecewise linear
/// interpolant of f agrees with f there, so chord speeds of grid states are
/// chords of the interpolant).
struct WftGrid {
    int n = 0;
    double eps = 1.0;
    double step = 1.0; // eps * rho_max
    std::vector<double> values;

    double snap(double rho) const; // nearest node, ties toward zero
    long index_of(double rho) const;
};

WftGrid make_grid(const FluxModel& flux, int n);

/// Values rounded to the nearest grid node (ties down), breakpoints kept.
PiecewiseConstantDensity discretize_datum(const PiecewiseConstantDensity& rho,
                                          const WftGrid& grid);

enum class FrontKind { shock, rarefaction, turning };

struct Front {
    long id = 0;
    double x = 0.0;
    double speed = 0.0;
    double left = 0.0;
    double right = 0.0;
    FrontKind kind = FrontKind::shock;
};

/// Moving discontinuities ordered by position; exactly one turning front.
/// Collision times are recomputed from current speeds on demand.
struct FrontList {
    double t = 0.0;
    std::vector<Front> fronts;
    long next_id = 0;
    double max_balance_residual = 0.0; // largest |balance(xi)| seen (logged)

    std::size_t turning_index() const;
    const Front& turning() const { return fronts[turning_index()]; }
    PiecewiseConstantDensity density() const;
    double total_variation() const;
};

/// Shock speed is always the Rankine-Hugoniot chord (sign flipped left of
/// the turning point); rarefaction fronts use the chord by default or the
/// entropy-flux ratio (q(r)-q(l))/(c(r)-c(l)), q = -c + 2 ln c, in
/// entropy-flux mode (reciprocal cost only).
double front_speed(const FluxModel& flux, const CostModel& cost, double left, double right,
                   riemann::Direction side, WftSpeedMode mode);

/// Turning-curve speed for distinct traces: (f(r) + f(l)) / (r - l).
double turning_speed(const FluxModel& flux, double trace_left, double trace_right);

/// Balance-preserving turning speed for equal traces, from the speeds and
/// cost jumps of the fronts strictly inside (-1, 1).
double balance_turning_speed(const FrontList& list, const CostModel& cost);

struct WftRunResult {
    SolutionTrace trace;
    std::vector<std::pair<double, std::vector<Front>>> front_snapshots;
    std::size_t max_front_count = 0;
    double max_tv = 0.0;
    long collision_count = 0;
    long turning_interaction_count = 0;
    long turning_crossing_count = 0; // resolutions with distinct traces
};

class Simulator {
public:
    Simulator(const VelocityModel& velocity, const CostModel& cost, int n, WftSpeedMode mode);

    const WftGrid& grid() const { return grid_; }
    const FluxModel& flux() const { return flux_; }

    /// Fronts of the grid-valued datum: classical fans at every jump away
    /// from the balance root, the turning construction at the root itself.
    FrontList initial_fronts(const PiecewiseConstantDensity& grid_datum) const;

    /// Moves to the earliest predicted collision or wall crossing, resolves
    /// it, and restores the balance anchoring. No-op past the given cap.
    std::vector<TraceEvent> advance(FrontList& list, double t_cap) const;

    /// Earliest predicted event time (infinity when none).
    double next_event_time(const FrontList& list) const;

    WftRunResult run(const PiecewiseConstantDensity& datum, double horizon,
                     double output_dt) const;

    std::size_t front_cap = 1000000;

private:
    VelocityModel velocity_;
    CostModel cost_;
    FluxModel flux_;
    WftGrid grid_;
    WftSpeedMode mode_;

    struct Resolution;
    void emit_jump(FrontList& list, double x, double left, double right,
                   riemann::Direction side, std::vector<Front>& out) const;
    Resolution resolve_turning(const FrontList& others, double xi, double a, double b) const;
    void rebuild_turning(FrontList& list, std::vector<TraceEvent>& events, bool log_crossing) const;
};

WftRunResult run(const Scenario& scenario, int n);

} // namespace hughes::wft

#endif
