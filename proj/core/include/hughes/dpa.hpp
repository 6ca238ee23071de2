#ifndef HUGHES_DPA_HPP
#define HUGHES_DPA_HPP

#include <optional>
#include <vector>

#include "hughes/density.hpp"
#include "hughes/model.hpp"
#include "hughes/scenario.hpp"
#include "hughes/trace.hpp"

namespace hughes::dpa {

/// Follow-the-leader particle state. Positions are strictly ordered with
/// gaps >= m/rho_max (discrete maximum principle). Particles left of zeta
/// move left using the gap behind them, particles at or right of zeta move
/// right using the gap ahead; `first_right` is that partition point.
/// `frozen` marks a particle pinned at zeta by the symmetric tie rule of the
/// balance operator (-1 when none).
struct ParticleState {
    std::vector<double> x;
    double m = 0.0;
    double zeta = 0.0;
    double t = 0.0;
    std::size_t first_right = 0;
    long frozen = -1;

    std::size_t count() const { return x.size(); }
    long inside_count() const; // particles strictly inside (-1, 1)
};

enum class DensityMode {
    all_gaps,         // every gap carries m/width (linear-cost convention)
    zero_turning_gap, // the gap straddling zeta carries zero
};

/// Mass-quantile initialization: N+1 particles, N = 2^n (or an explicit
/// count), gap masses exactly m = M/N, endpoints at the support edges.
ParticleState init_particles(const PiecewiseConstantDensity& rho0, int n);
ParticleState init_particles_count(const PiecewiseConstantDensity& rho0, long segments);

std::vector<double> velocities(const ParticleState& s, const VelocityModel& velocity);

PiecewiseConstantDensity reconstruct_density(const ParticleState& s, DensityMode mode);

struct StepOutcome {
    std::vector<TraceEvent> events;
    bool reached_target = false;
};

/// Advances the linear-cost system by at most dt_max, never stepping across
/// an event: particle exits at x = +-1 and sign changes of Z_- - Z_+ at a
/// particle are located by bisection in time (tolerance 1e-12) and processed
/// at their instant. zeta is refreshed after every accepted step.
StepOutcome step(ParticleState& s, const VelocityModel& velocity, double alpha, double dt_max);

struct DpaTrajectory {
    SolutionTrace trace;
    std::vector<std::vector<double>> particle_snapshots; // aligned with trace.snapshots
    double m = 0.0;
    std::optional<double> t_mic;
    double datum_balance_root = 0.0; // balance root of the scenario datum
    double zeta0 = 0.0;              // the scheme's own turning point at t = 0
};

/// Event-driven integration up to min(horizon, evacuation time). The turning
/// operator follows the scenario: particle balance for linear cost, density
/// balance with the zeroed turning gap otherwise, or the memory/relaxation
/// operators when selected explicitly.
DpaTrajectory run(const Scenario& scenario, int n);

struct SweepEntry {
    double alpha = 0.0;
    std::optional<double> t_mic;
    std::string error; // nonempty when the run failed
};

/// Independent linear-cost runs per alpha; failures are recorded and the
/// sweep continues. Output sorted by alpha.
std::vector<SweepEntry> sweep_alpha(const Scenario& scenario, const std::vector<double>& alphas,
                                    int n);

} // namespace hughes::dpa

#endif
