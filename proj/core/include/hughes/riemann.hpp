#ifndef HUGHES_RIEMANN_HPP
#define HUGHES_RIEMANN_HPP

#include <optional>
#include <vector>

#include "hughes/model.hpp"

namespace hughes::riemann {

/// Flux orientation relative to the turning point: left of it mass moves with
/// -f, right of it with +f.
enum class Direction { leftward_flux, rightward_flux };

enum class WaveKind { shock, rarefaction, contact_vacuum };

struct Wave {
    WaveKind kind = WaveKind::shock;
    double left = 0.0;
    double right = 0.0;
    double speed_lo = 0.0; // shock: speed_lo == speed_hi
    double speed_hi = 0.0;
};

struct WaveFan {
    std::vector<Wave> waves; // speeds nondecreasing left to right
};

struct RiemannDatum {
    double rho_l = 0.0;
    double rho_r = 0.0;
};

/// Lax solution of rho_t +- f(rho)_x = 0 for strictly concave f.
/// With +f a jump is a shock iff rho_l < rho_r; mirrored for -f.
WaveFan lwr_riemann(const FluxModel& flux, double rho_l, double rho_r, Direction dir);

/// Initial turning point of the two-block datum: -(c_L - c_R)/(2 c_L) for
/// rho_l >= rho_r, mirrored otherwise. Always in (-1/2, 1/2).
double initial_turning_point(const RiemannDatum& datum, const CostModel& cost);

enum class VacuumClass { vacuum_or_equal_traces, discontinuous_traces };

/// The three equal-trace conditions, checked after mirroring to rho_l >= rho_r.
/// Cost integrals int (c - c(s)) use the closed form for linear cost and
/// adaptive quadrature otherwise.
VacuumClass classify_vacuum(const RiemannDatum& datum, const CostModel& cost,
                            const FluxModel& flux);

enum class TurningClass {
    vacuum,              // equal zero traces, two shocks flanking the curve
    congested,           // equal traces at rho_max
    non_classical_left,  // xi' < 0, traces (local left state, rho_M)
    non_classical_right, // xi' > 0, traces (rho_M, local right state)
};

struct TurningSolution {
    TurningClass classification = TurningClass::vacuum;
    double trace_left = 0.0;  // rho(xi-)
    double trace_right = 0.0; // rho(xi+)
    double xi0 = 0.0;
    double xi_dot = 0.0;
    std::optional<double> rho_m;
    WaveFan left_waves;  // waves issued left of the turning curve
    WaveFan right_waves; // waves issued right of it

    /// |f(r) + f(l) - xi'(r - l)| (zero by convention for equal traces).
    double rh_residual(const FluxModel& flux) const;
};

/// Local solution at the turning point of the two-block problem. Traces and
/// xi' are coupled through the Rankine-Hugoniot relation and the
/// time-differentiated integral balance; the non-classical branches locate
/// rho_M by bracketed bisection to 1e-12.
TurningSolution solve_turning_riemann(const RiemannDatum& datum, const CostModel& cost,
                                      const FluxModel& flux);

enum class PsiStarCase {
    non_classical_then_shock, // Psi* <= -2 v(rho_l)
    vacuum_between_shocks,    // |Psi*| < 2 v(rho_l)
    shock_then_non_classical, // Psi* >= 2 v(rho_l)
};

PsiStarCase psi_star_classify(double psi_star, double rho_l, const VelocityModel& velocity);

/// d/dt of int c(rho(t, .)) over a region covered by a self-similar wave
/// group, with wave speeds clipped to (window_lo, window_hi). Used by the
/// balance-derivative computations; exposed for tests.
double group_cost_rate(const WaveFan& fan, Direction dir, double window_lo, double window_hi,
                       const CostModel& cost, const FluxModel& flux);

} // namespace hughes::riemann

#endif
