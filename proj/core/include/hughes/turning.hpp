#ifndef HUGHES_TURNING_HPP
#define HUGHES_TURNING_HPP

#include <span>
#include <vector>

#include "hughes/density.hpp"
#include "hughes/model.hpp"

namespace hughes::turning {

/// The map xi -> integral_{-1}^{xi} c - integral_{xi}^{1} c as a piecewise
/// linear function. Node values are built as differences of two directional
/// cumulative sums, so mirrored inputs produce exactly negated node values and
/// the root of a reflected input is the exact negation of the original root.
/// Strictly increasing with slope 2 c(rho(xi)) >= 2.
class BalanceFunction {
public:
    static BalanceFunction from_density(const PiecewiseConstantDensity& rho, const CostModel& cost);
    /// Linear-cost particle balance Z_- - Z_+. Masses between consecutive
    /// particles are exactly m, so node values use integer mass counts.
    static BalanceFunction from_particles(std::span<const double> positions, double m, double alpha);

    const std::vector<double>& nodes() const { return nodes_; }
    const std::vector<double>& node_values() const { return values_; }

    double eval(double x) const;
    /// The unique root in (-1, 1), solved exactly on the sign-change piece.
    double root() const;

private:
    std::vector<double> nodes_;  // includes -1 and 1
    std::vector<double> values_; // same length
};

/// Root of the cost-weighted balance for a density on (-1, 1).
double balance_xi(const PiecewiseConstantDensity& rho, const CostModel& cost);

/// Turning point of the linear-cost particle system: root of Z_- - Z_+.
/// Particles outside [-1, 1] contribute nothing.
double particle_zeta(std::span<const double> positions, double m, double alpha);

/// Balance root of the exponentially weighted subjective density
/// delta * int_{-inf}^t rho(s,.) e^{-delta (t-s)} ds. Snapshots are held
/// constant on their interval; times before the first snapshot use it.
double memory_xi(std::span<const DensitySnapshot> history, double delta,
                 const CostModel& cost, double t);

/// Builds the subjective density itself (used by the DPA memory operator).
PiecewiseConstantDensity subjective_density(std::span<const DensitySnapshot> history,
                                            double delta, double t);

/// One explicit Euler step of eps * xi' = int_{-1}^{xi} c - int_{xi}^{1} c
/// with the sign fixed so that xi moves toward the balance root.
/// Requires dt <= eps.
double relaxation_xi_step(double xi, const PiecewiseConstantDensity& rho, double eps,
                          const CostModel& cost, double dt);

struct TurningPath {
    std::vector<double> times;
    std::vector<double> xi;
    std::vector<double> jump_times; // samples straddling these are excluded
};

/// Max |d xi / dt| over consecutive sample pairs, skipping pairs that
/// straddle a flagged jump time. Needs at least two samples.
double discrete_lipschitz(const TurningPath& path);

} // namespace hughes::turning

#endif
