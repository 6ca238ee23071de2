#ifndef HUGHES_DENSITY_HPP
#define HUGHES_DENSITY_HPP

#include <array>
#include <cstddef>
#include <vector>

namespace hughes {

/// Piecewise constant function on the real line: `values[k]` on
/// [breakpoints[k], breakpoints[k+1]), implicitly zero outside
/// [breakpoints.front(), breakpoints.back()). Breakpoints are strictly
/// increasing; adjacent equal values are allowed and merged on demand.
class PiecewiseConstantDensity {
public:
    PiecewiseConstantDensity() = default;
    PiecewiseConstantDensity(std::vector<double> breakpoints, std::vector<double> values);

    static PiecewiseConstantDensity uniform(double left, double right, double value);
    /// Builds from (left, right, value) blocks; blocks must not overlap.
    static PiecewiseConstantDensity from_blocks(
        const std::vector<std::array<double, 3>>& blocks);

    bool empty() const { return values_.empty(); }
    std::size_t pieces() const { return values_.size(); }
    const std::vector<double>& breakpoints() const { return breakpoints_; }
    const std::vector<double>& values() const { return values_; }

    double value_at(double x) const;       // value on the piece containing x (right-continuous)
    double limit_from_left(double x) const;
    double limit_from_right(double x) const { return value_at(x); }

    double mass(double a, double b) const; // exact integral over [a, b]
    double total_mass() const;
    double sup_norm() const;
    /// Total variation counting only jumps strictly inside (a, b).
    double total_variation(double a, double b) const;
    /// Total variation on the whole line (support-edge jumps included).
    double total_variation() const;
    double support_min() const; // requires a piece with nonzero value
    double support_max() const;

    PiecewiseConstantDensity reflected() const;   // x -> -x
    PiecewiseConstantDensity canonicalized() const; // merge equal neighbours, drop zero edges
    bool reflection_symmetric() const;            // exact equality with the reflection

private:
    std::vector<double> breakpoints_; // size K+1 for K pieces, or empty
    std::vector<double> values_;      // size K
};

/// Exact L1 distance of two piecewise constant functions restricted to [a, b].
double l1_distance(const PiecewiseConstantDensity& f, const PiecewiseConstantDensity& g,
                   double a, double b);

/// Pointwise convex combination sum_k w[k]*f[k] on the merged breakpoint set.
PiecewiseConstantDensity combine(const std::vector<const PiecewiseConstantDensity*>& fs,
                                 const std::vector<double>& weights);

struct DensitySnapshot {
    double t = 0.0;
    PiecewiseConstantDensity rho;
};

} // namespace hughes

#endif
