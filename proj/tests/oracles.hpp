#ifndef HUGHES_TEST_ORACLES_HPP
#define HUGHES_TEST_ORACLES_HPP

// Independent reference computations used to freeze expected values. These
// deliberately avoid the code paths they check: roots come from plain
// bisection, particle paths from a standalone integrator, and front tracking
// from a minimal single-flux implementation.

#include <functional>
#include <vector>

#include "hughes/density.hpp"
#include "hughes/model.hpp"

namespace oracles {

/// Balance root by bisection on the cost-weighted integrals (tolerance 1e-12).
double balance_root_bisection(const hughes::PiecewiseConstantDensity& rho,
                              const hughes::CostModel& cost);

/// argmax of f over a uniform sample grid.
double flux_argmax_grid(const hughes::VelocityModel& velocity, std::size_t samples = 1000000);

/// Standalone one-directional follow-the-leader integration (RK4, fixed
/// step). direction +1: each particle chases the gap ahead; -1: behind.
/// Returns positions at the requested sample times.
std::vector<std::vector<double>> ftl_trajectories(std::vector<double> x0, double m,
                                                  const hughes::VelocityModel& velocity,
                                                  int direction, double dt,
                                                  const std::vector<double>& sample_times);

/// Minimal classical wave-front tracking for rho_t + f(rho)_x = 0 with
/// grid-valued piecewise constant data; rarefactions split into eps-fronts
/// moving at chord speeds. Returns the profile at time t_end.
hughes::PiecewiseConstantDensity classical_wft(const hughes::PiecewiseConstantDensity& datum,
                                               const hughes::FluxModel& flux, int n,
                                               double t_end);

/// Adaptive Simpson quadrature (for cross-checking closed forms).
double quad(const std::function<double(double)>& g, double a, double b, double tol = 1e-12);

} // namespace oracles

#endif
