#ifndef HUGHES_VERIFY_HPP
#define HUGHES_VERIFY_HPP

#include <string>
#include <vector>

#include "hughes/model.hpp"
#include "hughes/scenario.hpp"
#include "hughes/trace.hpp"

namespace hughes::verify {

/// Max |mass(t) - mass(0)| on the whole line over the snapshots.
double check_conservation(const SolutionTrace& trace);

/// Max over snapshots of (sup rho(t) - sup rho0); <= 0 means the maximum
/// principle held.
double check_max_principle(const SolutionTrace& trace, const PiecewiseConstantDensity& rho0);

/// Max |f(r) + f(l) - xi'(r - l)| over turning samples with distinct traces,
/// xi' by central differences away from event-flagged samples. Needs at
/// least three samples.
double check_rh_turning(const SolutionTrace& trace, const FluxModel& flux);

/// Nonnegative piecewise-bilinear test function on a tensor grid,
/// compactly supported (zero boundary rows and columns).
struct TestFunction {
    std::vector<double> times;
    std::vector<double> positions;
    std::vector<std::vector<double>> values; // values[p][q] at (times[p], positions[q])

    static TestFunction hat(double t_center, double x_center, double t_halfwidth,
                            double x_halfwidth);
    void validate() const;
    double eval(double t, double x) const;
};

/// Kruzhkov-type residual of the trace against constant k: the space-time
/// pairing of |rho - k| and the signed flux difference with the test
/// function's derivatives, plus the turning-curve line term
/// 2 int f(k) phi(t, xi(t)) dt. Entropy solutions give >= 0 up to the
/// discretization slack of the line integral.
double entropy_residual(const SolutionTrace& trace, const FluxModel& flux, double k,
                        const TestFunction& phi);

/// Existence-theorem hypotheses evaluated exactly on the initial datum.
struct HypothesisReport {
    bool symmetric = false;
    bool small_bv_traces = false;    // 3 sup + TV(c(rho)) + boundary trace terms < 2
    bool traces_defined = true;      // false when the cost blows up on the datum
    bool small_bv_no_traces = false; // (v_max/2)(L TV + 3C) < v(sup)
    bool class_v = false;            // L1 < 2/alpha with support outside the core
    bool class_v_applicable = false; // linear cost only
    double constant_c = 0.0;         // max c'(rho) rho on [0, sup]
    double constant_l = 0.0;         // max c''(rho) rho on [0, sup]
    double tv_datum = 0.0;           // interior variation on (-1, 1)
    double tv_cost_datum = 0.0;
    double sup_datum = 0.0;
    double l1_datum = 0.0;
    std::string summary() const;
};

HypothesisReport classify_hypotheses(const Scenario& scenario);

/// Exact L1 distance on (-1, 1) of the snapshots nearest to t.
double compare_traces(const SolutionTrace& a, const SolutionTrace& b, double t);

struct ConvergenceRow {
    int level_coarse = 0;
    int level_fine = 0;
    double l1 = 0.0;
    std::string error;
};

std::vector<ConvergenceRow> convergence_study(const Scenario& scenario, Scheme scheme,
                                              const std::vector<int>& levels, double t);

} // namespace hughes::verify

#endif
