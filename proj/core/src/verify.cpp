#include "hughes/verify.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <sstream>
#include <stdexcept>

#include "hughes/dpa.hpp"
#include "hughes/wft.hpp"

namespace hughes::verify {

double check_conservation(const SolutionTrace& trace) {
    if (trace.snapshots.empty()) throw std::invalid_argument("conservation: empty trace");
    const double m0 = trace.snapshots.front().rho.total_mass();
    double worst = 0.0;
    for (const DensitySnapshot& s : trace.snapshots)
        worst = std::max(worst, std::abs(s.rho.total_mass() - m0));
    return worst;
}

double check_max_principle(const SolutionTrace& trace, const PiecewiseConstantDensity& rho0) {
    if (trace.snapshots.empty()) throw std::invalid_argument("max principle: empty trace");
    const double sup0 = rho0.sup_norm();
    double worst = -sup0;
    for (const DensitySnapshot& s : trace.snapshots)
        worst = std::max(worst, s.rho.sup_norm() - sup0);
    return worst;
}

double check_rh_turning(const SolutionTrace& trace, const FluxModel& flux) {
    const auto& ts = trace.turning;
    if (ts.size() < 3)
        throw std::invalid_argument("rh check: need at least three turning samples");
    double worst = 0.0;
    for (std::size_t i = 1; i + 1 < ts.size(); ++i) {
        if (ts[i].at_event || ts[i - 1].at_event || ts[i + 1].at_event) continue;
        const double l = ts[i].trace_left, r = ts[i].trace_right;
        if (l == r) continue; // Rankine-Hugoniot is vacuous for equal traces
        const double dt = ts[i + 1].t - ts[i - 1].t;
        if (!(dt > 0.0)) continue;
        const double xi_dot = (ts[i + 1].xi - ts[i - 1].xi) / dt;
        worst = std::max(worst, std::abs(flux.f(r) + flux.f(l) - xi_dot * (r - l)));
    }
    return worst;
}

TestFunction TestFunction::hat(double t_center, double x_center, double t_halfwidth,
                               double x_halfwidth) {
    TestFunction phi;
    phi.times = {t_center - t_halfwidth, t_center, t_center + t_halfwidth};
    phi.positions = {x_center - x_halfwidth, x_center, x_center + x_halfwidth};
    phi.values = {{0.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {0.0, 0.0, 0.0}};
    return phi;
}

void TestFunction::validate() const {
    if (times.size() < 2 || positions.size() < 2 || values.size() != times.size())
        throw std::invalid_argument("test function: inconsistent grid");
    for (const auto& row : values) {
        if (row.size() != positions.size())
            throw std::invalid_argument("test function: inconsistent row width");
        for (double v : row)
            if (!(v >= 0.0)) throw std::invalid_argument("test function must be nonnegative");
    }
    for (std::size_t q = 0; q < positions.size(); ++q)
        if (values.front()[q] != 0.0 || values.back()[q] != 0.0)
            throw std::invalid_argument("test function: first/last time rows must vanish");
    for (std::size_t p = 0; p < times.size(); ++p)
        if (values[p].front() != 0.0 || values[p].back() != 0.0)
            throw std::invalid_argument("test function: boundary columns must vanish");
}

double TestFunction::eval(double t, double x) const {
    if (t <= times.front() || t >= times.back()) return 0.0;
    if (x <= positions.front() || x >= positions.back()) return 0.0;
    const auto it = std::upper_bound(times.begin(), times.end(), t);
    const std::size_t p = static_cast<std::size_t>(it - times.begin()) - 1;
    const auto ix = std::upper_bound(positions.begin(), positions.end(), x);
    const std::size_t q = static_cast<std::size_t>(ix - positions.begin()) - 1;
    const double u = (t - times[p]) / (times[p + 1] - times[p]);
    const double w = (x - positions[q]) / (positions[q + 1] - positions[q]);
    return (1.0 - u) * (1.0 - w) * values[p][q] + (1.0 - u) * w * values[p][q + 1] +
           u * (1.0 - w) * values[p + 1][q] + u * w * values[p + 1][q + 1];
}

namespace {

double xi_at(const SolutionTrace& trace, double t) {
    const auto& ts = trace.turning;
    if (ts.empty()) return 0.0;
    if (t <= ts.front().t) return ts.front().xi;
    if (t >= ts.back().t) return ts.back().xi;
    for (std::size_t i = 0; i + 1 < ts.size(); ++i) {
        if (t >= ts[i].t && t <= ts[i + 1].t) {
            const double dt = ts[i + 1].t - ts[i].t;
            if (!(dt > 0.0)) return ts[i].xi;
            const double u = (t - ts[i].t) / dt;
            return ts[i].xi + u * (ts[i + 1].xi - ts[i].xi);
        }
    }
    return ts.back().xi;
}

const PiecewiseConstantDensity& snapshot_on(const SolutionTrace& trace, double t) {
    // snapshot profiles are held constant on [t_j, t_{j+1})
    const auto& ss = trace.snapshots;
    std::size_t best = 0;
    for (std::size_t j = 0; j < ss.size(); ++j) {
        if (ss[j].t <= t + 1e-12) best = j;
        else break;
    }
    return ss[best].rho;
}

} // namespace

double entropy_residual(const SolutionTrace& trace, const FluxModel& flux, double k,
                        const TestFunction& phi) {
    phi.validate();
    if (!(k >= 0.0 && k <= flux.rho_max()))
        throw std::invalid_argument("entropy residual: k outside [0, rho_max]");
    if (trace.snapshots.empty()) throw std::invalid_argument("entropy residual: empty trace");

    // merged time partition: phi rows and snapshot instants
    std::vector<double> cut_times = phi.times;
    for (const DensitySnapshot& s : trace.snapshots)
        if (s.t > phi.times.front() && s.t < phi.times.back()) cut_times.push_back(s.t);
    std::sort(cut_times.begin(), cut_times.end());
    cut_times.erase(std::unique(cut_times.begin(), cut_times.end()), cut_times.end());

    const double fk = flux.f(k);
    double total = 0.0;

    for (std::size_t s = 0; s + 1 < cut_times.size(); ++s) {
        const double t0 = cut_times[s], t1 = cut_times[s + 1];
        const double dt = t1 - t0;
        if (!(dt > 0.0)) continue;
        const double t_mid = 0.5 * (t0 + t1);
        const PiecewiseConstantDensity& rho = snapshot_on(trace, t_mid);
        const double xi_mid = xi_at(trace, t_mid);

        // locate the phi row containing this slab
        const auto itp = std::upper_bound(phi.times.begin(), phi.times.end(), t_mid);
        if (itp == phi.times.begin() || itp == phi.times.end()) continue;
        const std::size_t p = static_cast<std::size_t>(itp - phi.times.begin()) - 1;
        const double row_dt = phi.times[p + 1] - phi.times[p];
        const double u_mid = (t_mid - phi.times[p]) / row_dt;

        for (std::size_t q = 0; q + 1 < phi.positions.size(); ++q) {
            const double xl = phi.positions[q], xr = phi.positions[q + 1];
            const double w = xr - xl;
            // phi_t is linear in x and constant in t inside the cell
            const double pt_l = (phi.values[p + 1][q] - phi.values[p][q]) / row_dt;
            const double pt_r = (phi.values[p + 1][q + 1] - phi.values[p][q + 1]) / row_dt;
            // phi_x is constant in x; use its exact time average over the slab
            const double px =
                ((1.0 - u_mid) * (phi.values[p][q + 1] - phi.values[p][q]) +
                 u_mid * (phi.values[p + 1][q + 1] - phi.values[p + 1][q])) /
                w;

            // x-cuts: cell borders, density breakpoints, the turning point
            std::vector<double> xs{xl, xr};
            for (double b : rho.breakpoints())
                if (b > xl && b < xr) xs.push_back(b);
            if (xi_mid > xl && xi_mid < xr) xs.push_back(xi_mid);
            std::sort(xs.begin(), xs.end());
            for (std::size_t j = 0; j + 1 < xs.size(); ++j) {
                const double a = xs[j], b = xs[j + 1];
                const double mid = 0.5 * (a + b);
                const double r = rho.value_at(mid);
                const double diff = std::abs(r - k);
                // trapezoid is exact: |rho-k| constant, phi_t linear
                const double pt_a = pt_l + (pt_r - pt_l) * (a - xl) / w;
                const double pt_b = pt_l + (pt_r - pt_l) * (b - xl) / w;
                total += dt * diff * 0.5 * (pt_a + pt_b) * (b - a);
                const double sgn_flux = (mid < xi_mid ? -1.0 : 1.0);
                const double calF =
                    (r > k ? 1.0 : (r < k ? -1.0 : 0.0)) * sgn_flux * (flux.f(r) - fk);
                total += dt * calF * px * (b - a);
            }
        }

        // turning line term by the trapezoid rule on the slab ends
        const double phi0 = phi.eval(t0, xi_at(trace, t0));
        const double phi1 = phi.eval(t1, xi_at(trace, t1));
        total += 2.0 * fk * 0.5 * (phi0 + phi1) * dt;
    }
    return total;
}

std::string HypothesisReport::summary() const {
    std::ostringstream os;
    os << "symmetric=" << (symmetric ? 1 : 0)
       << " small_bv_traces=" << (traces_defined ? (small_bv_traces ? "1" : "0") : "undefined")
       << " small_bv_no_traces=" << (small_bv_no_traces ? 1 : 0)
       << " class_v=" << (class_v_applicable ? (class_v ? "1" : "0") : "n/a") << " C=" << constant_c
       << " L=" << constant_l << " TV=" << tv_datum << " TVc=" << tv_cost_datum
       << " sup=" << sup_datum << " l1=" << l1_datum;
    return os.str();
}

namespace {

// max of g over [0, s]: exact endpoint for the built-in cost kinds whose
// integrand is monotone, sampled otherwise
double max_weighted(const CostModel& cost, double s, bool second_derivative) {
    auto g = [&](double rho) {
        return (second_derivative ? cost.ddc(rho) : cost.dc(rho)) * rho;
    };
    if (cost.kind() == CostModel::Kind::linear)
        return second_derivative ? 0.0 : cost.alpha() * s;
    if (cost.kind() == CostModel::Kind::reciprocal) return g(s);
    double best = 0.0;
    for (int i = 0; i <= 2048; ++i) best = std::max(best, g(s * i / 2048.0));
    return best;
}

} // namespace

HypothesisReport classify_hypotheses(const Scenario& scenario) {
    HypothesisReport rep;
    const PiecewiseConstantDensity& rho0 = scenario.initial;
    const CostModel& cost = scenario.cost;
    const VelocityModel& vel = scenario.velocity;
    const double rho_max = vel.rho_max();

    rep.symmetric = rho0.reflection_symmetric();
    rep.sup_datum = rho0.sup_norm();
    rep.l1_datum = rho0.total_mass();
    rep.tv_datum = rho0.total_variation(-1.0, 1.0);

    rep.traces_defined =
        !(cost.kind() == CostModel::Kind::reciprocal && rep.sup_datum >= rho_max);
    if (rep.traces_defined) {
        double tvc = 0.0;
        const auto& bp = rho0.breakpoints();
        const auto& vals = rho0.values();
        for (std::size_t j = 0; j < bp.size(); ++j) {
            if (!(bp[j] > -1.0 && bp[j] < 1.0)) continue;
            const double l = (j == 0) ? 0.0 : vals[j - 1];
            const double r = (j == vals.size()) ? 0.0 : vals[j];
            tvc += std::abs(cost.c(r) - cost.c(l));
        }
        rep.tv_cost_datum = tvc;
        const double rho_hat = critical_density(vel);
        const double c_hat = cost.c(rho_hat);
        const double trace_l = std::max(cost.c(rho0.value_at(-1.0)) - c_hat, 0.0);
        const double trace_r = std::max(cost.c(rho0.limit_from_left(1.0)) - c_hat, 0.0);
        rep.small_bv_traces = 3.0 * rep.sup_datum + tvc + trace_l + trace_r < 2.0;
    }

    if (rep.sup_datum < rho_max) {
        rep.constant_c = max_weighted(cost, rep.sup_datum, false);
        rep.constant_l = max_weighted(cost, rep.sup_datum, true);
        rep.small_bv_no_traces =
            vel.v_max() / 2.0 * (rep.constant_l * rep.tv_datum + 3.0 * rep.constant_c) <
            vel.v(rep.sup_datum);
    }

    if (cost.kind() == CostModel::Kind::linear) {
        rep.class_v_applicable = true;
        const double alpha = cost.alpha();
        const bool l1_ok = alpha == 0.0 || rep.l1_datum < 2.0 / alpha;
        const double r = alpha / 2.0 * rep.l1_datum;
        const bool support_ok = rho0.mass(-r, r) == 0.0;
        rep.class_v = l1_ok && support_ok;
    }
    return rep;
}

double compare_traces(const SolutionTrace& a, const SolutionTrace& b, double t) {
    if (a.snapshots.empty() || b.snapshots.empty())
        throw std::invalid_argument("compare_traces: empty trace");
    auto covers = [&](const SolutionTrace& tr) {
        return t >= tr.snapshots.front().t - 1e-9 && t <= tr.snapshots.back().t + 1e-9;
    };
    if (!covers(a) || !covers(b))
        throw std::invalid_argument("compare_traces: traces do not cover the requested time");
    const DensitySnapshot& sa = a.snapshot_nearest(t);
    const DensitySnapshot& sb = b.snapshot_nearest(t);
    return l1_distance(sa.rho, sb.rho, -1.0, 1.0);
}

std::vector<ConvergenceRow> convergence_study(const Scenario& scenario, Scheme scheme,
                                              const std::vector<int>& levels, double t) {
    if (levels.size() < 2)
        throw std::invalid_argument("convergence study: need at least two levels");
    std::vector<int> sorted = levels;
    std::sort(sorted.begin(), sorted.end());

    struct Level {
        SolutionTrace trace;
        std::string error;
    };
    std::vector<std::future<Level>> futures;
    for (int n : sorted) {
        futures.push_back(std::async(std::launch::async, [scenario, scheme, n]() {
            Level lvl;
            try {
                if (scheme == Scheme::dpa) lvl.trace = dpa::run(scenario, n).trace;
                else lvl.trace = wft::run(scenario, n).trace;
            } catch (const std::exception& e) {
                lvl.error = e.what();
            }
            return lvl;
        }));
    }
    std::vector<Level> runs;
    runs.reserve(futures.size());
    for (auto& f : futures) runs.push_back(f.get());

    std::vector<ConvergenceRow> rows;
    for (std::size_t i = 0; i + 1 < runs.size(); ++i) {
        ConvergenceRow row;
        row.level_coarse = sorted[i];
        row.level_fine = sorted[i + 1];
        if (!runs[i].error.empty()) row.error = runs[i].error;
        else if (!runs[i + 1].error.empty()) row.error = runs[i + 1].error;
        else row.l1 = compare_traces(runs[i].trace, runs[i + 1].trace, t);
        rows.push_back(row);
    }
    return rows;
}

} // namespace hughes::verify
