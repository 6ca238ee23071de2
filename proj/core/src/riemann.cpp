#include "hughes/riemann.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "hughes/errors.hpp"

namespace hughes::riemann {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double simpson(double a, double b, double fa, double fm, double fb) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive_simpson_rec(const std::function<double(double)>& g, double a, double b, double fa,
                            double fm, double fb, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = g(lm), frm = g(rm);
    const double left = simpson(a, m, fa, flm, fm);
    const double right = simpson(m, b, fm, frm, fb);
    if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return adaptive_simpson_rec(g, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson_rec(g, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

double adaptive_simpson(const std::function<double(double)>& g, double a, double b, double tol) {
    if (a == b) return 0.0;
    const double fa = g(a), fb = g(b), fm = g(0.5 * (a + b));
    const double whole = simpson(a, b, fa, fm, fb);
    return adaptive_simpson_rec(g, a, b, fa, fm, fb, whole, tol, 40);
}

double char_speed(const FluxModel& flux, double rho, Direction dir) {
    return dir == Direction::rightward_flux ? flux.df(rho) : -flux.df(rho);
}

double chord_speed(const FluxModel& flux, double l, double r, Direction dir) {
    const double chord = (flux.f(r) - flux.f(l)) / (r - l);
    return dir == Direction::rightward_flux ? chord : -chord;
}

} // namespace

WaveFan lwr_riemann(const FluxModel& flux, double rho_l, double rho_r, Direction dir) {
    flux.require_concave();
    const double rho_max = flux.rho_max();
    if (!(rho_l >= 0.0 && rho_l <= rho_max) || !(rho_r >= 0.0 && rho_r <= rho_max))
        throw std::domain_error("lwr_riemann: states outside [0, rho_max]");
    WaveFan fan;
    if (rho_l == rho_r) return fan;
    const bool shock = (dir == Direction::rightward_flux) ? (rho_l < rho_r) : (rho_l > rho_r);
    Wave w;
    w.left = rho_l;
    w.right = rho_r;
    if (shock) {
        w.kind = WaveKind::shock;
        w.speed_lo = w.speed_hi = chord_speed(flux, rho_l, rho_r, dir);
    } else {
        w.kind = WaveKind::rarefaction;
        w.speed_lo = char_speed(flux, rho_l, dir);
        w.speed_hi = char_speed(flux, rho_r, dir);
    }
    fan.waves.push_back(w);
    return fan;
}

double initial_turning_point(const RiemannDatum& datum, const CostModel& cost) {
    const double cl = cost.c(datum.rho_l);
    const double cr = cost.c(datum.rho_r);
    if (cl >= cr) return -(cl - cr) / (2.0 * cl);
    return (cr - cl) / (2.0 * cr);
}

namespace {

// int_s^{rho_hat} (c(rho) - c(s)) d rho; closed form for linear cost
double trace_condition_integral(const CostModel& cost, double s, double rho_hat) {
    if (cost.kind() == CostModel::Kind::linear)
        return cost.alpha() * (rho_hat - s) * (rho_hat - s) / 2.0;
    const double cs = cost.c(s);
    return adaptive_simpson([&](double rho) { return cost.c(rho) - cs; }, s, rho_hat, 1e-10);
}

} // namespace

VacuumClass classify_vacuum(const RiemannDatum& datum, const CostModel& cost,
                            const FluxModel& flux) {
    double rho_l = datum.rho_l, rho_r = datum.rho_r;
    if (rho_l < rho_r) std::swap(rho_l, rho_r); // mirror symmetry
    const double rho_hat = flux.rho_hat();
    const double rho_max = flux.rho_max();
    if (rho_r > rho_hat) return VacuumClass::vacuum_or_equal_traces;
    if (rho_l <= rho_hat) {
        const double gap = trace_condition_integral(cost, rho_r, rho_hat) -
                           trace_condition_integral(cost, rho_l, rho_hat);
        if (rho_r - rho_max < gap && gap < rho_max - rho_l)
            return VacuumClass::vacuum_or_equal_traces;
        return VacuumClass::discontinuous_traces;
    }
    // rho_r <= rho_hat < rho_l
    if (trace_condition_integral(cost, rho_r, rho_hat) < rho_max - rho_l)
        return VacuumClass::vacuum_or_equal_traces;
    return VacuumClass::discontinuous_traces;
}

double group_cost_rate(const WaveFan& fan, Direction dir, double window_lo, double window_hi,
                       const CostModel& cost, const FluxModel& flux) {
    const double side = dir == Direction::rightward_flux ? 1.0 : -1.0;
    double rate = 0.0;
    for (const Wave& w : fan.waves) {
        if (w.kind == WaveKind::shock || w.kind == WaveKind::contact_vacuum) {
            if (w.speed_lo > window_lo && w.speed_lo < window_hi)
                rate += w.speed_lo * (cost.c(w.left) - cost.c(w.right));
            continue;
        }
        // rarefaction: clip [speed_lo, speed_hi] to the window; a clip at
        // speed zero lands on the critical density
        double s_lo = w.speed_lo, s_hi = w.speed_hi;
        double u_lo = w.left, u_hi = w.right;
        if (s_hi <= window_lo || s_lo >= window_hi) continue;
        if (s_lo < window_lo) {
            s_lo = window_lo;
            u_lo = (window_lo == 0.0) ? flux.rho_hat() : u_lo;
        }
        if (s_hi > window_hi) {
            s_hi = window_hi;
            u_hi = (window_hi == 0.0) ? flux.rho_hat() : u_hi;
        }
        rate += cost.c(u_lo) * s_lo - cost.c(u_hi) * s_hi;
        rate += adaptive_simpson(
            [&](double rho) { return cost.c(rho) * side * flux.ddf(rho); }, u_lo, u_hi, 1e-12);
    }
    return rate;
}

double TurningSolution::rh_residual(const FluxModel& flux) const {
    if (trace_left == trace_right) return 0.0;
    return std::abs(flux.f(trace_right) + flux.f(trace_left) -
                    xi_dot * (trace_right - trace_left));
}

namespace {

struct FarField {
    WaveFan g1;      // at x = -1, leftward flux, window (0, inf)
    WaveFan g3;      // at x = 0 (only when xi0 < 0), rightward flux
    WaveFan g4;      // at x = 1, rightward flux, window (-inf, 0)
    bool has_g3 = false;

    double rate_left(const CostModel& cost, const FluxModel& flux) const {
        return group_cost_rate(g1, Direction::leftward_flux, 0.0, kInf, cost, flux);
    }
    double rate_right(const CostModel& cost, const FluxModel& flux) const {
        double r = group_cost_rate(g4, Direction::rightward_flux, -kInf, 0.0, cost, flux);
        if (has_g3) r += group_cost_rate(g3, Direction::rightward_flux, -kInf, kInf, cost, flux);
        return r;
    }
};

TurningSolution mirrored(TurningSolution s) {
    std::swap(s.trace_left, s.trace_right);
    s.xi0 = -s.xi0;
    s.xi_dot = -s.xi_dot;
    std::swap(s.left_waves, s.right_waves);
    auto flip = [](WaveFan& fan) {
        std::reverse(fan.waves.begin(), fan.waves.end());
        for (Wave& w : fan.waves) {
            std::swap(w.left, w.right);
            const double lo = -w.speed_hi, hi = -w.speed_lo;
            w.speed_lo = lo;
            w.speed_hi = hi;
        }
    };
    flip(s.left_waves);
    flip(s.right_waves);
    if (s.classification == TurningClass::non_classical_left)
        s.classification = TurningClass::non_classical_right;
    else if (s.classification == TurningClass::non_classical_right)
        s.classification = TurningClass::non_classical_left;
    return s;
}

} // namespace

TurningSolution solve_turning_riemann(const RiemannDatum& datum, const CostModel& cost,
                                      const FluxModel& flux) {
    flux.require_concave();
    const double rho_max = flux.rho_max();
    if (!(datum.rho_l >= 0.0 && datum.rho_l <= rho_max) ||
        !(datum.rho_r >= 0.0 && datum.rho_r <= rho_max))
        throw std::domain_error("turning riemann: states outside [0, rho_max]");
    if (datum.rho_l < datum.rho_r)
        return mirrored(solve_turning_riemann({datum.rho_r, datum.rho_l}, cost, flux));

    const double rho_l = datum.rho_l, rho_r = datum.rho_r;
    const double xi0 = initial_turning_point(datum, cost);

    // local states at the turning point: the datum jump at x = 0 coincides
    // with xi0 only when the costs match (then the right local state is rho_r)
    const double a = rho_l;
    const double b = (xi0 == 0.0) ? rho_r : rho_l;

    FarField far;
    far.g1 = lwr_riemann(flux, 0.0, rho_l, Direction::leftward_flux);
    if (xi0 < 0.0) {
        far.g3 = lwr_riemann(flux, rho_l, rho_r, Direction::rightward_flux);
        far.has_g3 = true;
    }
    far.g4 = lwr_riemann(flux, rho_r, 0.0, Direction::rightward_flux);
    const double d_left_far = far.rate_left(cost, flux);
    const double d_right_far = far.rate_right(cost, flux);

    TurningSolution sol;
    sol.xi0 = xi0;

    // equal-trace candidate: vacuum unless the left state is congested
    const double u = (rho_l == rho_max) ? rho_max : 0.0;
    WaveFan left_flank = lwr_riemann(flux, a, u, Direction::leftward_flux);
    WaveFan right_flank = lwr_riemann(flux, u, b, Direction::rightward_flux);
    const double d_left_eq =
        d_left_far + group_cost_rate(left_flank, Direction::leftward_flux, -kInf, kInf, cost, flux);
    const double d_right_eq =
        d_right_far +
        group_cost_rate(right_flank, Direction::rightward_flux, -kInf, kInf, cost, flux);
    const double xi_dot_eq = (d_right_eq - d_left_eq) / (2.0 * cost.c(u));

    double window_lo, window_hi;
    if (u == rho_max) {
        window_lo = flux.df(rho_max);
        window_hi = -flux.df(rho_max);
    } else {
        window_lo = -flux.velocity().v(a);
        window_hi = flux.velocity().v(b);
    }

    const double slack = 1e-12;
    if (xi_dot_eq >= window_lo - slack && xi_dot_eq <= window_hi + slack) {
        sol.classification = (u == rho_max) ? TurningClass::congested : TurningClass::vacuum;
        sol.trace_left = sol.trace_right = u;
        sol.xi_dot = xi_dot_eq;
        sol.left_waves = left_flank;
        sol.right_waves = right_flank;
        return sol;
    }

    // non-classical branch: rho_M solves RH speed == balance speed
    const bool leftward = xi_dot_eq < window_lo; // turning curve sweeps left
    auto residual = [&](double rho_m) {
        if (leftward) {
            const double xi_rh = (flux.f(a) + flux.f(rho_m)) / (rho_m - a);
            WaveFan conn = lwr_riemann(flux, rho_m, b, Direction::rightward_flux);
            const double d_r =
                d_right_far +
                group_cost_rate(conn, Direction::rightward_flux, -kInf, kInf, cost, flux);
            const double xi_bal = (d_r - d_left_far) / (cost.c(a) + cost.c(rho_m));
            return xi_rh - xi_bal;
        }
        const double xi_rh = (flux.f(rho_m) + flux.f(b)) / (b - rho_m);
        WaveFan conn = lwr_riemann(flux, a, rho_m, Direction::leftward_flux);
        const double d_l =
            d_left_far + group_cost_rate(conn, Direction::leftward_flux, -kInf, kInf, cost, flux);
        const double xi_bal = (d_right_far - d_l) / (cost.c(rho_m) + cost.c(b));
        return xi_rh - xi_bal;
    };

    const double cap = leftward ? a : b; // rho_m in [0, cap)
    const int scan = 256;
    double lo = 0.0;
    double r_lo = residual(lo);
    double hi = std::numeric_limits<double>::quiet_NaN();
    std::vector<std::pair<double, double>> samples{{lo, r_lo}};
    for (int i = 1; i <= scan; ++i) {
        const double x = cap * (static_cast<double>(i) / (scan + 1));
        const double rx = residual(x);
        samples.emplace_back(x, rx);
        if ((r_lo <= 0.0 && rx >= 0.0) || (r_lo >= 0.0 && rx <= 0.0)) {
            hi = x;
            break;
        }
        lo = x;
        r_lo = rx;
    }
    if (!(hi == hi)) {
        std::ostringstream os;
        os << "turning riemann: no bracket for rho_M (datum " << rho_l << ", " << rho_r
           << ", sweeping " << (leftward ? "left" : "right") << ")";
        throw bracket_error(os.str(), samples);
    }
    for (int it = 0; it < 200 && hi - lo > 1e-12; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double rm = residual(mid);
        if ((r_lo <= 0.0) == (rm <= 0.0)) {
            lo = mid;
            r_lo = rm;
        } else {
            hi = mid;
        }
    }
    const double rho_m = 0.5 * (lo + hi);
    sol.rho_m = rho_m;
    if (leftward) {
        sol.classification = TurningClass::non_classical_left;
        sol.trace_left = a;
        sol.trace_right = rho_m;
        sol.xi_dot = (flux.f(a) + flux.f(rho_m)) / (rho_m - a);
        sol.right_waves = lwr_riemann(flux, rho_m, b, Direction::rightward_flux);
    } else {
        sol.classification = TurningClass::non_classical_right;
        sol.trace_left = rho_m;
        sol.trace_right = b;
        sol.xi_dot = (flux.f(rho_m) + flux.f(b)) / (b - rho_m);
        sol.left_waves = lwr_riemann(flux, a, rho_m, Direction::leftward_flux);
    }

    // characteristic admissibility: speeds enter the curve on the denser side
    const double tol = 1e-9;
    if (sol.trace_left > sol.trace_right && !(-flux.df(sol.trace_left) >= sol.xi_dot - tol))
        throw invariant_error("turning riemann: left-trace admissibility failed");
    if (sol.trace_left < sol.trace_right && !(flux.df(sol.trace_right) <= sol.xi_dot + tol))
        throw invariant_error("turning riemann: right-trace admissibility failed");
    return sol;
}

PsiStarCase psi_star_classify(double psi_star, double rho_l, const VelocityModel& velocity) {
    if (!(rho_l >= 0.0 && rho_l < velocity.rho_max()))
        throw std::domain_error("psi_star_classify: rho_l must lie in [0, rho_max)");
    const double threshold = 2.0 * velocity.v(rho_l);
    if (psi_star <= -threshold) return PsiStarCase::non_classical_then_shock;
    if (psi_star >= threshold) return PsiStarCase::shock_then_non_classical;
    return PsiStarCase::vacuum_between_shocks;
}

} // namespace hughes::riemann
