#include "hughes/wft.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "hughes/errors.hpp"
#include "hughes/turning.hpp"

namespace hughes::wft {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTieFuzz = 1e-13;
} // namespace

WftGrid make_grid(const FluxModel& flux, int n) {
    if (n < 1 || n > 24) throw std::invalid_argument("wft grid: n out of range");
    WftGrid g;
    g.n = n;
    g.eps = std::ldexp(1.0, -n);
    g.step = g.eps * flux.rho_max();
    const long count = 1L << n;
    g.values.resize(static_cast<std::size_t>(count) + 1);
    for (long i = 0; i <= count; ++i)
        g.values[static_cast<std::size_t>(i)] = static_cast<double>(i) * g.step;
    g.values.back() = flux.rho_max();
    return g;
}

double WftGrid::snap(double rho) const {
    const double q = rho / step;
    double k = std::floor(q);
    if (q - k > 0.5) k += 1.0; // ties stay down
    k = std::min(std::max(k, 0.0), static_cast<double>(values.size() - 1));
    return values[static_cast<std::size_t>(k)];
}

long WftGrid::index_of(double rho) const {
    const double q = rho / step;
    const long k = static_cast<long>(std::llround(q));
    if (k < 0 || k >= static_cast<long>(values.size())) return -1;
    if (std::abs(rho - values[static_cast<std::size_t>(k)]) > 1e-12 * (1.0 + std::abs(rho)))
        return -1;
    return k;
}

PiecewiseConstantDensity discretize_datum(const PiecewiseConstantDensity& rho,
                                          const WftGrid& grid) {
    if (rho.empty()) return {};
    std::vector<double> vals = rho.values();
    for (double& v : vals) v = grid.snap(v);
    return PiecewiseConstantDensity(rho.breakpoints(), std::move(vals)).canonicalized();
}

std::size_t FrontList::turning_index() const {
    for (std::size_t i = 0; i < fronts.size(); ++i)
        if (fronts[i].kind == FrontKind::turning) return i;
    throw invariant_error("front list lost its turning front");
}

PiecewiseConstantDensity FrontList::density() const {
    if (fronts.empty()) return {};
    double current = 0.0;
    for (const Front& f : fronts) {
        if (std::abs(f.left - current) > 1e-9)
            throw invariant_error("front list: adjacent states mismatch");
        current = f.right;
    }
    std::vector<double> bp{fronts.front().x};
    std::vector<double> vals;
    for (std::size_t i = 0; i + 1 < fronts.size(); ++i) {
        const double next_x = fronts[i + 1].x;
        if (next_x <= bp.back() + 1e-15) continue; // zero-width piece
        vals.push_back(fronts[i].right);
        bp.push_back(next_x);
    }
    if (vals.empty()) return {};
    return PiecewiseConstantDensity(std::move(bp), std::move(vals)).canonicalized();
}

double FrontList::total_variation() const {
    double tv = 0.0;
    for (const Front& f : fronts) tv += std::abs(f.right - f.left);
    return tv;
}

double front_speed(const FluxModel& flux, const CostModel& cost, double left, double right,
                   riemann::Direction side, WftSpeedMode mode) {
    if (left == right) throw std::invalid_argument("front_speed: states must differ");
    const double sign = side == riemann::Direction::rightward_flux ? 1.0 : -1.0;
    const bool shock =
        side == riemann::Direction::rightward_flux ? (left < right) : (left > right);
    if (shock || mode == WftSpeedMode::rankine_hugoniot)
        return sign * (flux.f(right) - flux.f(left)) / (right - left);
    if (cost.kind() != CostModel::Kind::reciprocal)
        throw std::invalid_argument(
            "entropy-flux rarefaction speeds are defined for the reciprocal cost only");
    auto q = [&](double rho) {
        const double c = cost.c(rho);
        return -c + 2.0 * std::log(c);
    };
    return sign * (q(right) - q(left)) / (cost.c(right) - cost.c(left));
}

double turning_speed(const FluxModel& flux, double trace_left, double trace_right) {
    if (trace_left == trace_right)
        throw std::invalid_argument("turning_speed: equal traces need the balance form");
    return (flux.f(trace_right) + flux.f(trace_left)) / (trace_right - trace_left);
}

namespace {

// a front influences the corridor balance when it is strictly inside or
// sitting on a wall about to move inward
bool balance_active(double x, double speed) {
    if (x > -1.0 && x < 1.0) return true;
    if (x == -1.0 && speed > 0.0) return true;
    if (x == 1.0 && speed < 0.0) return true;
    return false;
}

} // namespace

double balance_turning_speed(const FrontList& list, const CostModel& cost) {
    const std::size_t ti = list.turning_index();
    const Front& turning = list.fronts[ti];
    double sum_left = 0.0, sum_right = 0.0;
    for (std::size_t i = 0; i < list.fronts.size(); ++i) {
        if (i == ti) continue;
        const Front& f = list.fronts[i];
        if (!balance_active(f.x, f.speed)) continue;
        const double term = f.speed * (cost.c(f.left) - cost.c(f.right));
        if (i < ti) sum_left += term;
        else sum_right += term;
    }
    return (sum_right - sum_left) / (cost.c(turning.left) + cost.c(turning.right));
}

Simulator::Simulator(const VelocityModel& velocity, const CostModel& cost, int n,
                     WftSpeedMode mode)
    : velocity_(velocity), cost_(cost), flux_(FluxModel::from_velocity(velocity)),
      grid_(make_grid(flux_, n)), mode_(mode) {
    flux_.require_concave();
    if (mode == WftSpeedMode::entropy_flux && cost.kind() != CostModel::Kind::reciprocal)
        throw std::invalid_argument(
            "entropy-flux speed mode is available for the reciprocal cost only");
}

void Simulator::emit_jump(FrontList& list, double x, double left, double right,
                          riemann::Direction side, std::vector<Front>& out) const {
    if (left == right) return;
    const bool shock =
        side == riemann::Direction::rightward_flux ? (left < right) : (left > right);
    if (shock) {
        Front f;
        f.id = list.next_id++;
        f.x = x;
        f.left = left;
        f.right = right;
        f.kind = FrontKind::shock;
        f.speed = front_speed(flux_, cost_, left, right, side, WftSpeedMode::rankine_hugoniot);
        out.push_back(f);
        return;
    }
    // rarefaction: one front per grid step when both states sit on the grid
    const long il = grid_.index_of(left);
    const long ir = grid_.index_of(right);
    std::vector<double> states;
    if (il >= 0 && ir >= 0 && il != ir) {
        const long stepdir = ir > il ? 1 : -1;
        for (long k = il;; k += stepdir) {
            states.push_back(grid_.values[static_cast<std::size_t>(k)]);
            if (k == ir) break;
        }
    } else {
        states = {left, right};
    }
    for (std::size_t k = 0; k + 1 < states.size(); ++k) {
        Front f;
        f.id = list.next_id++;
        f.x = x;
        f.left = states[k];
        f.right = states[k + 1];
        f.kind = FrontKind::rarefaction;
        f.speed = front_speed(flux_, cost_, f.left, f.right, side, mode_);
        out.push_back(f);
    }
}

namespace {

struct RateBundle {
    double left = 0.0;  // sum over fronts left of the turning point
    double right = 0.0; // and right of it
};

RateBundle base_rates(const FrontList& others, const CostModel& cost, double xi) {
    RateBundle r;
    for (const Front& f : others.fronts) {
        if (!balance_active(f.x, f.speed)) continue;
        const double term = f.speed * (cost.c(f.left) - cost.c(f.right));
        if (f.x < xi) r.left += term;
        else r.right += term;
    }
    return r;
}

double fan_rate(const FluxModel& flux, const CostModel& cost, double l, double r,
                riemann::Direction side) {
    if (l == r) return 0.0;
    const riemann::WaveFan fan = riemann::lwr_riemann(flux, l, r, side);
    return riemann::group_cost_rate(fan, side, -kInf, kInf, cost, flux);
}

double fan_min_speed(const FluxModel& flux, double l, double r, riemann::Direction side) {
    if (l == r) return kInf;
    const riemann::WaveFan fan = riemann::lwr_riemann(flux, l, r, side);
    return fan.waves.front().speed_lo;
}

double fan_max_speed(const FluxModel& flux, double l, double r, riemann::Direction side) {
    if (l == r) return -kInf;
    const riemann::WaveFan fan = riemann::lwr_riemann(flux, l, r, side);
    return fan.waves.back().speed_hi;
}

} // namespace

struct Simulator::Resolution {
    double trace_left = 0.0;
    double trace_right = 0.0;
    double xi_dot = 0.0;
    double rho_m = -1.0; // < 0 when not applicable
    bool crossing = false;
};

/// Local turning-point construction at a (collision or initial) point with
/// states a left and b right of it. Candidates are selected by speed
/// ordering: an equal-trace state needs its connector waves to leave the
/// curve on both sides; otherwise the curve sweeps into one side and the
/// intermediate trace solves RH-speed == balance-speed on the actual front
/// configuration, then snaps to the grid.
Simulator::Resolution Simulator::resolve_turning(const FrontList& others, double xi, double a,
                                                 double b) const {
    const double rho_max = flux_.rho_max();
    const RateBundle base = base_rates(others, cost_, xi);
    const double slack = 1e-10;

    std::vector<double> candidates;
    if (a == rho_max || b == rho_max) candidates.push_back(rho_max);
    candidates.push_back(0.0);
    for (double u : candidates) {
        const double d_left =
            base.left + fan_rate(flux_, cost_, a, u, riemann::Direction::leftward_flux);
        const double d_right =
            base.right + fan_rate(flux_, cost_, u, b, riemann::Direction::rightward_flux);
        const double xi_dot = (d_right - d_left) / (2.0 * cost_.c(u));
        const double left_edge = fan_max_speed(flux_, a, u, riemann::Direction::leftward_flux);
        const double right_edge = fan_min_speed(flux_, u, b, riemann::Direction::rightward_flux);
        if (left_edge > xi_dot + slack || right_edge < xi_dot - slack) continue;
        if (u == rho_max && (xi_dot < flux_.df(rho_max) - slack ||
                             xi_dot > -flux_.df(rho_max) + slack))
            continue;
        Resolution res;
        res.trace_left = res.trace_right = u;
        res.xi_dot = xi_dot;
        return res;
    }

    // the curve sweeps into one side; direction from the vacuum candidate
    const double d_left_vac =
        base.left + fan_rate(flux_, cost_, a, 0.0, riemann::Direction::leftward_flux);
    const double d_right_vac =
        base.right + fan_rate(flux_, cost_, 0.0, b, riemann::Direction::rightward_flux);
    const double xi_dot_vac = (d_right_vac - d_left_vac) / 2.0;
    const bool leftward = xi_dot_vac < -velocity_.v(a);

    auto residual = [&](double rho_m) {
        if (leftward) {
            const double xi_rh = (flux_.f(a) + flux_.f(rho_m)) / (rho_m - a);
            const double d_r =
                base.right + fan_rate(flux_, cost_, rho_m, b, riemann::Direction::rightward_flux);
            return xi_rh - (d_r - base.left) / (cost_.c(a) + cost_.c(rho_m));
        }
        const double xi_rh = (flux_.f(rho_m) + flux_.f(b)) / (b - rho_m);
        const double d_l =
            base.left + fan_rate(flux_, cost_, a, rho_m, riemann::Direction::leftward_flux);
        return xi_rh - (base.right - d_l) / (cost_.c(rho_m) + cost_.c(b));
    };

    const double cap = leftward ? a : b;
    if (!(cap > 0.0))
        throw invariant_error("turning resolution: sweep into a vacuum state");
    double lo = 0.0, r_lo = residual(0.0);
    double hi = std::numeric_limits<double>::quiet_NaN();
    std::vector<std::pair<double, double>> samples{{lo, r_lo}};
    const int scan = 128;
    for (int i = 1; i <= scan; ++i) {
        const double x = cap * static_cast<double>(i) / (scan + 1);
        const double rx = residual(x);
        samples.emplace_back(x, rx);
        if ((r_lo <= 0.0 && rx >= 0.0) || (r_lo >= 0.0 && rx <= 0.0)) {
            hi = x;
            break;
        }
        lo = x;
        r_lo = rx;
    }
    if (!(hi == hi))
        throw bracket_error("turning resolution: no bracket for the intermediate state", samples);
    for (int it = 0; it < 200 && hi - lo > 1e-13; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double rm = residual(mid);
        if ((r_lo <= 0.0) == (rm <= 0.0)) {
            lo = mid;
            r_lo = rm;
        } else {
            hi = mid;
        }
    }
    double rho_m = grid_.snap(0.5 * (lo + hi));
    if (rho_m == cap) rho_m = std::max(0.0, cap - grid_.step); // keep traces distinct

    Resolution res;
    res.crossing = true;
    res.rho_m = rho_m;
    if (leftward) {
        res.trace_left = a;
        res.trace_right = rho_m;
    } else {
        res.trace_left = rho_m;
        res.trace_right = b;
    }
    res.xi_dot = turning_speed(flux_, res.trace_left, res.trace_right);
    return res;
}

void Simulator::rebuild_turning(FrontList& list, std::vector<TraceEvent>& events,
                                bool log_crossing) const {
    const std::size_t ti = list.turning_index();
    const double xi = list.fronts[ti].x;
    const long old_id = list.fronts[ti].id;

    // gather the cluster of fronts sitting on the turning point
    std::size_t lo = ti, hi = ti;
    while (lo > 0 && std::abs(list.fronts[lo - 1].x - xi) <= kTieFuzz) --lo;
    while (hi + 1 < list.fronts.size() && std::abs(list.fronts[hi + 1].x - xi) <= kTieFuzz) ++hi;
    const double a = list.fronts[lo].left;
    const double b = list.fronts[hi].right;

    FrontList rest = list;
    rest.fronts.erase(rest.fronts.begin() + static_cast<std::ptrdiff_t>(lo),
                      rest.fronts.begin() + static_cast<std::ptrdiff_t>(hi) + 1);

    Resolution res = resolve_turning(rest, xi, a, b);

    std::vector<Front> cluster;
    emit_jump(rest, xi, a, res.trace_left, riemann::Direction::leftward_flux, cluster);
    Front turning;
    turning.id = old_id;
    turning.x = xi;
    turning.left = res.trace_left;
    turning.right = res.trace_right;
    turning.kind = FrontKind::turning;
    cluster.push_back(turning);
    const std::size_t turning_pos = cluster.size() - 1;
    emit_jump(rest, xi, res.trace_right, b, riemann::Direction::rightward_flux, cluster);

    rest.fronts.insert(rest.fronts.begin() + static_cast<std::ptrdiff_t>(lo), cluster.begin(),
                       cluster.end());
    list = std::move(rest);

    // equal traces move with the balance-preserving speed, distinct traces
    // with their Rankine-Hugoniot speed
    Front& tf = list.fronts[lo + turning_pos];
    if (tf.left == tf.right) tf.speed = balance_turning_speed(list, cost_);
    else tf.speed = res.xi_dot;

    // a crossing means the curve actually swept into a new state
    const bool traces_changed = res.trace_left != a || res.trace_right != b;
    if (log_crossing && res.crossing && traces_changed)
        events.push_back({list.t, EventKind::direction_switch, tf.id, xi, res.rho_m});
}

FrontList Simulator::initial_fronts(const PiecewiseConstantDensity& grid_datum) const {
    FrontList list;
    const PiecewiseConstantDensity datum = grid_datum.canonicalized();
    const double xi0 = turning::balance_xi(datum, cost_);

    // classical fans at every jump away from the balance root
    const auto& bp = datum.breakpoints();
    const auto& vals = datum.values();
    std::vector<Front> made;
    for (std::size_t k = 0; k < bp.size(); ++k) {
        const double x = bp[k];
        if (x == xi0) continue; // absorbed into the turning construction
        const double l = (k == 0) ? 0.0 : vals[k - 1];
        const double r = (k == vals.size()) ? 0.0 : vals[k];
        if (l == r) continue;
        const riemann::Direction side = x < xi0 ? riemann::Direction::leftward_flux
                                                : riemann::Direction::rightward_flux;
        emit_jump(list, x, l, r, side, made);
    }
    std::sort(made.begin(), made.end(), [](const Front& p, const Front& q) {
        if (p.x != q.x) return p.x < q.x;
        return p.speed < q.speed;
    });
    list.fronts = std::move(made);

    // insert the turning front, then resolve its local structure
    Front turning;
    turning.id = list.next_id++;
    turning.x = xi0;
    turning.left = datum.limit_from_left(xi0);
    turning.right = datum.value_at(xi0);
    turning.kind = FrontKind::turning;
    turning.speed = 0.0;
    const auto pos = std::lower_bound(
        list.fronts.begin(), list.fronts.end(), xi0,
        [](const Front& f, double x) { return f.x < x; });
    list.fronts.insert(pos, turning);

    std::vector<TraceEvent> ignored;
    rebuild_turning(list, ignored, false);
    return list;
}

double Simulator::next_event_time(const FrontList& list) const {
    double best = kInf;
    for (std::size_t i = 0; i + 1 < list.fronts.size(); ++i) {
        const Front& p = list.fronts[i];
        const Front& q = list.fronts[i + 1];
        if (p.speed > q.speed + 0.0) {
            const double dt = (q.x - p.x) / (p.speed - q.speed);
            best = std::min(best, std::max(dt, 0.0));
        }
    }
    for (const Front& f : list.fronts) {
        for (double wall : {-1.0, 1.0}) {
            if (f.speed == 0.0) continue;
            const double dt = (wall - f.x) / f.speed;
            if (dt > kTieFuzz) best = std::min(best, dt);
        }
    }
    return list.t + best;
}

namespace {

void move_fronts(FrontList& list, double t_new) {
    const double dt = t_new - list.t;
    if (dt < 0.0) throw invariant_error("wft: negative time step requested");
    for (Front& f : list.fronts) {
        f.x += dt * f.speed;
        if (std::abs(f.x - 1.0) <= 1e-15) f.x = 1.0;
        if (std::abs(f.x + 1.0) <= 1e-15) f.x = -1.0;
    }
    list.t = t_new;
}

} // namespace

std::vector<TraceEvent> Simulator::advance(FrontList& list, double t_cap) const {
    std::vector<TraceEvent> events;
    const double t_event = next_event_time(list);
    if (t_event > t_cap) {
        move_fronts(list, t_cap);
        return events;
    }
    move_fronts(list, t_event);

    // classify what happened at t_event: collisions (positions coincide) and
    // wall crossings; collisions are processed leftmost first
    const std::size_t ti = list.turning_index();
    bool turning_involved = false;
    std::ptrdiff_t collide_at = -1;
    for (std::size_t i = 0; i + 1 < list.fronts.size(); ++i) {
        if (list.fronts[i + 1].x - list.fronts[i].x <= kTieFuzz &&
            list.fronts[i].speed > list.fronts[i + 1].speed) {
            collide_at = static_cast<std::ptrdiff_t>(i);
            turning_involved = (i == ti || i + 1 == ti);
            break;
        }
    }

    if (collide_at >= 0 && turning_involved) {
        events.push_back({list.t, EventKind::turning_interaction,
                          list.fronts[static_cast<std::size_t>(collide_at)].id,
                          list.fronts[static_cast<std::size_t>(collide_at)].x, 0.0});
    } else if (collide_at >= 0) {
        // merge the colliding pair (clusters are absorbed pairwise)
        const std::size_t i = static_cast<std::size_t>(collide_at);
        const double x = list.fronts[i].x;
        const double l = list.fronts[i].left;
        const double r = list.fronts[i + 1].right;
        const riemann::Direction side = i < list.turning_index()
                                            ? riemann::Direction::leftward_flux
                                            : riemann::Direction::rightward_flux;
        events.push_back({list.t, EventKind::front_collision, list.fronts[i].id, x, 0.0});
        list.fronts.erase(list.fronts.begin() + collide_at, list.fronts.begin() + collide_at + 2);
        std::vector<Front> made;
        emit_jump(list, x, l, r, side, made);
        list.fronts.insert(list.fronts.begin() + collide_at, made.begin(), made.end());
    } else {
        // a wall crossing: log the fronts sitting exactly on a wall
        for (const Front& f : list.fronts)
            if (f.x == -1.0 || f.x == 1.0)
                events.push_back({list.t, EventKind::boundary_cross, f.id, f.x, 0.0});
        if (events.empty())
            events.push_back({list.t, EventKind::boundary_cross, -1, 0.0, 0.0});
    }

    // the local turning construction is only valid up to the next
    // interaction anywhere: re-solve traces and speed against the new
    // configuration (a no-op while nothing changed near the curve)
    rebuild_turning(list, events, true);

    // log how far the advected curve sits from the exact balance root;
    // with equal traces the position itself is re-anchored (mass-free)
    const std::size_t t2 = list.turning_index();
    Front& tf = list.fronts[t2];
    const turning::BalanceFunction bal =
        turning::BalanceFunction::from_density(list.density(), cost_);
    const double residual = std::abs(bal.eval(tf.x));
    list.max_balance_residual = std::max(list.max_balance_residual, residual);
    if (tf.left == tf.right) {
        double xi_new = bal.root();
        const double lo_lim = t2 > 0 ? list.fronts[t2 - 1].x : -kInf;
        const double hi_lim = t2 + 1 < list.fronts.size() ? list.fronts[t2 + 1].x : kInf;
        xi_new = std::min(std::max(xi_new, lo_lim), hi_lim);
        tf.x = xi_new;
        tf.speed = balance_turning_speed(list, cost_);
    }

    if (list.fronts.size() > front_cap)
        throw invariant_error("wft: front count exceeded the configured cap");
    return events;
}

WftRunResult Simulator::run(const PiecewiseConstantDensity& datum, double horizon,
                            double output_dt) const {
    WftRunResult out;
    out.trace.scheme = Scheme::wft;

    const PiecewiseConstantDensity rho0 = discretize_datum(datum, grid_);
    FrontList list = initial_fronts(rho0);

    auto snapshot = [&](bool at_event) {
        const PiecewiseConstantDensity rho = list.density();
        out.trace.snapshots.push_back({list.t, rho});
        out.front_snapshots.emplace_back(list.t, list.fronts);
        const std::size_t ti = list.turning_index();
        out.trace.turning.push_back({list.t, list.fronts[ti].x, list.fronts[ti].left,
                                     list.fronts[ti].right, at_event});
        out.trace.tv_series.push_back(list.total_variation());
        out.trace.front_counts.push_back(list.fronts.size());
        out.max_front_count = std::max(out.max_front_count, list.fronts.size());
        out.max_tv = std::max(out.max_tv, list.total_variation());
        if (!out.trace.evacuation_time && rho.mass(-1.0, 1.0) == 0.0)
            out.trace.evacuation_time = list.t;
    };

    snapshot(false);
    double next = output_dt;
    double last_event_t = -1.0;
    long same_time_events = 0;
    while (list.t < horizon - 1e-12) {
        const double target = std::min(next, horizon);
        while (list.t < target - 1e-15) {
            std::vector<TraceEvent> events = advance(list, target);
            if (!events.empty()) {
                if (list.t == last_event_t) {
                    if (++same_time_events > 4096)
                        throw invariant_error("wft: event chatter at a fixed instant");
                } else {
                    last_event_t = list.t;
                    same_time_events = 0;
                }
            }
            for (const TraceEvent& e : events) {
                out.trace.events.push_back(e);
                if (e.kind == EventKind::front_collision) ++out.collision_count;
                if (e.kind == EventKind::turning_interaction) ++out.turning_interaction_count;
                if (e.kind == EventKind::direction_switch) ++out.turning_crossing_count;
            }
            if (!events.empty()) {
                const std::size_t ti = list.turning_index();
                out.trace.turning.push_back({list.t, list.fronts[ti].x, list.fronts[ti].left,
                                             list.fronts[ti].right, true});
            }
        }
        snapshot(false);
        next += output_dt;
    }
    out.trace.max_balance_residual = list.max_balance_residual;
    return out;
}

WftRunResult run(const Scenario& scenario, int n) {
    scenario.validate();
    Simulator sim(scenario.velocity, scenario.cost, n, scenario.wft_mode);
    return sim.run(scenario.initial, scenario.horizon, scenario.output_dt);
}

} // namespace hughes::wft
