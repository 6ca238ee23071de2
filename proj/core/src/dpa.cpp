#include "hughes/dpa.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <memory>
#include <sstream>
#include <string>

#include "hughes/errors.hpp"
#include "hughes/turning.hpp"

namespace hughes::dpa {

long ParticleState::inside_count() const {
    long n = 0;
    for (double xi : x)
        if (xi > -1.0 && xi < 1.0) ++n;
    return n;
}

ParticleState init_particles_count(const PiecewiseConstantDensity& rho0, long segments) {
    if (segments < 1) throw std::invalid_argument("init_particles: need at least one segment");
    const double mass = rho0.total_mass();
    if (!(mass > 0.0)) throw std::invalid_argument("init_particles: datum carries no mass");
    const double m = mass / static_cast<double>(segments);

    ParticleState s;
    s.m = m;
    s.x.resize(static_cast<std::size_t>(segments) + 1);
    s.x.front() = rho0.support_min();
    s.x.back() = rho0.support_max();

    // invert the cumulative mass at levels i*m, walking the pieces once;
    // a level reached exactly at a block end lands on that end (inf rule)
    const auto& bp = rho0.breakpoints();
    const auto& vals = rho0.values();
    std::size_t k = 0;
    double cum = 0.0; // mass strictly before bp[k]
    for (long i = 1; i < segments; ++i) {
        const double level = static_cast<double>(i) * m;
        while (k < vals.size() &&
               (vals[k] == 0.0 || cum + vals[k] * (bp[k + 1] - bp[k]) < level)) {
            cum += vals[k] * (bp[k + 1] - bp[k]);
            ++k;
        }
        if (k >= vals.size())
            throw invariant_error("init_particles: cumulative mass exhausted before last level");
        s.x[static_cast<std::size_t>(i)] = bp[k] + (level - cum) / vals[k];
    }
    for (std::size_t i = 0; i + 1 < s.x.size(); ++i)
        if (!(s.x[i] < s.x[i + 1]))
            throw invariant_error("init_particles: quantile positions not strictly increasing");
    return s;
}

ParticleState init_particles(const PiecewiseConstantDensity& rho0, int n) {
    if (n < 0 || n > 24) throw std::invalid_argument("init_particles: n out of range");
    return init_particles_count(rho0, 1L << n);
}

namespace {

double strict_density(double r, double rho_max) {
    if (r <= rho_max) return r;
    if (r <= rho_max * (1.0 + 1e-9)) return rho_max;
    throw invariant_error("particle gap below m/rho_max: overlapping particles");
}

double soft_density(double r, double rho_max) { return std::min(r, rho_max); }

bool right_mover(const ParticleState& s, std::size_t i) {
    if (s.frozen >= 0) return static_cast<long>(i) > s.frozen;
    return i >= s.first_right;
}

template <typename Clamp>
std::vector<double> velocities_impl(const ParticleState& s, const VelocityModel& velocity,
                                    Clamp clamp) {
    const std::size_t n = s.x.size();
    const double rho_max = velocity.rho_max();
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (s.frozen == static_cast<long>(i)) {
            v[i] = 0.0;
        } else if (right_mover(s, i)) {
            v[i] = (i + 1 == n) ? velocity.v_max()
                                : velocity.v(clamp(s.m / (s.x[i + 1] - s.x[i]), rho_max));
        } else {
            v[i] = (i == 0) ? -velocity.v_max()
                            : -velocity.v(clamp(s.m / (s.x[i] - s.x[i - 1]), rho_max));
        }
    }
    return v;
}

} // namespace

std::vector<double> velocities(const ParticleState& s, const VelocityModel& velocity) {
    return velocities_impl(s, velocity, strict_density);
}

PiecewiseConstantDensity reconstruct_density(const ParticleState& s, DensityMode mode) {
    const std::size_t n = s.x.size();
    if (n < 2) return {};
    std::vector<double> vals(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) vals[i] = s.m / (s.x[i + 1] - s.x[i]);
    if (mode == DensityMode::zero_turning_gap) {
        if (s.frozen >= 0) {
            // pinned particle: both adjacent gaps are cleared symmetrically
            if (s.frozen > 0) vals[static_cast<std::size_t>(s.frozen - 1)] = 0.0;
            if (s.frozen < static_cast<long>(n) - 1) vals[static_cast<std::size_t>(s.frozen)] = 0.0;
        } else {
            const auto it = std::lower_bound(s.x.begin(), s.x.end(), s.zeta);
            const long i0 = static_cast<long>(it - s.x.begin()) - 1;
            if (i0 >= 0 && i0 < static_cast<long>(n) - 1) vals[static_cast<std::size_t>(i0)] = 0.0;
        }
    }
    return PiecewiseConstantDensity(s.x, std::move(vals));
}

namespace {

/// Turning operator abstraction used by the integrator. eval() must be a
/// pure function of (positions, t) relative to the last commit.
struct TurningOp {
    struct Out {
        double zeta = 0.0;
        long tie = -1; // particle pinned at zeta (balance operator only)
    };
    virtual ~TurningOp() = default;
    virtual Out eval(const std::vector<double>& x, double m, double t) = 0;
    virtual void commit(const std::vector<double>&, double, double) {}
    /// Whether group changes are sharp events to localize in time. True for
    /// the particle balance (they provably ride the exits); the density
    /// operators reassign at step boundaries instead, since their zero-gap
    /// self-reference can oscillate at the gap scale.
    virtual bool localize_side_flips() const { return false; }
};

struct ParticleOp final : TurningOp {
    double alpha;
    explicit ParticleOp(double a) : alpha(a) {}
    Out eval(const std::vector<double>& x, double m, double) override {
        return {turning::particle_zeta(x, m, alpha), -1};
    }
    bool localize_side_flips() const override { return true; }
};

PiecewiseConstantDensity gaps_density(const std::vector<double>& x, double m, long g0, long g1) {
    std::vector<double> vals(x.size() - 1);
    for (std::size_t i = 0; i + 1 < x.size(); ++i) vals[i] = m / (x[i + 1] - x[i]);
    for (long g : {g0, g1})
        if (g >= 0 && g < static_cast<long>(vals.size())) vals[static_cast<std::size_t>(g)] = 0.0;
    return PiecewiseConstantDensity(x, std::move(vals));
}

/// Density-balance operator: root of the cost-weighted balance of the
/// reconstructed density, with the gap straddling the root carrying zero.
/// The straddling gap is located by fixed-point iteration from a hint.
///
/// Near a particle the single-gap form has no fixed point (the two adjacent
/// choices hand the root back and forth), so a crossing band around each
/// particle switches to the two-gap form: both adjacent gaps cleared, the
/// root passing continuously through the particle. The selection depends
/// only on the current positions and the committed hint, so event bisection
/// sees one deterministic turning path. A two-gap root landing on the
/// particle itself pins it there (the symmetric tie for exactly even data).
struct BalanceOp final : TurningOp {
    const CostModel& cost;
    double hint = 0.0;
    explicit BalanceOp(const CostModel& c) : cost(c) {}

    static long gap_of(const std::vector<double>& x, double pos) {
        const auto it = std::upper_bound(x.begin(), x.end(), pos);
        return static_cast<long>(it - x.begin()) - 1;
    }

    Out crossing(const std::vector<double>& x, double m, long k) const {
        if (k <= 0 || k + 1 >= static_cast<long>(x.size()))
            return {turning::balance_xi(gaps_density(x, m, k, k), cost), -1};
        const double root = turning::balance_xi(gaps_density(x, m, k - 1, k), cost);
        const bool tie = std::abs(root - x[static_cast<std::size_t>(k)]) <= 1e-10;
        return {root, tie ? k : -1};
    }

    // band around particle k where the single-gap form is abandoned
    double band(const std::vector<double>& x, long k) const {
        if (k <= 0 || k + 1 >= static_cast<long>(x.size())) return 0.0;
        const double left = x[static_cast<std::size_t>(k)] - x[static_cast<std::size_t>(k - 1)];
        const double right = x[static_cast<std::size_t>(k + 1)] - x[static_cast<std::size_t>(k)];
        return 0.25 * std::min(left, right);
    }

    Out eval(const std::vector<double>& x, double m, double) override {
        long i0 = gap_of(x, hint);
        long prev = std::numeric_limits<long>::min();
        double root = hint;
        for (int iter = 0; iter < 8; ++iter) {
            root = turning::balance_xi(gaps_density(x, m, i0, i0), cost);
            const long at = gap_of(x, root);
            if (at == i0) {
                for (long k : {i0, i0 + 1}) {
                    if (k <= 0 || k + 1 >= static_cast<long>(x.size())) continue;
                    if (std::abs(root - x[static_cast<std::size_t>(k)]) <= band(x, k))
                        return crossing(x, m, k);
                }
                return {root, -1};
            }
            if (at == prev) // two-cycle across the shared particle
                return crossing(x, m, std::max(at, i0));
            prev = i0;
            i0 = at;
        }
        return {root, -1};
    }

    void commit(const std::vector<double>& x, double m, double t) override {
        hint = eval(x, m, t).zeta;
    }
};

/// Memory operator: balance of the exponentially weighted subjective
/// density. The committed part is refreshed at tick cadence; between ticks
/// the live density enters with the exact exponential weight.
struct MemoryOp final : TurningOp {
    const CostModel& cost;
    double delta;
    double tick_dt;
    PiecewiseConstantDensity committed;
    double last_tick = 0.0;
    bool primed = false;

    MemoryOp(const CostModel& c, double d, double tick) : cost(c), delta(d), tick_dt(tick) {}

    static PiecewiseConstantDensity live_density(const std::vector<double>& x, double m) {
        return gaps_density(x, m, -1, -1);
    }

    Out eval(const std::vector<double>& x, double m, double t) override {
        const PiecewiseConstantDensity live = live_density(x, m);
        if (!primed) return {turning::balance_xi(live, cost), -1};
        const double w = std::exp(-delta * (t - last_tick));
        const PiecewiseConstantDensity mix = combine({&committed, &live}, {w, 1.0 - w});
        return {turning::balance_xi(mix, cost), -1};
    }

    void commit(const std::vector<double>& x, double m, double t) override {
        if (primed && t - last_tick < tick_dt) return;
        const PiecewiseConstantDensity live = live_density(x, m);
        if (!primed) {
            committed = live;
            primed = true;
        } else {
            const double w = std::exp(-delta * (t - last_tick));
            committed = combine({&committed, &live}, {w, 1.0 - w});
        }
        last_tick = t;
    }
};

/// Relaxation operator: explicit Euler on eps * xi' = -(balance residual),
/// with the balance taken against the density at the last committed step.
struct RelaxationOp final : TurningOp {
    const CostModel& cost;
    double eps;
    double xi = 0.0;
    double slope = 0.0;
    double t_committed = 0.0;
    bool primed = false;

    RelaxationOp(const CostModel& c, double e) : cost(c), eps(e) {}

    Out eval(const std::vector<double>& x, double m, double t) override {
        if (!primed)
            return {turning::balance_xi(gaps_density(x, m, -1, -1), cost), -1};
        return {xi + (t - t_committed) * slope, -1};
    }

    void commit(const std::vector<double>& x, double m, double t) override {
        const PiecewiseConstantDensity rho = gaps_density(x, m, -1, -1);
        if (!primed) {
            xi = turning::balance_xi(rho, cost); // xi(0) satisfies the balance
            primed = true;
        } else {
            xi += (t - t_committed) * slope;
        }
        slope = -turning::BalanceFunction::from_density(rho, cost).eval(xi) / eps;
        t_committed = t;
    }
};

int mover_class(const ParticleState& s, std::size_t i) {
    if (s.frozen == static_cast<long>(i)) return 0;
    return right_mover(s, i) ? 1 : -1;
}

struct Engine {
    ParticleState& s;
    const VelocityModel& velocity;
    TurningOp& op;
    double dt_base;
    std::vector<TraceEvent> events;
    std::vector<TurningSample> turning_samples;
    std::optional<double> t_mic;
    long event_budget;

    Engine(ParticleState& state, const VelocityModel& vel, TurningOp& turning_op, double dt_cap,
           double dt_factor = 0.2)
        : s(state), velocity(vel), op(turning_op) {
        double max_slope = 0.0;
        const double rho_max = velocity.rho_max();
        for (int i = 0; i <= 64; ++i) {
            const double rho = rho_max * i / 64.0;
            max_slope = std::max(max_slope, std::abs(velocity.dv(rho)) * rho * rho);
        }
        max_slope = std::max(max_slope / s.m, 1e-6);
        dt_base = std::min(dt_factor / max_slope, dt_cap);
        event_budget = 100000 + 50 * static_cast<long>(s.x.size());
    }

    std::vector<double> rk4_positions(double dt) const {
        const std::size_t n = s.x.size();
        ParticleState tmp = s;
        const std::vector<double> k1 = velocities_impl(tmp, velocity, soft_density);
        for (std::size_t i = 0; i < n; ++i) tmp.x[i] = s.x[i] + 0.5 * dt * k1[i];
        const std::vector<double> k2 = velocities_impl(tmp, velocity, soft_density);
        for (std::size_t i = 0; i < n; ++i) tmp.x[i] = s.x[i] + 0.5 * dt * k2[i];
        const std::vector<double> k3 = velocities_impl(tmp, velocity, soft_density);
        for (std::size_t i = 0; i < n; ++i) tmp.x[i] = s.x[i] + dt * k3[i];
        const std::vector<double> k4 = velocities_impl(tmp, velocity, soft_density);
        std::vector<double> out(n);
        for (std::size_t i = 0; i < n; ++i)
            out[i] = s.x[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        return out;
    }

    bool ordering_ok(const std::vector<double>& x) const {
        const double min_gap = s.m / velocity.rho_max() * (1.0 - 1e-9);
        for (std::size_t i = 0; i + 1 < x.size(); ++i)
            if (!(x[i + 1] - x[i] >= min_gap)) return false;
        return true;
    }

    bool any_event(const std::vector<double>& x_new, double t_new) const {
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (s.frozen == static_cast<long>(i)) continue;
            if (right_mover(s, i)) {
                if (s.x[i] < 1.0 && x_new[i] >= 1.0) return true;
            } else {
                if (s.x[i] > -1.0 && x_new[i] <= -1.0) return true;
            }
        }
        if (!op.localize_side_flips()) return false;
        const TurningOp::Out o = op.eval(x_new, s.m, t_new);
        if (o.tie != s.frozen) return true;
        if (o.tie >= 0) return false;
        for (std::size_t i = 0; i < x_new.size(); ++i)
            if ((x_new[i] >= o.zeta) != right_mover(s, i)) return true;
        return false;
    }

    // snap just-crossed particles onto the exits and log them, left first
    void log_exits(const ParticleState& before) {
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (before.frozen == static_cast<long>(i)) continue;
            if (!right_mover(before, i) && before.x[i] > -1.0 && s.x[i] <= -1.0) {
                if (s.x[i] > -1.0 - 1e-9) s.x[i] = -1.0;
                events.push_back({s.t, EventKind::exit_left, static_cast<long>(i), s.x[i], 0.0});
            }
        }
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (before.frozen == static_cast<long>(i)) continue;
            if (right_mover(before, i) && before.x[i] < 1.0 && s.x[i] >= 1.0) {
                if (s.x[i] < 1.0 + 1e-9) s.x[i] = 1.0;
                events.push_back({s.t, EventKind::exit_right, static_cast<long>(i), s.x[i], 0.0});
            }
        }
    }

    enum class LogMode { quiet, flips_only, full };

    void apply_turning(const TurningOp::Out& o, LogMode mode) {
        const double zeta_old = s.zeta;
        std::vector<int> cls(s.x.size());
        for (std::size_t i = 0; i < s.x.size(); ++i) cls[i] = mover_class(s, i);
        s.zeta = o.zeta;
        s.frozen = o.tie;
        s.first_right = static_cast<std::size_t>(
            std::lower_bound(s.x.begin(), s.x.end(), s.zeta) - s.x.begin());
        if (s.frozen >= 0) s.first_right = static_cast<std::size_t>(s.frozen) + 1;
        if (mode == LogMode::quiet) return;
        long flips = 0;
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            const int now = mover_class(s, i);
            if (cls[i] != 0 && now != 0 && now != cls[i]) {
                events.push_back(
                    {s.t, EventKind::direction_switch, static_cast<long>(i), s.x[i], 0.0});
                ++flips;
            }
        }
        const bool jumped = std::abs(s.zeta - zeta_old) > 1e-13;
        if (jumped && (mode == LogMode::full || flips > 0))
            events.push_back({s.t, EventKind::turning_jump, -1, zeta_old, s.zeta});
    }

    void record_turning_sample(bool at_event) {
        // one-sided density limits at zeta come from the all-gap profile
        double left = 0.0, right = 0.0;
        const auto it = std::lower_bound(s.x.begin(), s.x.end(), s.zeta);
        const long i0 = static_cast<long>(it - s.x.begin()) - 1;
        if (s.frozen >= 0 || (it != s.x.end() && *it == s.zeta)) {
            left = right = 0.0; // the curve sits on a particle, both gaps drained
        } else if (i0 >= 0 && i0 + 1 < static_cast<long>(s.x.size())) {
            left = right = s.m / (s.x[static_cast<std::size_t>(i0) + 1] -
                                  s.x[static_cast<std::size_t>(i0)]);
        }
        turning_samples.push_back({s.t, s.zeta, left, right, at_event});
    }

    /// Advances to t_target, never stepping across an event. Returns early
    /// when the corridor empties (evacuation time reached).
    void advance_to(double t_target) {
        while (s.t < t_target - 1e-14) {
            double dt = std::min(dt_base, t_target - s.t);
            std::vector<double> trial;
            for (int tries = 0;; ++tries) {
                trial = rk4_positions(dt);
                if (ordering_ok(trial)) break;
                dt *= 0.5;
                if (tries > 60)
                    throw invariant_error("dpa step: ordering cannot be maintained at any step size");
            }
            if (!any_event(trial, s.t + dt)) {
                s.x = std::move(trial);
                s.t += dt;
                op.commit(s.x, s.m, s.t);
                // localizing operators drift continuously here (flips were
                // bisected away); the others reassign at step boundaries
                apply_turning(op.eval(s.x, s.m, s.t),
                              op.localize_side_flips() ? LogMode::quiet : LogMode::flips_only);
                continue;
            }
            // bisect the earliest event time inside (0, dt]
            double lo = 0.0, hi = dt;
            while (hi - lo > 1e-12) {
                const double mid = 0.5 * (lo + hi);
                if (any_event(rk4_positions(mid), s.t + mid)) hi = mid;
                else lo = mid;
            }
            const ParticleState before = s;
            s.x = rk4_positions(hi);
            s.t += hi;
            log_exits(before);
            op.commit(s.x, s.m, s.t);
            apply_turning(op.eval(s.x, s.m, s.t), LogMode::full);
            record_turning_sample(true);
            if (static_cast<long>(events.size()) > event_budget)
                throw invariant_error("dpa run: event budget exhausted (chattering events?)");
            if (!t_mic && s.inside_count() == 0) {
                t_mic = s.t;
                return;
            }
        }
        s.t = t_target;
    }
};

std::unique_ptr<TurningOp> make_operator(const Scenario& scenario, TurningKind kind) {
    switch (kind) {
    case TurningKind::particle:
        if (scenario.cost.kind() != CostModel::Kind::linear)
            throw std::invalid_argument("particle turning operator requires a linear cost");
        return std::make_unique<ParticleOp>(scenario.cost.alpha());
    case TurningKind::balance:
        return std::make_unique<BalanceOp>(scenario.cost);
    case TurningKind::memory:
        return std::make_unique<MemoryOp>(scenario.cost, scenario.turning_delta,
                                          std::max(scenario.output_dt, 0.01));
    case TurningKind::relaxation:
        return std::make_unique<RelaxationOp>(scenario.cost, scenario.turning_epsilon);
    }
    throw std::logic_error("unreachable turning kind");
}

TurningKind effective_kind(const Scenario& scenario) {
    if (scenario.turning_kind_explicit) return scenario.turning_kind;
    return scenario.cost.kind() == CostModel::Kind::linear ? TurningKind::particle
                                                           : TurningKind::balance;
}

} // namespace

StepOutcome step(ParticleState& s, const VelocityModel& velocity, double alpha, double dt_max) {
    if (!(dt_max > 0.0)) throw std::invalid_argument("dpa step: dt_max must be positive");
    ParticleOp op(alpha);
    Engine engine(s, velocity, op, dt_max);
    engine.apply_turning(op.eval(s.x, s.m, s.t), Engine::LogMode::quiet);
    StepOutcome out;
    engine.advance_to(s.t + dt_max);
    out.events = std::move(engine.events);
    out.reached_target = !engine.t_mic.has_value();
    return out;
}

DpaTrajectory run(const Scenario& scenario, int n) {
    scenario.validate();
    const TurningKind kind = effective_kind(scenario);
    const DensityMode mode =
        kind == TurningKind::balance ? DensityMode::zero_turning_gap : DensityMode::all_gaps;

    DpaTrajectory out;
    ParticleState s = scenario.dpa_particles > 0
                          ? init_particles_count(scenario.initial, scenario.dpa_particles)
                          : init_particles(scenario.initial, n);
    out.m = s.m;
    try {
        out.datum_balance_root = turning::balance_xi(scenario.initial, scenario.cost);
    } catch (const std::exception&) {
        out.datum_balance_root = std::numeric_limits<double>::quiet_NaN();
    }

    std::unique_ptr<TurningOp> op = make_operator(scenario, kind);

    // optional nudge for particles that coincide with the initial turning point
    if (scenario.dpa_perturb > 0.0) {
        const double provisional =
            turning::balance_xi(gaps_density(s.x, s.m, -1, -1), scenario.cost);
        for (double& xi : s.x)
            if (xi == provisional) xi += scenario.dpa_perturb;
        std::sort(s.x.begin(), s.x.end());
    }

    double dt_cap = scenario.output_dt;
    if (kind == TurningKind::relaxation) dt_cap = std::min(dt_cap, scenario.turning_epsilon);
    Engine engine(s, scenario.velocity, *op, dt_cap, scenario.dpa_dt_factor);

    op->commit(s.x, s.m, 0.0);
    engine.apply_turning(op->eval(s.x, s.m, 0.0), Engine::LogMode::quiet);
    out.zeta0 = s.zeta;

    auto snapshot = [&]() {
        out.trace.snapshots.push_back({s.t, reconstruct_density(s, mode)});
        out.particle_snapshots.push_back(s.x);
        engine.record_turning_sample(false);
    };
    snapshot();

    const double t_end = scenario.horizon;
    double next = scenario.output_dt;
    while (s.t < t_end - 1e-12 && !engine.t_mic) {
        engine.advance_to(std::min(next, t_end));
        if (engine.t_mic) break;
        snapshot();
        next += scenario.output_dt;
    }
    if (engine.t_mic) snapshot(); // final state at the evacuation instant

    out.t_mic = engine.t_mic;
    out.trace.scheme = Scheme::dpa;
    out.trace.events = std::move(engine.events);
    out.trace.turning = std::move(engine.turning_samples);
    std::sort(out.trace.turning.begin(), out.trace.turning.end(),
              [](const TurningSample& a, const TurningSample& b) { return a.t < b.t; });
    out.trace.evacuation_time = out.t_mic;
    return out;
}

std::vector<SweepEntry> sweep_alpha(const Scenario& scenario, const std::vector<double>& alphas,
                                    int n) {
    std::vector<double> sorted = alphas;
    std::sort(sorted.begin(), sorted.end());
    std::vector<std::future<SweepEntry>> futures;
    for (double alpha : sorted) {
        futures.push_back(std::async(std::launch::async, [scenario, alpha, n]() {
            SweepEntry entry;
            entry.alpha = alpha;
            try {
                Scenario run_scenario = scenario;
                run_scenario.cost = CostModel::linear(alpha);
                run_scenario.turning_kind_explicit = false;
                entry.t_mic = run(run_scenario, n).t_mic;
            } catch (const std::exception& e) {
                entry.error = e.what();
            }
            return entry;
        }));
    }
    std::vector<SweepEntry> out;
    out.reserve(futures.size());
    for (auto& f : futures) out.push_back(f.get());
    return out;
}

} // namespace hughes::dpa
