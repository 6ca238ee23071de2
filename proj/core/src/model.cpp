#include "hughes/model.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace hughes {

namespace {

void require_density_range(double rho, double rho_max, const char* who) {
    if (!(rho >= 0.0 && rho <= rho_max)) {
        std::ostringstream os;
        os << who << ": density " << rho << " outside [0, " << rho_max << "]";
        throw std::domain_error(os.str());
    }
}

} // namespace

VelocityModel VelocityModel::linear(double v_max, double rho_max) {
    if (!(v_max > 0.0) || !(rho_max > 0.0))
        throw std::invalid_argument("velocity model: v_max and rho_max must be positive");
    VelocityModel m;
    m.v_max_ = v_max;
    m.rho_max_ = rho_max;
    m.linear_ = true;
    return m;
}

VelocityModel VelocityModel::custom(double v_max, double rho_max,
                                    std::function<double(double)> v,
                                    std::function<double(double)> dv,
                                    std::function<double(double)> ddv) {
    if (!(v_max > 0.0) || !(rho_max > 0.0))
        throw std::invalid_argument("velocity model: v_max and rho_max must be positive");
    if (!v || !dv || !ddv)
        throw std::invalid_argument("velocity model: custom kind needs v, v' and v''");
    VelocityModel m;
    m.v_max_ = v_max;
    m.rho_max_ = rho_max;
    m.linear_ = false;
    m.v_ = std::move(v);
    m.dv_ = std::move(dv);
    m.ddv_ = std::move(ddv);
    return m;
}

double VelocityModel::v(double rho) const {
    require_density_range(rho, rho_max_, "velocity");
    if (linear_) return v_max_ * (1.0 - rho / rho_max_);
    return v_(rho);
}

double VelocityModel::dv(double rho) const {
    require_density_range(rho, rho_max_, "velocity derivative");
    if (linear_) return -v_max_ / rho_max_;
    return dv_(rho);
}

double VelocityModel::ddv(double rho) const {
    require_density_range(rho, rho_max_, "velocity second derivative");
    if (linear_) return 0.0;
    return ddv_(rho);
}

CostModel CostModel::linear(double alpha) {
    if (!(alpha >= 0.0)) throw std::invalid_argument("linear cost: alpha must be >= 0");
    CostModel m;
    m.kind_ = Kind::linear;
    m.alpha_ = alpha;
    return m;
}

CostModel CostModel::reciprocal(const VelocityModel& velocity) {
    CostModel m;
    m.kind_ = Kind::reciprocal;
    m.velocity_ = velocity;
    return m;
}

CostModel CostModel::custom(std::function<double(double)> c,
                            std::function<double(double)> dc,
                            std::function<double(double)> ddc) {
    if (!c || !dc || !ddc)
        throw std::invalid_argument("cost model: custom kind needs c, c' and c''");
    CostModel m;
    m.kind_ = Kind::custom;
    m.c_ = std::move(c);
    m.dc_ = std::move(dc);
    m.ddc_ = std::move(ddc);
    return m;
}

double CostModel::c(double rho) const {
    switch (kind_) {
    case Kind::linear:
        return 1.0 + alpha_ * rho;
    case Kind::reciprocal: {
        const double v = velocity_.v(rho);
        if (!(v > 0.0))
            throw std::domain_error("reciprocal cost undefined at vanishing speed (rho = rho_max)");
        // normalised so that c(0) = 1 also for v_max != 1
        return velocity_.v_max() / v;
    }
    case Kind::custom:
        return c_(rho);
    }
    throw std::logic_error("unreachable cost kind");
}

double CostModel::dc(double rho) const {
    switch (kind_) {
    case Kind::linear:
        return alpha_;
    case Kind::reciprocal: {
        const double v = velocity_.v(rho);
        if (!(v > 0.0)) throw std::domain_error("reciprocal cost derivative undefined at rho_max");
        return -velocity_.v_max() * velocity_.dv(rho) / (v * v);
    }
    case Kind::custom:
        return dc_(rho);
    }
    throw std::logic_error("unreachable cost kind");
}

double CostModel::ddc(double rho) const {
    switch (kind_) {
    case Kind::linear:
        return 0.0;
    case Kind::reciprocal: {
        const double v = velocity_.v(rho);
        if (!(v > 0.0)) throw std::domain_error("reciprocal cost second derivative undefined at rho_max");
        const double dv = velocity_.dv(rho);
        const double ddv = velocity_.ddv(rho);
        return velocity_.v_max() * (2.0 * dv * dv / (v * v * v) - ddv / (v * v));
    }
    case Kind::custom:
        return ddc_(rho);
    }
    throw std::logic_error("unreachable cost kind");
}

FluxModel FluxModel::from_velocity(const VelocityModel& velocity) {
    FluxModel m;
    m.velocity_ = velocity;
    m.rho_hat_ = critical_density(velocity);
    return m;
}

double FluxModel::f(double rho) const {
    require_density_range(rho, rho_max(), "flux");
    return rho * velocity_.v(rho);
}

double FluxModel::df(double rho) const {
    return velocity_.v(rho) + rho * velocity_.dv(rho);
}

double FluxModel::ddf(double rho) const {
    return 2.0 * velocity_.dv(rho) + rho * velocity_.ddv(rho);
}

void FluxModel::require_concave() const {
    if (concavity_checked_ == 1) return;
    if (concavity_checked_ == -1)
        throw std::invalid_argument("flux is not strictly concave on [0, rho_max]");
    const int n = 2048;
    for (int i = 0; i <= n; ++i) {
        const double rho = rho_max() * static_cast<double>(i) / n;
        if (!(ddf(rho) < 1e-12)) {
            concavity_checked_ = -1;
            std::ostringstream os;
            os << "flux is not strictly concave: f''(" << rho << ") = " << ddf(rho);
            throw std::invalid_argument(os.str());
        }
    }
    concavity_checked_ = 1;
}

double critical_density(const VelocityModel& velocity) {
    // f' = v + rho v' changes sign from + to - exactly once; f'(rho_max) may
    // vanish (v' can degenerate there), so the bracket comes from a scan
    auto fp = [&](double rho) { return velocity.v(rho) + rho * velocity.dv(rho); };
    if (!(fp(0.0) > 0.0))
        throw std::invalid_argument("critical density: f'(0) = v_max must be positive");
    const int scan = 4096;
    double lo = 0.0, hi = -1.0;
    for (int k = 1; k <= scan; ++k) {
        const double rho = velocity.rho_max() * static_cast<double>(k) / scan;
        if (fp(rho) < 0.0) {
            hi = rho;
            break;
        }
        lo = rho;
    }
    if (hi < 0.0)
        throw std::invalid_argument("critical density: f' never becomes negative on [0, rho_max]");
    while (hi - lo > 1e-12) {
        const double mid = 0.5 * (lo + hi);
        (fp(mid) > 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

std::string ModelHypothesesReport::summary() const {
    std::ostringstream os;
    os << "H1(c''>=0)=" << (h1 ? "ok" : "violated")
       << " H1(c''>0)=" << (h1_strict ? "ok" : "violated")
       << " H2=" << (h2 ? "ok" : "violated")
       << " H2'=" << (h2_prime ? "ok" : "violated");
    return os.str();
}

double density_cost_integral(const PiecewiseConstantDensity& rho, const CostModel& cost,
                             double a, double b) {
    if (!(a <= b)) throw std::invalid_argument("density_cost_integral: need a <= b");
    double total = 0.0;
    double covered = 0.0;
    const auto& bp = rho.breakpoints();
    const auto& vals = rho.values();
    for (std::size_t k = 0; k < vals.size(); ++k) {
        const double lo = std::max(a, bp[k]);
        const double hi = std::min(b, bp[k + 1]);
        if (hi > lo) {
            total += cost.c(vals[k]) * (hi - lo);
            covered += hi - lo;
        }
    }
    total += cost.c(0.0) * ((b - a) - covered);
    return total;
}

ModelHypothesesReport check_hypotheses(const VelocityModel& velocity, const CostModel& cost,
                                       std::size_t samples) {
    ModelHypothesesReport rep;
    rep.h1 = rep.h1_strict = rep.h2 = rep.h2_prime = true;
    const double rho_max = velocity.rho_max();
    const double tol = 1e-12;

    // H1: c(0) = 1, c nondecreasing, c'' >= 0 (strict variant c'' > 0)
    bool reciprocal = cost.kind() == CostModel::Kind::reciprocal;
    if (std::abs(cost.c(0.0) - 1.0) > 1e-9) {
        rep.h1 = rep.h1_strict = false;
        rep.h1_violation = HypothesisSample{0.0, cost.c(0.0)};
        rep.h1_strict_violation = rep.h1_violation;
    }
    for (std::size_t i = 0; i <= samples; ++i) {
        double rho = rho_max * static_cast<double>(i) / static_cast<double>(samples);
        if (reciprocal && i == samples) rho = rho_max * (1.0 - 1e-9); // c undefined at rho_max
        const double dc = cost.dc(rho);
        const double ddc = cost.ddc(rho);
        if (rep.h1 && (dc < -tol || ddc < -tol)) {
            rep.h1 = false;
            rep.h1_violation = HypothesisSample{rho, ddc < -tol ? ddc : dc};
        }
        if (rep.h1_strict && !(ddc > 0.0)) {
            rep.h1_strict = false;
            rep.h1_strict_violation = HypothesisSample{rho, ddc};
        }
        if (!rep.h1 && !rep.h1_strict) break;
    }

    // H2: v strictly decreasing with the single-maximum flux condition
    if (!(velocity.v(0.0) > 0.0) || std::abs(velocity.v(rho_max)) > 1e-9) {
        rep.h2 = false;
        rep.h2_violation = HypothesisSample{rho_max, velocity.v(rho_max)};
    }
    double rho_hat = 0.0;
    bool have_hat = true;
    try {
        rho_hat = critical_density(velocity);
    } catch (const std::exception&) {
        have_hat = false;
        rep.h2 = false;
    }
    if (rep.h2 && have_hat) {
        for (std::size_t i = 0; i <= samples; ++i) {
            const double rho = rho_max * static_cast<double>(i) / static_cast<double>(samples);
            if (velocity.dv(rho) > -0.0) { // strictly decreasing
                rep.h2 = false;
                rep.h2_violation = HypothesisSample{rho, velocity.dv(rho)};
                break;
            }
            const double prod = (velocity.v(rho) + rho * velocity.dv(rho)) * (rho_hat - rho);
            if (rho > 0.0 && rho < rho_max && prod < -tol) {
                rep.h2 = false;
                rep.h2_violation = HypothesisSample{rho, prod};
                break;
            }
        }
    }

    // H2': additionally v' + rho v'' <= 0 everywhere
    rep.h2_prime = rep.h2;
    if (!rep.h2) rep.h2_prime_violation = rep.h2_violation;
    if (rep.h2_prime) {
        for (std::size_t i = 0; i <= samples; ++i) {
            const double rho = rho_max * static_cast<double>(i) / static_cast<double>(samples);
            const double g = velocity.dv(rho) + rho * velocity.ddv(rho);
            if (g > tol) {
                rep.h2_prime = false;
                rep.h2_prime_violation = HypothesisSample{rho, g};
                break;
            }
        }
    }
    return rep;
}

} // namespace hughes
