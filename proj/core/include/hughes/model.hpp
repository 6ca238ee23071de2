#ifndef HUGHES_MODEL_HPP
#define HUGHES_MODEL_HPP

#include <functional>
#include <optional>
#include <string>

#include "hughes/density.hpp"

namespace hughes {

/// Speed law v(rho) on [0, rho_max]: strictly decreasing, v(0) = v_max > 0,
/// v(rho_max) = 0. The linear kind is v_max*(1 - rho/rho_max); custom kinds
/// supply the map together with its first two derivatives.
class VelocityModel {
public:
    static VelocityModel linear(double v_max = 1.0, double rho_max = 1.0);
    static VelocityModel custom(double v_max, double rho_max,
                                std::function<double(double)> v,
                                std::function<double(double)> dv,
                                std::function<double(double)> ddv);

    double v(double rho) const;
    double dv(double rho) const;
    double ddv(double rho) const;

    double v_max() const { return v_max_; }
    double rho_max() const { return rho_max_; }
    bool is_linear() const { return linear_; }

private:
    VelocityModel() = default;
    double v_max_ = 1.0;
    double rho_max_ = 1.0;
    bool linear_ = true;
    std::function<double(double)> v_, dv_, ddv_;
};

/// Running cost c(rho) >= 1 with c(0) = 1. Linear means 1 + alpha*rho;
/// reciprocal means 1/v(rho) (undefined at rho = rho_max).
class CostModel {
public:
    enum class Kind { linear, reciprocal, custom };

    static CostModel linear(double alpha);
    static CostModel reciprocal(const VelocityModel& velocity);
    static CostModel custom(std::function<double(double)> c,
                            std::function<double(double)> dc,
                            std::function<double(double)> ddc);

    double c(double rho) const;
    double dc(double rho) const;
    double ddc(double rho) const;

    Kind kind() const { return kind_; }
    double alpha() const { return alpha_; } // linear only
    const VelocityModel& velocity() const { return velocity_; } // reciprocal only

private:
    CostModel() = default;
    Kind kind_ = Kind::linear;
    double alpha_ = 0.0;
    VelocityModel velocity_ = VelocityModel::linear();
    std::function<double(double)> c_, dc_, ddc_;
};

/// Flux f(rho) = rho*v(rho) together with its cached critical density
/// rho_hat = argmax f, located by bisection on f' to 1e-12.
class FluxModel {
public:
    static FluxModel from_velocity(const VelocityModel& velocity);

    double f(double rho) const;   // rejects rho outside [0, rho_max]
    double df(double rho) const;  // v + rho v'
    double ddf(double rho) const; // 2 v' + rho v''
    double rho_hat() const { return rho_hat_; }

    const VelocityModel& velocity() const { return velocity_; }
    double rho_max() const { return velocity_.rho_max(); }
    double v_max() const { return velocity_.v_max(); }

    /// Verifies strict concavity of f on a sample grid; throws otherwise.
    void require_concave() const;

private:
    FluxModel() = default;
    VelocityModel velocity_ = VelocityModel::linear();
    double rho_hat_ = 0.5;
    mutable int concavity_checked_ = 0; // 0 unknown, 1 ok, -1 failed
};

double critical_density(const VelocityModel& velocity);

struct HypothesisSample {
    double rho;
    double value;
};

/// Structural hypotheses checked on a dense sample grid. `h1` uses the weak
/// convexity c'' >= 0; `h1_strict` additionally demands c'' > 0 everywhere.
/// Both are reported since existence statements use either variant.
struct ModelHypothesesReport {
    bool h1 = false;
    bool h1_strict = false;
    bool h2 = false;
    bool h2_prime = false;
    std::optional<HypothesisSample> h1_violation;
    std::optional<HypothesisSample> h1_strict_violation;
    std::optional<HypothesisSample> h2_violation;
    std::optional<HypothesisSample> h2_prime_violation;
    std::string summary() const;
};

ModelHypothesesReport check_hypotheses(const VelocityModel& velocity, const CostModel& cost,
                                       std::size_t samples = 10000);

/// Exact integral of c(rho(y)) over [a, b]; the implicit zero density
/// outside the support enters with weight c(0).
double density_cost_integral(const PiecewiseConstantDensity& rho, const CostModel& cost,
                             double a, double b);

} // namespace hughes

#endif
