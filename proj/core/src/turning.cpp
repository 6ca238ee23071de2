#include "hughes/turning.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "hughes/errors.hpp"

namespace hughes::turning {

namespace {

// Root of a strictly increasing piecewise linear function. The per-piece
// formula (v1*x0 - v0*x1)/(v1 - v0) mirrors bitwise under reflection.
double increasing_pl_root(const std::vector<double>& xs, const std::vector<double>& vs) {
    if (xs.size() < 2) throw std::logic_error("balance root: degenerate node set");
    if (!(vs.front() < 0.0) || !(vs.back() > 0.0)) {
        if (vs.front() == 0.0) return xs.front();
        if (vs.back() == 0.0) return xs.back();
        throw std::logic_error("balance root: no sign change on [-1, 1]");
    }
    for (std::size_t k = 0; k + 1 < xs.size(); ++k) {
        const double v0 = vs[k], v1 = vs[k + 1];
        if (v0 == 0.0) return xs[k];
        if (v0 < 0.0 && v1 >= 0.0) {
            if (v1 == 0.0) return xs[k + 1];
            return (v1 * xs[k] - v0 * xs[k + 1]) / (v1 - v0);
        }
    }
    return xs.back();
}

} // namespace

BalanceFunction BalanceFunction::from_density(const PiecewiseConstantDensity& rho,
                                              const CostModel& cost) {
    std::vector<double> nodes{-1.0};
    for (double x : rho.breakpoints())
        if (x > -1.0 && x < 1.0) nodes.push_back(x);
    nodes.push_back(1.0);

    const std::size_t n = nodes.size();
    std::vector<double> cw(n - 1); // cost-weighted piece lengths
    for (std::size_t k = 0; k + 1 < n; ++k) {
        const double mid = 0.5 * (nodes[k] + nodes[k + 1]);
        cw[k] = cost.c(rho.value_at(mid)) * (nodes[k + 1] - nodes[k]);
    }
    // directional cumulative sums: L_j over pieces left of node j (left to
    // right), R_j over pieces right of node j (right to left)
    std::vector<double> left(n, 0.0), right(n, 0.0);
    for (std::size_t k = 1; k < n; ++k) left[k] = left[k - 1] + cw[k - 1];
    for (std::size_t k = n - 1; k-- > 0;) right[k] = right[k + 1] + cw[k];

    BalanceFunction b;
    b.nodes_ = std::move(nodes);
    b.values_.resize(n);
    for (std::size_t k = 0; k < n; ++k) b.values_[k] = left[k] - right[k];
    return b;
}

BalanceFunction BalanceFunction::from_particles(std::span<const double> positions, double m,
                                                double alpha) {
    if (!(m > 0.0)) throw std::invalid_argument("particle balance: m must be positive");
    const std::ptrdiff_t count = static_cast<std::ptrdiff_t>(positions.size());
    for (std::ptrdiff_t i = 0; i + 1 < count; ++i)
        if (!(positions[i] <= positions[i + 1]))
            throw std::invalid_argument("particle balance: positions must be sorted");

    // I_minus: first particle strictly right of -1; I_plus: last strictly left of 1
    std::ptrdiff_t i_minus = count;
    for (std::ptrdiff_t i = 0; i < count; ++i)
        if (positions[i] > -1.0) { i_minus = i; break; }
    std::ptrdiff_t i_plus = -1;
    for (std::ptrdiff_t i = count; i-- > 0;)
        if (positions[i] < 1.0) { i_plus = i; break; }

    BalanceFunction b;
    b.nodes_.push_back(-1.0);
    std::vector<std::ptrdiff_t> idx; // particle index per interior node
    for (std::ptrdiff_t i = 0; i < count; ++i)
        if (positions[i] > -1.0 && positions[i] < 1.0) {
            b.nodes_.push_back(positions[i]);
            idx.push_back(i);
        }
    b.nodes_.push_back(1.0);

    const bool inside = i_minus < count && i_plus >= i_minus && positions[i_minus] < 1.0 &&
                        positions[i_plus] > -1.0;
    // density of the gaps straddling the domain ends (zero when the adjacent
    // neighbour is the phantom at +-infinity)
    double r_left = 0.0, r_right = 0.0;
    if (inside && i_minus > 0) r_left = m / (positions[i_minus] - positions[i_minus - 1]);
    if (inside && i_plus + 1 < count) r_right = m / (positions[i_plus + 1] - positions[i_plus]);

    b.values_.resize(b.nodes_.size());
    // W(x) = Z_-(x) - Z_+(x); at particle x_k both mass integrals are exact
    // integer multiples of m, counted from I_minus and toward I_plus. The
    // endpoint nodes add the partial straddling-gap mass.
    const double inside_mass = inside ? m * static_cast<double>(i_plus - i_minus) : 0.0;
    b.values_.front() =
        -(2.0 + alpha * (inside_mass + (inside ? r_left * (positions[i_minus] + 1.0) : 0.0)));
    for (std::size_t j = 0; j < idx.size(); ++j) {
        const std::ptrdiff_t k = idx[j];
        const double x = positions[k];
        double w = 2.0 * x;
        if (inside && k > i_minus) w += alpha * m * static_cast<double>(k - i_minus);
        if (inside && k < i_plus) w -= alpha * m * static_cast<double>(i_plus - k);
        b.values_[j + 1] = w;
    }
    b.values_.back() =
        2.0 + alpha * (inside_mass + (inside ? r_right * (1.0 - positions[i_plus]) : 0.0));
    return b;
}

double BalanceFunction::eval(double x) const {
    if (x <= nodes_.front()) return values_.front();
    if (x >= nodes_.back()) return values_.back();
    const auto it = std::upper_bound(nodes_.begin(), nodes_.end(), x);
    const std::size_t k = static_cast<std::size_t>(it - nodes_.begin()) - 1;
    const double t = (x - nodes_[k]) / (nodes_[k + 1] - nodes_[k]);
    return values_[k] + t * (values_[k + 1] - values_[k]);
}

double BalanceFunction::root() const { return increasing_pl_root(nodes_, values_); }

double balance_xi(const PiecewiseConstantDensity& rho, const CostModel& cost) {
    return BalanceFunction::from_density(rho, cost).root();
}

double particle_zeta(std::span<const double> positions, double m, double alpha) {
    return BalanceFunction::from_particles(positions, m, alpha).root();
}

PiecewiseConstantDensity subjective_density(std::span<const DensitySnapshot> history,
                                            double delta, double t) {
    if (history.empty()) throw std::invalid_argument("memory operator: empty history");
    if (!(delta > 0.0)) throw std::invalid_argument("memory operator: delta must be positive");
    for (std::size_t k = 0; k + 1 < history.size(); ++k)
        if (!(history[k].t <= history[k + 1].t))
            throw std::invalid_argument("memory operator: history times must be nondecreasing");
    if (history.back().t > t)
        throw std::invalid_argument("memory operator: history extends past evaluation time");

    // weight of snapshot k active on [t_k, t_{k+1}):
    //   exp(-delta (t - t_{k+1})) - exp(-delta (t - t_k));
    // the first snapshot also covers s < t_0 with weight exp(-delta (t - t_0)).
    std::vector<const PiecewiseConstantDensity*> fs;
    std::vector<double> ws;
    for (std::size_t k = 0; k < history.size(); ++k) {
        const double t_lo = history[k].t;
        const double t_hi = (k + 1 < history.size()) ? history[k + 1].t : t;
        double w = std::exp(-delta * (t - t_hi)) - std::exp(-delta * (t - t_lo));
        if (k == 0) w += std::exp(-delta * (t - t_lo)); // prehistory
        if (w <= 0.0) continue;
        fs.push_back(&history[k].rho);
        ws.push_back(w);
    }
    return combine(fs, ws);
}

double memory_xi(std::span<const DensitySnapshot> history, double delta, const CostModel& cost,
                 double t) {
    return balance_xi(subjective_density(history, delta, t), cost);
}

double relaxation_xi_step(double xi, const PiecewiseConstantDensity& rho, double eps,
                          const CostModel& cost, double dt) {
    if (!(eps > 0.0)) throw std::invalid_argument("relaxation step: eps must be positive");
    if (!(dt > 0.0)) throw std::invalid_argument("relaxation step: dt must be positive");
    if (dt > eps) throw std::invalid_argument("relaxation step: stability requires dt <= eps");
    const double b = BalanceFunction::from_density(rho, cost).eval(xi);
    return xi - dt * b / eps;
}

double discrete_lipschitz(const TurningPath& path) {
    if (path.times.size() < 2 || path.times.size() != path.xi.size())
        throw std::invalid_argument("discrete_lipschitz: need at least two aligned samples");
    double lip = 0.0;
    for (std::size_t k = 0; k + 1 < path.times.size(); ++k) {
        const double t0 = path.times[k], t1 = path.times[k + 1];
        if (!(t1 > t0)) continue;
        bool skip = false;
        for (double tj : path.jump_times)
            if (tj >= t0 - 1e-12 && tj <= t1 + 1e-12) { skip = true; break; }
        if (skip) continue;
        lip = std::max(lip, std::abs(path.xi[k + 1] - path.xi[k]) / (t1 - t0));
    }
    return lip;
}

} // namespace hughes::turning
