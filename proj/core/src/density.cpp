#include "hughes/density.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hughes {

PiecewiseConstantDensity::PiecewiseConstantDensity(std::vector<double> breakpoints,
                                                   std::vector<double> values)
    : breakpoints_(std::move(breakpoints)), values_(std::move(values)) {
    if (breakpoints_.empty() && values_.empty()) return;
    if (breakpoints_.size() != values_.size() + 1)
        throw std::invalid_argument("piecewise density: need one more breakpoint than values");
    for (std::size_t k = 0; k + 1 < breakpoints_.size(); ++k)
        if (!(breakpoints_[k] < breakpoints_[k + 1]))
            throw std::invalid_argument("piecewise density: breakpoints must be strictly increasing");
    for (double v : values_)
        if (!(v >= 0.0) || !std::isfinite(v))
            throw std::invalid_argument("piecewise density: values must be finite and nonnegative");
}

PiecewiseConstantDensity PiecewiseConstantDensity::uniform(double left, double right, double value) {
    return PiecewiseConstantDensity({left, right}, {value});
}

PiecewiseConstantDensity PiecewiseConstantDensity::from_blocks(
    const std::vector<std::array<double, 3>>& blocks) {
    std::vector<std::array<double, 3>> sorted = blocks;
    std::sort(sorted.begin(), sorted.end(),
              [](const auto& a, const auto& b) { return a[0] < b[0]; });
    std::vector<double> bp;
    std::vector<double> vals;
    for (const auto& blk : sorted) {
        const double l = blk[0], r = blk[1], v = blk[2];
        if (!(l < r)) throw std::invalid_argument("block: left must be < right");
        if (bp.empty()) {
            bp.push_back(l);
        } else if (l > bp.back()) { // gap between blocks carries zero
            vals.push_back(0.0);
            bp.push_back(l);
        } else if (l < bp.back()) {
            throw std::invalid_argument("blocks overlap");
        }
        vals.push_back(v);
        bp.push_back(r);
    }
    return PiecewiseConstantDensity(std::move(bp), std::move(vals));
}

double PiecewiseConstantDensity::value_at(double x) const {
    if (values_.empty()) return 0.0;
    if (x < breakpoints_.front() || x >= breakpoints_.back()) return 0.0;
    const auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), x);
    const auto k = static_cast<std::size_t>(it - breakpoints_.begin()) - 1;
    return values_[std::min(k, values_.size() - 1)];
}

double PiecewiseConstantDensity::limit_from_left(double x) const {
    if (values_.empty()) return 0.0;
    if (x <= breakpoints_.front() || x > breakpoints_.back()) return 0.0;
    const auto it = std::lower_bound(breakpoints_.begin(), breakpoints_.end(), x);
    std::size_t k = static_cast<std::size_t>(it - breakpoints_.begin());
    // value on the piece ending at (or containing) x from the left
    if (k == 0) return 0.0;
    return values_[k - 1];
}

double PiecewiseConstantDensity::mass(double a, double b) const {
    if (!(a <= b)) throw std::invalid_argument("mass: need a <= b");
    double total = 0.0;
    for (std::size_t k = 0; k < values_.size(); ++k) {
        const double lo = std::max(a, breakpoints_[k]);
        const double hi = std::min(b, breakpoints_[k + 1]);
        if (hi > lo) total += values_[k] * (hi - lo);
    }
    return total;
}

double PiecewiseConstantDensity::total_mass() const {
    double total = 0.0;
    for (std::size_t k = 0; k < values_.size(); ++k)
        total += values_[k] * (breakpoints_[k + 1] - breakpoints_[k]);
    return total;
}

double PiecewiseConstantDensity::sup_norm() const {
    double m = 0.0;
    for (double v : values_) m = std::max(m, v);
    return m;
}

double PiecewiseConstantDensity::total_variation(double a, double b) const {
    if (values_.empty()) return 0.0;
    double tv = 0.0;
    // jumps at breakpoints strictly inside (a, b); support edges jump to zero
    for (std::size_t k = 0; k < breakpoints_.size(); ++k) {
        const double x = breakpoints_[k];
        if (!(x > a && x < b)) continue;
        const double left = (k == 0) ? 0.0 : values_[k - 1];
        const double right = (k == values_.size()) ? 0.0 : values_[k];
        tv += std::abs(right - left);
    }
    return tv;
}

double PiecewiseConstantDensity::total_variation() const {
    if (values_.empty()) return 0.0;
    double tv = std::abs(values_.front()) + std::abs(values_.back());
    for (std::size_t k = 0; k + 1 < values_.size(); ++k)
        tv += std::abs(values_[k + 1] - values_[k]);
    return tv;
}

double PiecewiseConstantDensity::support_min() const {
    for (std::size_t k = 0; k < values_.size(); ++k)
        if (values_[k] > 0.0) return breakpoints_[k];
    throw std::invalid_argument("support_min: density vanishes identically");
}

double PiecewiseConstantDensity::support_max() const {
    for (std::size_t k = values_.size(); k-- > 0;)
        if (values_[k] > 0.0) return breakpoints_[k + 1];
    throw std::invalid_argument("support_max: density vanishes identically");
}

PiecewiseConstantDensity PiecewiseConstantDensity::reflected() const {
    if (values_.empty()) return {};
    std::vector<double> bp(breakpoints_.rbegin(), breakpoints_.rend());
    for (double& x : bp) x = -x;
    std::vector<double> vals(values_.rbegin(), values_.rend());
    return PiecewiseConstantDensity(std::move(bp), std::move(vals));
}

PiecewiseConstantDensity PiecewiseConstantDensity::canonicalized() const {
    if (values_.empty()) return {};
    std::vector<double> bp;
    std::vector<double> vals;
    bp.push_back(breakpoints_.front());
    for (std::size_t k = 0; k < values_.size(); ++k) {
        if (!vals.empty() && vals.back() == values_[k]) {
            bp.back() = breakpoints_[k + 1];
            continue;
        }
        vals.push_back(values_[k]);
        bp.push_back(breakpoints_[k + 1]);
    }
    // drop zero-valued edge pieces (they are implicit)
    while (!vals.empty() && vals.front() == 0.0) {
        vals.erase(vals.begin());
        bp.erase(bp.begin());
    }
    while (!vals.empty() && vals.back() == 0.0) {
        vals.pop_back();
        bp.pop_back();
    }
    if (vals.empty()) return {};
    return PiecewiseConstantDensity(std::move(bp), std::move(vals));
}

bool PiecewiseConstantDensity::reflection_symmetric() const {
    const auto a = canonicalized();
    const auto b = reflected().canonicalized();
    return a.breakpoints() == b.breakpoints() && a.values() == b.values();
}

double l1_distance(const PiecewiseConstantDensity& f, const PiecewiseConstantDensity& g,
                   double a, double b) {
    if (!(a <= b)) throw std::invalid_argument("l1_distance: need a <= b");
    std::vector<double> cuts{a, b};
    for (double x : f.breakpoints())
        if (x > a && x < b) cuts.push_back(x);
    for (double x : g.breakpoints())
        if (x > a && x < b) cuts.push_back(x);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    double dist = 0.0;
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
        const double mid = 0.5 * (cuts[k] + cuts[k + 1]);
        dist += std::abs(f.value_at(mid) - g.value_at(mid)) * (cuts[k + 1] - cuts[k]);
    }
    return dist;
}

PiecewiseConstantDensity combine(const std::vector<const PiecewiseConstantDensity*>& fs,
                                 const std::vector<double>& weights) {
    if (fs.size() != weights.size())
        throw std::invalid_argument("combine: one weight per function");
    std::vector<double> cuts;
    for (const auto* f : fs)
        cuts.insert(cuts.end(), f->breakpoints().begin(), f->breakpoints().end());
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    if (cuts.size() < 2) return {};
    std::vector<double> vals(cuts.size() - 1, 0.0);
    for (std::size_t i = 0; i < fs.size(); ++i)
        for (std::size_t k = 0; k + 1 < cuts.size(); ++k)
            vals[k] += weights[i] * fs[i]->value_at(0.5 * (cuts[k] + cuts[k + 1]));
    return PiecewiseConstantDensity(std::move(cuts), std::move(vals)).canonicalized();
}

} // namespace hughes
