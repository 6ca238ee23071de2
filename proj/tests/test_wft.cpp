#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "hughes/errors.hpp"
#include "hughes/turning.hpp"
#include "hughes/wft.hpp"
#include "oracles.hpp"

using namespace hughes;
using namespace hughes::wft;
using riemann::Direction;

namespace {
const VelocityModel kLinearV = VelocityModel::linear();
const FluxModel kFlux = FluxModel::from_velocity(kLinearV);
}

TEST_CASE("grid construction and snapping") {
    const WftGrid grid = make_grid(kFlux, 2); // step 0.25
    CHECK(grid.eps == 0.25);
    CHECK(grid.values.size() == 5);
    CHECK(grid.snap(0.6) == 0.5);
    CHECK(grid.snap(0.7) == 0.75);
    CHECK(grid.snap(0.375) == 0.25); // exact tie rounds down
    CHECK(grid.snap(1.4) == 1.0);
    CHECK(grid.index_of(0.5) == 2);
    CHECK(grid.index_of(0.3) == -1);
}

TEST_CASE("datum discretization keeps breakpoints and the variation bound") {
    const WftGrid grid = make_grid(kFlux, 6);
    const auto fig4 = builtin_scenario("fig4").initial;
    const auto snapped = discretize_datum(fig4, grid);
    for (double v : snapped.values()) CHECK(grid.index_of(v) >= 0);
    CHECK(l1_distance(fig4, snapped, -1.0, 1.0) <= grid.eps * 2.0);

    // TV(c(datum^n)) <= TV(c(datum)) + c'(sup) eps
    const CostModel recip = CostModel::reciprocal(kLinearV);
    auto tv_cost = [&](const PiecewiseConstantDensity& rho) {
        double tv = 0.0;
        const auto& bp = rho.breakpoints();
        const auto& vals = rho.values();
        for (std::size_t j = 0; j < bp.size(); ++j) {
            const double l = (j == 0) ? 0.0 : vals[j - 1];
            const double r = (j == vals.size()) ? 0.0 : vals[j];
            tv += std::abs(recip.c(r) - recip.c(l));
        }
        return tv;
    };
    const double c1 = recip.dc(fig4.sup_norm());
    CHECK(tv_cost(snapped) <= tv_cost(fig4) + c1 * grid.eps + 1e-12);
}

TEST_CASE("front speeds") {
    const CostModel recip = CostModel::reciprocal(kLinearV);
    const auto rh = WftSpeedMode::rankine_hugoniot;
    CHECK(front_speed(kFlux, recip, 0.1, 0.9, Direction::rightward_flux, rh) ==
          doctest::Approx(0.0).epsilon(1e-15));
    CHECK(front_speed(kFlux, recip, 0.25, 0.5, Direction::rightward_flux, rh) ==
          doctest::Approx(0.25).epsilon(1e-14));
    // the entropy-flux ratio for rarefactions lies between the characteristics
    const auto q = WftSpeedMode::entropy_flux;
    const double s = front_speed(kFlux, recip, 0.9, 0.5, Direction::rightward_flux, q);
    CHECK(s >= kFlux.df(0.9) - 1e-12);
    CHECK(s <= kFlux.df(0.5) + 1e-12);
    // shocks use the chord even in entropy-flux mode
    CHECK(front_speed(kFlux, recip, 0.1, 0.9, Direction::rightward_flux, q) ==
          doctest::Approx(0.0).epsilon(1e-15));
    CHECK_THROWS_AS(
        front_speed(kFlux, CostModel::linear(1.0), 0.9, 0.5, Direction::rightward_flux, q),
        std::invalid_argument);
}

TEST_CASE("turning-curve speed for distinct traces") {
    CHECK(turning_speed(kFlux, 0.9, 0.1) == doctest::Approx(-0.225).epsilon(1e-14));
    CHECK(turning_speed(kFlux, 0.1, 0.9) == doctest::Approx(0.225).epsilon(1e-14));
    CHECK_THROWS_AS(turning_speed(kFlux, 0.4, 0.4), std::invalid_argument);
}

TEST_CASE("initial fronts of the even datum") {
    Scenario fig1 = builtin_scenario("fig1");
    Simulator sim(fig1.velocity, fig1.cost, 6, fig1.wft_mode);
    const auto datum = discretize_datum(fig1.initial, sim.grid());
    const FrontList list = sim.initial_fronts(datum);
    const Front& tf = list.turning();
    CHECK(tf.x == 0.0);
    CHECK(tf.left == 0.0);
    CHECK(tf.right == 0.0);
    // all other fronts start at the exits or flank the turning point
    for (const Front& f : list.fronts)
        CHECK((std::abs(f.x) == 1.0 || f.x == tf.x));
}

TEST_CASE("initial turning position of the uneven datum") {
    Scenario fig2 = builtin_scenario("fig2");
    Simulator sim(fig2.velocity, fig2.cost, 8, fig2.wft_mode);
    const auto datum = discretize_datum(fig2.initial, sim.grid());
    const FrontList list = sim.initial_fronts(datum);
    // the balance root of the snapped datum, within grid effects of 7/30
    CHECK(std::abs(list.turning().x - 7.0 / 30.0) < 0.02);
    CHECK(list.turning().x ==
          doctest::Approx(turning::balance_xi(datum, fig2.cost)).epsilon(1e-12));
}

TEST_CASE("approaching shocks merge into one") {
    Scenario s;
    s.velocity = kLinearV;
    s.cost = CostModel::linear(0.0);
    s.initial = PiecewiseConstantDensity({0.1, 0.3, 0.5}, {0.1, 0.5});
    s.horizon = 1.0;
    Simulator sim(s.velocity, s.cost, 6, s.wft_mode);
    FrontList list = sim.initial_fronts(discretize_datum(s.initial, sim.grid()));

    bool merged = false;
    for (int k = 0; k < 200 && !merged; ++k) {
        const auto events = sim.advance(list, 1.0);
        if (events.empty() && list.t >= 1.0) break;
        for (const TraceEvent& e : events)
            if (e.kind == EventKind::front_collision) merged = true;
    }
    CHECK(merged);
    // the survivor connects 0 to 0.5 with the chord speed v(0.5)
    bool found = false;
    for (const Front& f : list.fronts)
        if (f.kind == FrontKind::shock && f.left == 0.0 && f.right == 0.5 &&
            std::abs(f.speed - 0.5) < 1e-12)
            found = true;
    CHECK(found);
}

TEST_CASE("even datum run: symmetric, conservative, bounded") {
    Scenario fig1 = builtin_scenario("fig1");
    fig1.horizon = 1.0;
    fig1.output_dt = 0.05;
    const WftRunResult res = wft::run(fig1, 8);
    for (const TurningSample& u : res.trace.turning) CHECK(std::abs(u.xi) < 1e-12);
    const double m0 = res.trace.snapshots.front().rho.total_mass();
    for (const auto& sn : res.trace.snapshots) {
        CHECK(std::abs(sn.rho.total_mass() - m0) < 1e-12);
        CHECK(sn.rho.sup_norm() <= res.trace.snapshots.front().rho.sup_norm() + 1e-12);
    }
    CHECK(res.max_tv <= res.trace.tv_series.front() + 1e-9); // no new variation
    CHECK(res.trace.max_balance_residual <= 4.0 * std::ldexp(1.0, -8));
}

TEST_CASE("panic reduction matches classical front tracking on the half line") {
    Scenario fig2 = builtin_scenario("fig2");
    fig2.cost = CostModel::linear(0.0);
    const int n = 7;
    const WftRunResult res = wft::run(fig2, n);
    // reference: plain conservation law for the right half-datum
    const PiecewiseConstantDensity half({0.0, 1.0}, {0.6});
    const PiecewiseConstantDensity ref = oracles::classical_wft(half, kFlux, n, 1.0);
    const auto& mine = res.trace.snapshots.back().rho;
    CHECK(l1_distance(mine, ref, 0.0, 1.0) <= 2.0 * std::ldexp(1.0, -n));
}

TEST_CASE("opposed-crowd datum crosses the turning curve") {
    Scenario fig3 = builtin_scenario("fig3");
    fig3.horizon = 1.0;
    fig3.output_dt = 0.05;
    const WftRunResult res = wft::run(fig3, 8);
    CHECK(res.turning_interaction_count >= 1);
    CHECK(res.turning_crossing_count >= 1);
    const double m0 = res.trace.snapshots.front().rho.total_mass();
    for (const auto& sn : res.trace.snapshots)
        CHECK(std::abs(sn.rho.total_mass() - m0) < 1e-9);
}

TEST_CASE("front structure invariants on the four-block datum") {
    Scenario fig4 = builtin_scenario("fig4");
    fig4.horizon = 1.0;
    fig4.output_dt = 0.1;
    const WftRunResult res = wft::run(fig4, 7);
    const double eps_step = std::ldexp(1.0, -7) * kFlux.rho_max();
    for (const auto& [t, fronts] : res.front_snapshots) {
        std::size_t turning_at = fronts.size();
        int turning_count = 0;
        for (std::size_t i = 0; i < fronts.size(); ++i)
            if (fronts[i].kind == FrontKind::turning) {
                ++turning_count;
                turning_at = i;
            }
        CHECK(turning_count == 1);
        for (std::size_t i = 0; i + 1 < fronts.size(); ++i) CHECK(fronts[i].x <= fronts[i + 1].x);
        for (std::size_t i = 0; i < fronts.size(); ++i) {
            const Front& f = fronts[i];
            if (f.kind == FrontKind::turning) continue;
            CHECK(f.left != f.right);
            if (f.kind == FrontKind::rarefaction)
                CHECK(std::abs(f.right - f.left) <= 3.0 * eps_step + 1e-12);
            if (f.kind == FrontKind::shock) {
                // side by list order: the physical order at shared positions
                if (i > turning_at) CHECK(f.left < f.right); // +f side Lax
                else CHECK(f.left > f.right);                // -f side Lax
            }
        }
    }
}

TEST_CASE("entropy-flux speed mode runs the reciprocal scenarios") {
    Scenario fig2 = builtin_scenario("fig2");
    fig2.wft_mode = WftSpeedMode::entropy_flux;
    fig2.horizon = 0.5;
    const WftRunResult res = wft::run(fig2, 6);
    CHECK(res.trace.snapshots.size() > 1);

    Scenario bad = fig2;
    bad.cost = CostModel::linear(1.0);
    CHECK_THROWS_AS(wft::run(bad, 6), std::invalid_argument);
}

TEST_CASE("front count cap aborts oversized runs") {
    Scenario fig4 = builtin_scenario("fig4");
    Simulator sim(fig4.velocity, fig4.cost, 8, fig4.wft_mode);
    sim.front_cap = 100;
    FrontList list = sim.initial_fronts(discretize_datum(fig4.initial, sim.grid()));
    CHECK_THROWS_AS(
        [&] {
            for (int k = 0; k < 100000; ++k) sim.advance(list, 1.0);
        }(),
        invariant_error);
}
