#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "hughes/dpa.hpp"
#include "hughes/verify.hpp"
#include "hughes/wft.hpp"
#include "oracles.hpp"

using namespace hughes;
using verify::TestFunction;

namespace {
const VelocityModel kLinearV = VelocityModel::linear();
const FluxModel kFlux = FluxModel::from_velocity(kLinearV);

SolutionTrace tiny_trace(std::vector<DensitySnapshot> snapshots) {
    SolutionTrace trace;
    trace.snapshots = std::move(snapshots);
    for (const auto& s : trace.snapshots) trace.turning.push_back({s.t, 0.0, 0.0, 0.0, false});
    return trace;
}
} // namespace

TEST_CASE("conservation checker and its detector") {
    const auto block = PiecewiseConstantDensity::uniform(-0.5, 0.5, 0.6);
    CHECK(verify::check_conservation(tiny_trace({{0.0, block}, {1.0, block}})) == 0.0);

    const auto leaky = PiecewiseConstantDensity::uniform(-0.5, 0.5, 0.5);
    CHECK(verify::check_conservation(tiny_trace({{0.0, block}, {1.0, leaky}})) ==
          doctest::Approx(0.1).epsilon(1e-12));
}

TEST_CASE("maximum principle checker and its detector") {
    const auto block = PiecewiseConstantDensity::uniform(-0.5, 0.5, 0.6);
    CHECK(verify::check_max_principle(tiny_trace({{0.0, block}}), block) == 0.0);

    const auto spiked = PiecewiseConstantDensity({-0.5, 0.0, 0.5}, {0.6, 0.8});
    CHECK(verify::check_max_principle(tiny_trace({{0.0, block}, {1.0, spiked}}), block) ==
          doctest::Approx(0.2).epsilon(1e-12));
}

TEST_CASE("turning-curve jump condition checker") {
    // fabricated trace: traces (0.9, 0.1) moving at the wrong speed
    SolutionTrace bad;
    bad.snapshots = {{0.0, {}}, {1.0, {}}};
    for (int k = 0; k <= 10; ++k)
        bad.turning.push_back({0.1 * k, 0.05 * k, 0.9, 0.1, false});
    // true RH speed would be -0.225; the fabricated one is +0.5
    CHECK(verify::check_rh_turning(bad, kFlux) > 0.5);

    SolutionTrace good = bad;
    for (int k = 0; k <= 10; ++k) good.turning[k].xi = -0.225 * 0.1 * k;
    CHECK(verify::check_rh_turning(good, kFlux) < 1e-12);

    SolutionTrace short_trace;
    short_trace.turning = {{0.0, 0.0, 0.0, 0.0, false}};
    CHECK_THROWS_AS(verify::check_rh_turning(short_trace, kFlux), std::invalid_argument);
}

TEST_CASE("test functions validate and evaluate") {
    const TestFunction phi = TestFunction::hat(0.5, 0.0, 0.25, 0.25);
    phi.validate();
    CHECK(phi.eval(0.5, 0.0) == 1.0);
    CHECK(phi.eval(0.5, 0.25) == 0.0);
    CHECK(phi.eval(0.375, 0.125) == doctest::Approx(0.25).epsilon(1e-14));

    TestFunction bad = phi;
    bad.values[1][1] = -1.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("entropy residual separates admissible from fabricated traces") {
    // a stationary admissible profile: zero density everywhere
    {
        SolutionTrace trace = tiny_trace(
            {{0.0, {}}, {0.25, {}}, {0.5, {}}, {0.75, {}}, {1.0, {}}});
        const TestFunction phi = TestFunction::hat(0.5, 0.4, 0.3, 0.2);
        for (double k : {0.0, 0.25, 0.5}) {
            // |rho - k| = k is constant: residual reduces to the f(k) line term
            const double r = verify::entropy_residual(trace, kFlux, k, phi);
            CHECK(r >= -1e-12);
        }
    }
    // an admissible rightward shock (0, 0.8) away from the turning curve
    {
        SolutionTrace trace;
        const double s = kFlux.f(0.8) / 0.8; // chord speed 0.2
        for (int j = 0; j <= 20; ++j) {
            const double t = 0.05 * j;
            const double pos = 0.3 + s * t;
            trace.snapshots.push_back(
                {t, PiecewiseConstantDensity({pos, 0.99}, {0.8})});
            trace.turning.push_back({t, -0.9, 0.0, 0.0, false});
        }
        const TestFunction phi = TestFunction::hat(0.5, 0.4, 0.3, 0.15);
        double lowest = 0.0;
        for (int ki = 0; ki <= 16; ++ki)
            lowest = std::min(lowest,
                              verify::entropy_residual(trace, kFlux, ki / 16.0, phi));
        CHECK(lowest >= -1e-6);
    }
    // the same jump flipped (0.8 -> 0 moving as if it were a -f shock on
    // the +f side) violates the inequality for an intermediate k
    {
        SolutionTrace trace;
        for (int j = 0; j <= 20; ++j) {
            const double t = 0.05 * j;
            const double pos = 0.4; // 0.1 above 0.9 below, static: inadmissible
            trace.snapshots.push_back(
                {t, PiecewiseConstantDensity({0.05, pos, 0.95}, {0.8, 0.0})});
            trace.turning.push_back({t, -0.9, 0.0, 0.0, false});
        }
        const TestFunction phi = TestFunction::hat(0.5, 0.4, 0.3, 0.15);
        double lowest = 0.0;
        for (int ki = 0; ki <= 16; ++ki)
            lowest = std::min(lowest,
                              verify::entropy_residual(trace, kFlux, ki / 16.0, phi));
        CHECK(lowest < -1e-4);
    }
}

TEST_CASE("scenario hypothesis classification") {
    {
        const auto rep = verify::classify_hypotheses(builtin_scenario("fig1"));
        CHECK(rep.symmetric);
        CHECK(rep.tv_datum == 0.0);
        CHECK(!rep.small_bv_traces); // 3*0.6 + 2*(2.5 - 2) = 2.8 >= 2
    }
    {
        Scenario s = builtin_scenario("fig2");
        s.cost = CostModel::linear(1.0);
        const auto rep = verify::classify_hypotheses(s);
        CHECK(!rep.symmetric);
        CHECK(rep.constant_l == 0.0); // linear cost: L = 0
        CHECK(rep.constant_c == doctest::Approx(0.6).epsilon(1e-14)); // alpha * sup
        // (v_max/2) * 3 * 0.6 = 0.9 vs v(0.6) = 0.4: condition fails
        CHECK(!rep.small_bv_no_traces);
    }
    {
        Scenario s;
        s.velocity = kLinearV;
        s.cost = CostModel::linear(1.0);
        s.initial = PiecewiseConstantDensity::uniform(0.6, 0.9, 0.5);
        const auto rep = verify::classify_hypotheses(s);
        CHECK(rep.class_v_applicable);
        CHECK(rep.class_v); // L1 = 0.15 < 2, support outside [-0.075, 0.075]
        CHECK(rep.l1_datum == doctest::Approx(0.15).epsilon(1e-14));
    }
    {
        Scenario s;
        s.velocity = kLinearV;
        s.cost = CostModel::linear(1.0);
        s.initial = PiecewiseConstantDensity::uniform(-0.05, 0.9, 0.5);
        const auto rep = verify::classify_hypotheses(s);
        CHECK(!rep.class_v); // support touches the excluded core
    }
    {
        // a small datum satisfies the small-variation conditions
        Scenario s;
        s.velocity = kLinearV;
        s.cost = CostModel::linear(0.2);
        s.initial = PiecewiseConstantDensity::uniform(-0.4, 0.4, 0.1);
        const auto rep = verify::classify_hypotheses(s);
        CHECK(rep.small_bv_no_traces);
        CHECK(rep.small_bv_traces);
    }
    {
        // reciprocal cost at the jam density: the trace condition is undefined
        Scenario s;
        s.velocity = kLinearV;
        s.cost = CostModel::reciprocal(kLinearV);
        s.initial = PiecewiseConstantDensity::uniform(-0.4, 0.4, 1.0);
        const auto rep = verify::classify_hypotheses(s);
        CHECK(!rep.traces_defined);
    }
}

TEST_CASE("trace comparison") {
    Scenario fig1 = builtin_scenario("fig1");
    fig1.horizon = 0.4;
    fig1.output_dt = 0.1;
    const auto a = dpa::run(fig1, 6).trace;
    CHECK(verify::compare_traces(a, a, 0.3) == 0.0);
    const auto b = wft::run(fig1, 6).trace;
    CHECK(verify::compare_traces(a, b, 0.3) < 0.2);
    CHECK_THROWS_AS(verify::compare_traces(a, b, 25.0), std::invalid_argument);
}

TEST_CASE("convergence study runs and reports pairs") {
    Scenario fig2 = builtin_scenario("fig2");
    fig2.horizon = 0.3;
    fig2.output_dt = 0.1;
    const auto rows = verify::convergence_study(fig2, Scheme::dpa, {4, 5, 6}, 0.3);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].level_coarse == 4);
    CHECK(rows[1].level_fine == 6);
    for (const auto& row : rows) {
        CHECK(row.error.empty());
        CHECK(row.l1 > 0.0);
    }
    CHECK_THROWS_AS(verify::convergence_study(fig2, Scheme::dpa, {4}, 0.3),
                    std::invalid_argument);
}
