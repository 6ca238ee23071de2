// Command-line front end: single runs, Riemann solutions, verification,
// cross-scheme comparison, alpha sweeps and convergence studies.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "hughes/dpa.hpp"
#include "hughes/errors.hpp"
#include "hughes/riemann.hpp"
#include "hughes/runio.hpp"
#include "hughes/scenario.hpp"
#include "hughes/turning.hpp"
#include "hughes/verify.hpp"
#include "hughes/wft.hpp"

namespace {

using namespace hughes;
namespace fs = std::filesystem;

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

CostModel make_cost(const std::string& kind, double alpha, const VelocityModel& velocity) {
    if (kind == "linear") return CostModel::linear(alpha);
    if (kind == "reciprocal") return CostModel::reciprocal(velocity);
    throw std::invalid_argument("cost kind must be linear or reciprocal");
}

void apply_overrides(Scenario& s, const std::string& cost_kind, double alpha, double horizon,
                     const std::string& turning_kind) {
    if (!cost_kind.empty()) s.cost = make_cost(cost_kind, alpha, s.velocity);
    if (horizon > 0.0) s.horizon = horizon;
    if (!turning_kind.empty()) {
        if (turning_kind == "balance") s.turning_kind = TurningKind::balance;
        else if (turning_kind == "particle") s.turning_kind = TurningKind::particle;
        else if (turning_kind == "memory") s.turning_kind = TurningKind::memory;
        else if (turning_kind == "relaxation") s.turning_kind = TurningKind::relaxation;
        else throw std::invalid_argument("unknown turning kind: " + turning_kind);
        s.turning_kind_explicit = true;
    }
}

int cmd_dpa(const std::string& scenario_arg, int n, const std::string& out_dir,
            const std::string& cost_kind, double alpha, double horizon,
            const std::string& turning_kind) {
    Scenario s = resolve_scenario(scenario_arg);
    apply_overrides(s, cost_kind, alpha, horizon, turning_kind);
    if (n > 0) s.dpa_n = n;
    const auto start = std::chrono::steady_clock::now();
    const dpa::DpaTrajectory traj = dpa::run(s, s.dpa_n);
    runio::write_dpa_run(out_dir, s, s.dpa_n, traj);
    std::cout << "scheme = dpa\nscenario = " << s.name << "\nn = " << s.dpa_n
              << "\nt_mic = " << (traj.t_mic ? runio::format_double(*traj.t_mic) : "unreached")
              << "\nevents = " << traj.trace.events.size()
              << "\nwall_clock_s = " << seconds_since(start) << "\nout = " << out_dir << "\n";
    return 0;
}

int cmd_wft(const std::string& scenario_arg, int n, const std::string& out_dir,
            const std::string& mode, const std::string& cost_kind, double alpha, double horizon) {
    Scenario s = resolve_scenario(scenario_arg);
    apply_overrides(s, cost_kind, alpha, horizon, "");
    if (n > 0) s.wft_n = n;
    if (mode == "rh") s.wft_mode = WftSpeedMode::rankine_hugoniot;
    else if (mode == "q") s.wft_mode = WftSpeedMode::entropy_flux;
    else if (!mode.empty()) throw std::invalid_argument("wft mode must be rh or q");
    const auto start = std::chrono::steady_clock::now();
    const wft::WftRunResult result = wft::run(s, s.wft_n);
    runio::write_wft_run(out_dir, s, s.wft_n, result);
    std::cout << "scheme = wft\nscenario = " << s.name << "\nn = " << s.wft_n
              << "\nmax_front_count = " << result.max_front_count << "\nmax_tv = "
              << runio::format_double(result.max_tv)
              << "\nturning_crossings = " << result.turning_crossing_count
              << "\nwall_clock_s = " << seconds_since(start) << "\nout = " << out_dir << "\n";
    return 0;
}

int cmd_riemann(double rho_l, double rho_r, const std::string& cost_kind, double alpha) {
    const VelocityModel velocity = VelocityModel::linear();
    const CostModel cost = make_cost(cost_kind, alpha, velocity);
    const FluxModel flux = FluxModel::from_velocity(velocity);
    const riemann::RiemannDatum datum{rho_l, rho_r};

    std::cout << "xi0 = " << runio::format_double(riemann::initial_turning_point(datum, cost))
              << "\n";
    const auto cls = riemann::classify_vacuum(datum, cost, flux);
    std::cout << "vacuum_class = "
              << (cls == riemann::VacuumClass::vacuum_or_equal_traces ? "vacuum_or_equal_traces"
                                                                      : "discontinuous_traces")
              << "\n";
    const riemann::TurningSolution sol = riemann::solve_turning_riemann(datum, cost, flux);
    const char* branch = "vacuum";
    switch (sol.classification) {
    case riemann::TurningClass::vacuum: branch = "vacuum"; break;
    case riemann::TurningClass::congested: branch = "congested"; break;
    case riemann::TurningClass::non_classical_left: branch = "non_classical_left"; break;
    case riemann::TurningClass::non_classical_right: branch = "non_classical_right"; break;
    }
    std::cout << "classification = " << branch << "\n";
    std::cout << "trace_left = " << runio::format_double(sol.trace_left) << "\n";
    std::cout << "trace_right = " << runio::format_double(sol.trace_right) << "\n";
    std::cout << "xi_dot = " << runio::format_double(sol.xi_dot) << "\n";
    if (sol.rho_m) std::cout << "rho_m = " << runio::format_double(*sol.rho_m) << "\n";
    std::cout << "rh_residual = " << runio::format_double(sol.rh_residual(flux)) << "\n";

    auto print_fan = [&](const char* name, const riemann::WaveFan& fan) {
        int idx = 0;
        for (const riemann::Wave& w : fan.waves) {
            const char* kind = w.kind == riemann::WaveKind::shock
                                   ? "shock"
                                   : (w.kind == riemann::WaveKind::rarefaction ? "rarefaction"
                                                                               : "contact_vacuum");
            std::cout << name << "." << idx << " = " << kind << " "
                      << runio::format_double(w.left) << " -> " << runio::format_double(w.right)
                      << " speeds [" << runio::format_double(w.speed_lo) << ", "
                      << runio::format_double(w.speed_hi) << "]\n";
            ++idx;
        }
    };
    print_fan("turning_wave_left", sol.left_waves);
    print_fan("turning_wave_right", sol.right_waves);
    print_fan("fan_at_minus1",
              riemann::lwr_riemann(flux, 0.0, rho_l, riemann::Direction::leftward_flux));
    if (sol.xi0 != 0.0)
        print_fan("fan_at_0", riemann::lwr_riemann(flux, rho_l, rho_r,
                                                   sol.xi0 < 0.0
                                                       ? riemann::Direction::rightward_flux
                                                       : riemann::Direction::leftward_flux));
    print_fan("fan_at_plus1",
              riemann::lwr_riemann(flux, rho_r, 0.0, riemann::Direction::rightward_flux));
    return 0;
}

int cmd_verify(const std::string& trace_dir, int k_sweep, const std::string& scenario_arg) {
    const SolutionTrace trace = runio::read_trace(trace_dir);
    Scenario s = resolve_scenario(scenario_arg.empty() ? "fig1" : scenario_arg);
    const FluxModel flux = FluxModel::from_velocity(s.velocity);

    bool ok = true;
    const double conservation = verify::check_conservation(trace);
    std::cout << "conservation_drift = " << runio::format_double(conservation) << "\n";
    if (conservation > 1e-9) ok = false;

    const double max_exceed =
        verify::check_max_principle(trace, trace.snapshots.front().rho);
    std::cout << "max_principle_excess = " << runio::format_double(max_exceed) << "\n";
    if (max_exceed > 1e-9) ok = false;

    try {
        const double rh = verify::check_rh_turning(trace, flux);
        std::cout << "rh_turning_residual = " << runio::format_double(rh) << "\n";
        if (rh > 1e-3) ok = false;
    } catch (const std::exception& e) {
        std::cout << "rh_turning_residual = skipped (" << e.what() << ")\n";
    }

    if (k_sweep > 0 && trace.snapshots.size() >= 2) {
        // hat functions placed away from the observed turning range
        double xi_lo = 1.0, xi_hi = -1.0;
        for (const TurningSample& tsmp : trace.turning) {
            xi_lo = std::min(xi_lo, tsmp.xi);
            xi_hi = std::max(xi_hi, tsmp.xi);
        }
        const double t0 = trace.snapshots.front().t;
        const double t1 = trace.snapshots.back().t;
        const double tc = 0.5 * (t0 + t1);
        const double tw = 0.4 * (t1 - t0);
        double min_residual = 0.0;
        for (int j = 0; j < 10; ++j) {
            const double xc = -0.95 + 1.9 * (j + 0.5) / 10.0;
            const double xw = 0.08;
            if (xc + xw > xi_lo - 0.05 && xc - xw < xi_hi + 0.05) continue;
            const verify::TestFunction phi = verify::TestFunction::hat(tc, xc, tw, xw);
            for (int ki = 0; ki < k_sweep; ++ki) {
                const double k = flux.rho_max() * ki / std::max(1, k_sweep - 1);
                min_residual =
                    std::min(min_residual, verify::entropy_residual(trace, flux, k, phi));
            }
        }
        std::cout << "entropy_min_residual = " << runio::format_double(min_residual) << "\n";
        if (min_residual < -1e-6) ok = false;
    }

    std::cout << "verdict = " << (ok ? "pass" : "fail") << "\n";
    return ok ? 0 : 1;
}

int cmd_compare(const std::string& dir_a, const std::string& dir_b, double t) {
    const SolutionTrace a = runio::read_trace(dir_a);
    const SolutionTrace b = runio::read_trace(dir_b);
    std::cout << "l1_distance = " << runio::format_double(verify::compare_traces(a, b, t))
              << "\n";
    return 0;
}

int cmd_sweep(const std::string& scenario_arg, const std::vector<double>& alphas, int n,
              double horizon, const std::string& out_dir) {
    Scenario s = resolve_scenario(scenario_arg);
    if (horizon > 0.0) s.horizon = horizon;
    const auto entries = dpa::sweep_alpha(s, alphas, n > 0 ? n : s.dpa_n);
    fs::create_directories(out_dir);
    std::ofstream out(fs::path(out_dir) / "sweep_alpha.csv", std::ios::binary);
    out << "alpha,t_mic\n";
    for (const auto& e : entries) {
        const std::string value =
            !e.error.empty() ? "error" : (e.t_mic ? runio::format_double(*e.t_mic) : "unreached");
        out << runio::format_double(e.alpha) << ',' << value << '\n';
        std::cout << "alpha " << runio::format_double(e.alpha) << " -> " << value;
        if (!e.error.empty()) std::cout << " (" << e.error << ")";
        std::cout << "\n";
    }
    return 0;
}

int cmd_converge(const std::string& scenario_arg, const std::string& scheme,
                 const std::vector<int>& levels, double t, const std::string& out_dir) {
    Scenario s = resolve_scenario(scenario_arg);
    const Scheme sch = scheme == "wft" ? Scheme::wft : Scheme::dpa;
    const auto rows = verify::convergence_study(s, sch, levels, t);
    fs::create_directories(out_dir);
    std::ofstream out(fs::path(out_dir) / "convergence.csv", std::ios::binary);
    out << "level_coarse,level_fine,l1\n";
    for (const auto& row : rows) {
        const std::string value = row.error.empty() ? runio::format_double(row.l1) : "error";
        out << row.level_coarse << ',' << row.level_fine << ',' << value << '\n';
        std::cout << "n " << row.level_coarse << " vs " << row.level_fine << " -> " << value
                  << "\n";
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"one-dimensional two-exit evacuation solver (particle and front tracking)"};
    app.require_subcommand(1);

    std::string scenario = "fig1", out_dir = "out", mode, cost_kind, turning_kind, scheme = "dpa";
    std::string trace_dir, dir_a, dir_b, scenario_for_verify;
    int n = 0, k_sweep = 0;
    double alpha = 1.0, horizon = -1.0, t = 1.0, rho_l = 0.0, rho_r = 0.0;
    long seed = 0; // reserved; the schemes are deterministic
    std::vector<double> alphas;
    std::vector<int> levels;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--scenario", scenario, "builtin name (fig1..fig4) or scenario file");
        cmd->add_option("--out", out_dir, "output directory");
        cmd->add_option("--seed", seed, "reserved (runs are deterministic)");
        cmd->add_option("--cost", cost_kind, "override cost kind: linear|reciprocal");
        cmd->add_option("--alpha", alpha, "alpha for the linear cost override");
        cmd->add_option("--horizon", horizon, "override the time horizon");
    };

    CLI::App* dpa_cmd = app.add_subcommand("dpa", "run the particle scheme");
    add_common(dpa_cmd);
    dpa_cmd->add_option("--n", n, "dyadic resolution (N = 2^n particles)");
    dpa_cmd->add_option("--turning", turning_kind, "balance|particle|memory|relaxation");

    CLI::App* wft_cmd = app.add_subcommand("wft", "run the front-tracking scheme");
    add_common(wft_cmd);
    wft_cmd->add_option("--n", n, "grid resolution (eps = 2^-n)");
    wft_cmd->add_option("--mode", mode, "rarefaction speeds: rh (default) or q");

    CLI::App* riemann_cmd = app.add_subcommand("riemann", "solve the two-state problem");
    riemann_cmd->add_option("--rhoL", rho_l, "left state")->required();
    riemann_cmd->add_option("--rhoR", rho_r, "right state")->required();
    riemann_cmd->add_option("--cost", cost_kind, "linear|reciprocal")->required();
    riemann_cmd->add_option("--alpha", alpha, "alpha for the linear cost");

    CLI::App* verify_cmd = app.add_subcommand("verify", "check a stored run");
    verify_cmd->add_option("--trace", trace_dir, "run directory")->required();
    verify_cmd->add_option("--k-sweep", k_sweep, "entropy check with this many constants");
    verify_cmd->add_option("--scenario", scenario_for_verify, "scenario used for the run");

    CLI::App* compare_cmd = app.add_subcommand("compare", "L1 distance of two stored runs");
    compare_cmd->add_option("--a", dir_a, "first run directory")->required();
    compare_cmd->add_option("--b", dir_b, "second run directory")->required();
    compare_cmd->add_option("--t", t, "comparison time");

    CLI::App* sweep_cmd = app.add_subcommand("sweep-alpha", "evacuation time against alpha");
    add_common(sweep_cmd);
    sweep_cmd->add_option("--alphas", alphas, "list of alpha values")->required();
    sweep_cmd->add_option("--n", n, "dyadic resolution");

    CLI::App* conv_cmd = app.add_subcommand("converge", "consecutive-level L1 differences");
    add_common(conv_cmd);
    conv_cmd->add_option("--scheme", scheme, "dpa|wft");
    conv_cmd->add_option("--levels", levels, "resolution levels")->required();
    conv_cmd->add_option("--t", t, "comparison time");

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand(dpa_cmd))
            return cmd_dpa(scenario, n, out_dir, cost_kind, alpha, horizon, turning_kind);
        if (app.got_subcommand(wft_cmd))
            return cmd_wft(scenario, n, out_dir, mode, cost_kind, alpha, horizon);
        if (app.got_subcommand(riemann_cmd)) return cmd_riemann(rho_l, rho_r, cost_kind, alpha);
        if (app.got_subcommand(verify_cmd))
            return cmd_verify(trace_dir, k_sweep, scenario_for_verify);
        if (app.got_subcommand(compare_cmd)) return cmd_compare(dir_a, dir_b, t);
        if (app.got_subcommand(sweep_cmd)) return cmd_sweep(scenario, alphas, n, horizon, out_dir);
        if (app.got_subcommand(conv_cmd)) return cmd_converge(scenario, scheme, levels, t, out_dir);
    } catch (const hughes::bracket_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        for (std::size_t i = 0; i < e.samples().size(); i += e.samples().size() / 8 + 1)
            std::cerr << "  residual(" << e.samples()[i].first << ") = " << e.samples()[i].second
                      << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
