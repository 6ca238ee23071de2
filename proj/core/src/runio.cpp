#include "hughes/runio.hpp"

#include <array>
#include <charconv>
#include <chrono>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace hughes::runio {

namespace fs = std::filesystem;

std::string format_double(double x) {
    std::array<char, 64> buf{};
    auto [p, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
    (void)ec;
    return std::string(buf.data(), p);
}

namespace {

std::ofstream open_out(const fs::path& path) {
    std::ofstream out(path, std::ios::binary); // LF endings everywhere
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    return out;
}

void write_density_csv(const fs::path& dir, const SolutionTrace& trace) {
    std::ofstream out = open_out(dir / "density.csv");
    out << "t,left,right,rho\n";
    for (const DensitySnapshot& s : trace.snapshots) {
        const auto& bp = s.rho.breakpoints();
        const auto& vals = s.rho.values();
        for (std::size_t k = 0; k < vals.size(); ++k)
            out << format_double(s.t) << ',' << format_double(bp[k]) << ','
                << format_double(bp[k + 1]) << ',' << format_double(vals[k]) << '\n';
    }
}

void write_turning_csv(const fs::path& dir, const SolutionTrace& trace) {
    std::ofstream out = open_out(dir / "turning.csv");
    out << "t,zeta,rho_left,rho_right,jump\n";
    for (const TurningSample& s : trace.turning)
        out << format_double(s.t) << ',' << format_double(s.xi) << ','
            << format_double(s.trace_left) << ',' << format_double(s.trace_right) << ','
            << (s.at_event ? 1 : 0) << '\n';
}

void write_events_csv(const fs::path& dir, const SolutionTrace& trace) {
    std::ofstream out = open_out(dir / "events.csv");
    out << "t,kind,index,a,b\n";
    for (const TraceEvent& e : trace.events)
        out << format_double(e.t) << ',' << event_kind_name(e.kind) << ',' << e.index << ','
            << format_double(e.a) << ',' << format_double(e.b) << '\n';
}

void write_summary(const fs::path& dir, const std::map<std::string, std::string>& kv) {
    std::ofstream out = open_out(dir / "summary");
    for (const auto& [key, value] : kv) out << key << " = " << value << '\n';
}

long count_events(const SolutionTrace& trace, EventKind kind) {
    long n = 0;
    for (const TraceEvent& e : trace.events)
        if (e.kind == kind) ++n;
    return n;
}

} // namespace

void write_manifest(const fs::path& dir, const RunManifest& manifest) {
    std::ofstream out = open_out(dir / "manifest.txt");
    out << "scenario_hash = " << manifest.scenario_hash << '\n';
    out << "scheme = " << manifest.scheme << '\n';
    for (const auto& [key, value] : manifest.params) out << key << " = " << value << '\n';
    out << "wall_clock_s = " << format_double(manifest.wall_clock_s) << '\n';
    for (const std::string& f : manifest.files) out << "file = " << f << '\n';
}

std::vector<std::string> write_dpa_run(const fs::path& dir, const Scenario& scenario, int n,
                                       const dpa::DpaTrajectory& traj) {
    fs::create_directories(dir);
    {
        std::ofstream out = open_out(dir / "particles.csv");
        out << "t,i,x\n";
        for (std::size_t j = 0; j < traj.particle_snapshots.size(); ++j) {
            const double t = traj.trace.snapshots[j].t;
            const auto& xs = traj.particle_snapshots[j];
            for (std::size_t i = 0; i < xs.size(); ++i)
                out << format_double(t) << ',' << i << ',' << format_double(xs[i]) << '\n';
        }
    }
    write_density_csv(dir, traj.trace);
    write_turning_csv(dir, traj.trace);
    write_events_csv(dir, traj.trace);

    std::map<std::string, std::string> kv;
    kv["scheme"] = "dpa";
    kv["n"] = std::to_string(n);
    kv["particles"] = std::to_string(traj.particle_snapshots.empty()
                                         ? 0
                                         : traj.particle_snapshots.front().size());
    kv["m"] = format_double(traj.m);
    kv["t_mic"] = traj.t_mic ? format_double(*traj.t_mic) : "unreached";
    kv["zeta0"] = format_double(traj.zeta0);
    kv["datum_balance_root"] = format_double(traj.datum_balance_root);
    kv["zeta0_divergence"] = format_double(std::abs(traj.zeta0 - traj.datum_balance_root));
    kv["exits_left"] = std::to_string(count_events(traj.trace, EventKind::exit_left));
    kv["exits_right"] = std::to_string(count_events(traj.trace, EventKind::exit_right));
    kv["turning_jumps"] = std::to_string(count_events(traj.trace, EventKind::turning_jump));
    kv["direction_switches"] =
        std::to_string(count_events(traj.trace, EventKind::direction_switch));
    write_summary(dir, kv);

    RunManifest manifest;
    manifest.scenario_hash = scenario_hash(scenario);
    manifest.scheme = "dpa";
    manifest.params["n"] = std::to_string(n);
    manifest.files = {"particles.csv", "density.csv", "turning.csv", "events.csv", "summary"};
    write_manifest(dir, manifest);
    std::vector<std::string> files = manifest.files;
    files.push_back("manifest.txt");
    return files;
}

std::vector<std::string> write_wft_run(const fs::path& dir, const Scenario& scenario, int n,
                                       const wft::WftRunResult& result) {
    fs::create_directories(dir);
    {
        std::ofstream out = open_out(dir / "fronts.csv");
        out << "t,id,x,left,right,kind\n";
        for (const auto& [t, fronts] : result.front_snapshots) {
            for (const wft::Front& f : fronts) {
                const char* kind = f.kind == wft::FrontKind::shock
                                       ? "shock"
                                       : (f.kind == wft::FrontKind::rarefaction ? "rarefaction"
                                                                                : "turning");
                out << format_double(t) << ',' << f.id << ',' << format_double(f.x) << ','
                    << format_double(f.left) << ',' << format_double(f.right) << ',' << kind
                    << '\n';
            }
        }
    }
    write_density_csv(dir, result.trace);
    write_turning_csv(dir, result.trace);
    write_events_csv(dir, result.trace);

    std::map<std::string, std::string> kv;
    kv["scheme"] = "wft";
    kv["n"] = std::to_string(n);
    kv["max_front_count"] = std::to_string(result.max_front_count);
    kv["max_tv"] = format_double(result.max_tv);
    kv["max_balance_residual"] = format_double(result.trace.max_balance_residual);
    kv["collisions"] = std::to_string(result.collision_count);
    kv["turning_interactions"] = std::to_string(result.turning_interaction_count);
    kv["turning_crossings"] = std::to_string(result.turning_crossing_count);
    kv["t_evac"] =
        result.trace.evacuation_time ? format_double(*result.trace.evacuation_time) : "unreached";
    write_summary(dir, kv);

    RunManifest manifest;
    manifest.scenario_hash = scenario_hash(scenario);
    manifest.scheme = "wft";
    manifest.params["n"] = std::to_string(n);
    manifest.files = {"fronts.csv", "density.csv", "turning.csv", "events.csv", "summary"};
    write_manifest(dir, manifest);
    std::vector<std::string> files = manifest.files;
    files.push_back("manifest.txt");
    return files;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) cells.push_back(cell);
    return cells;
}

double to_double(const std::string& s) { return std::stod(s); }

} // namespace

std::map<std::string, std::string> read_summary(const fs::path& dir) {
    std::ifstream in(dir / "summary");
    if (!in) throw std::runtime_error("cannot open summary in " + dir.string());
    std::map<std::string, std::string> kv;
    std::string line;
    while (std::getline(in, line)) {
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        std::string key = line.substr(0, eq);
        std::string value = line.substr(eq + 1);
        while (!key.empty() && key.back() == ' ') key.pop_back();
        while (!value.empty() && value.front() == ' ') value.erase(value.begin());
        kv[key] = value;
    }
    return kv;
}

SolutionTrace read_trace(const fs::path& dir) {
    const auto summary = read_summary(dir);
    SolutionTrace trace;
    const auto scheme_it = summary.find("scheme");
    if (scheme_it == summary.end())
        throw std::runtime_error("summary lacks a scheme entry: " + dir.string());
    trace.scheme = scheme_it->second == "wft" ? Scheme::wft : Scheme::dpa;

    {
        std::ifstream in(dir / "density.csv");
        if (!in) throw std::runtime_error("cannot open density.csv in " + dir.string());
        std::string line;
        std::getline(in, line); // header
        double current_t = 0.0;
        bool have_snapshot = false;
        std::vector<double> bp;
        std::vector<double> vals;
        auto flush = [&]() {
            if (!have_snapshot) return;
            trace.snapshots.push_back(
                {current_t, PiecewiseConstantDensity(bp, vals)});
            bp.clear();
            vals.clear();
        };
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            const auto cells = split_csv_line(line);
            if (cells.size() != 4) throw std::runtime_error("density.csv: malformed row");
            const double t = to_double(cells[0]);
            const double left = to_double(cells[1]);
            const double right = to_double(cells[2]);
            const double rho = to_double(cells[3]);
            if (!have_snapshot || t != current_t) {
                flush();
                current_t = t;
                have_snapshot = true;
                bp.push_back(left);
            }
            if (bp.back() != left) { // gap between stored pieces carries zero
                vals.push_back(0.0);
                bp.push_back(left);
            }
            vals.push_back(rho);
            bp.push_back(right);
        }
        flush();
    }

    {
        std::ifstream in(dir / "turning.csv");
        if (!in) throw std::runtime_error("cannot open turning.csv in " + dir.string());
        std::string line;
        std::getline(in, line);
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            const auto cells = split_csv_line(line);
            if (cells.size() != 5) throw std::runtime_error("turning.csv: malformed row");
            TurningSample s;
            s.t = to_double(cells[0]);
            s.xi = to_double(cells[1]);
            s.trace_left = to_double(cells[2]);
            s.trace_right = to_double(cells[3]);
            s.at_event = cells[4] == "1";
            trace.turning.push_back(s);
        }
    }

    {
        std::ifstream in(dir / "events.csv");
        if (in) {
            std::string line;
            std::getline(in, line);
            while (std::getline(in, line)) {
                if (line.empty()) continue;
                const auto cells = split_csv_line(line);
                if (cells.size() != 5) throw std::runtime_error("events.csv: malformed row");
                TraceEvent e;
                e.t = to_double(cells[0]);
                e.kind = event_kind_from_name(cells[1]);
                e.index = std::stol(cells[2]);
                e.a = to_double(cells[3]);
                e.b = to_double(cells[4]);
                trace.events.push_back(e);
            }
        }
    }

    const auto evac = summary.find(trace.scheme == Scheme::wft ? "t_evac" : "t_mic");
    if (evac != summary.end() && evac->second != "unreached")
        trace.evacuation_time = to_double(evac->second);
    const auto residual = summary.find("max_balance_residual");
    if (residual != summary.end()) trace.max_balance_residual = to_double(residual->second);
    return trace;
}

} // namespace hughes::runio
