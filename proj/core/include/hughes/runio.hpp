#ifndef HUGHES_RUNIO_HPP
#define HUGHES_RUNIO_HPP

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "hughes/dpa.hpp"
#include "hughes/scenario.hpp"
#include "hughes/trace.hpp"
#include "hughes/wft.hpp"

namespace hughes::runio {

/// Shortest round-trip decimal representation (used for every CSV number so
/// identical runs produce identical bytes).
std::string format_double(double x);

struct RunManifest {
    std::string scenario_hash;
    std::string scheme;
    std::map<std::string, std::string> params;
    std::vector<std::string> files;
    double wall_clock_s = 0.0;
};

void write_manifest(const std::filesystem::path& dir, const RunManifest& manifest);

/// particles.csv, density.csv, turning.csv, events.csv, summary, manifest.txt
std::vector<std::string> write_dpa_run(const std::filesystem::path& dir, const Scenario& scenario,
                                       int n, const dpa::DpaTrajectory& traj);

/// fronts.csv, density.csv, turning.csv, events.csv, summary, manifest.txt
std::vector<std::string> write_wft_run(const std::filesystem::path& dir, const Scenario& scenario,
                                       int n, const wft::WftRunResult& result);

/// Rebuilds a SolutionTrace from a run directory (either scheme). One-sided
/// traces at the turning point are recovered from the density snapshots when
/// the turning file does not carry them.
SolutionTrace read_trace(const std::filesystem::path& dir);

std::map<std::string, std::string> read_summary(const std::filesystem::path& dir);

} // namespace hughes::runio

#endif
