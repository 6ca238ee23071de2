#ifndef HUGHES_SCENARIO_HPP
#define HUGHES_SCENARIO_HPP

#include <iosfwd>
#include <string>

#include "hughes/density.hpp"
#include "hughes/model.hpp"

namespace hughes {

enum class TurningKind { balance, particle, memory, relaxation };
enum class WftSpeedMode { rankine_hugoniot, entropy_flux };

/// Single input record for every run: constitutive models, initial density
/// supported in (-1, 1), horizon and per-scheme resolution parameters.
struct Scenario {
    std::string name = "custom";
    VelocityModel velocity = VelocityModel::linear();
    CostModel cost = CostModel::linear(1.0);
    PiecewiseConstantDensity initial;
    double horizon = 1.0;

    int dpa_n = 11;            // N = 2^dpa_n particles unless dpa_particles is set
    long dpa_particles = 0;    // explicit particle-count override (0 = use dpa_n)
    double dpa_perturb = 0.0;  // optional nudge applied to particles that start on the turning point
    double dpa_dt_factor = 0.2; // step bound as a fraction of the gap-relaxation time
    int wft_n = 10;
    WftSpeedMode wft_mode = WftSpeedMode::rankine_hugoniot;

    TurningKind turning_kind = TurningKind::balance;
    bool turning_kind_explicit = false; // set when a scenario file picked the operator
    double turning_delta = 1.0;        // memory
    double turning_epsilon = 0.01;     // relaxation

    double output_dt = 0.01; // snapshot cadence

    void validate() const; // throws std::invalid_argument on a broken record
};

/// The four simulation set-ups: v = 1 - rho, c = 1/v, rho_max = v_max = 1.
///   fig1: 0.6 on (-1,1)
///   fig2: 0.25 on (-1,0), 0.6 on (0,1)
///   fig3: 0.1 on (-1,0), 0.9 on (0,1)
///   fig4: 0.8 on (-0.8,-0.5), 0.6 on (-0.3,0.3), 0.9 on (0.4,0.75)
Scenario builtin_scenario(const std::string& name);
bool is_builtin_scenario(const std::string& name);

/// Plain-text key/value scenario files, `key = value` per line, '#' comments.
/// Unknown keys are rejected. See the README for the exact grammar.
Scenario parse_scenario(std::istream& in);
Scenario load_scenario_file(const std::string& path);
/// Resolves a CLI --scenario argument: builtin name or path to a file.
Scenario resolve_scenario(const std::string& name_or_path);

std::string serialize_scenario(const Scenario& s); // parseable round-trip
/// FNV-1a hash of the serialized record; used in run manifests.
std::string scenario_hash(const Scenario& s);

} // namespace hughes

#endif
