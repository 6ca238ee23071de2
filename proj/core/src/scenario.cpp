#include "hughes/scenario.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace hughes {

void Scenario::validate() const {
    if (!(horizon > 0.0)) throw std::invalid_argument("scenario: horizon must be positive");
    if (dpa_n < 0 || dpa_n > 24) throw std::invalid_argument("scenario: dpa.n out of range");
    if (wft_n < 1 || wft_n > 20) throw std::invalid_argument("scenario: wft.n out of range");
    if (dpa_particles < 0) throw std::invalid_argument("scenario: dpa.N must be positive");
    if (!(output_dt > 0.0)) throw std::invalid_argument("scenario: output.dt must be positive");
    if (!(dpa_dt_factor > 0.0) || dpa_dt_factor > 1.0)
        throw std::invalid_argument("scenario: dpa.dt_factor must lie in (0, 1]");
    if (turning_kind == TurningKind::memory && !(turning_delta > 0.0))
        throw std::invalid_argument("scenario: turning.delta must be positive");
    if (turning_kind == TurningKind::relaxation && !(turning_epsilon > 0.0))
        throw std::invalid_argument("scenario: turning.epsilon must be positive");
    if (!initial.empty()) {
        const double rho_max = velocity.rho_max();
        for (double v : initial.values())
            if (v > rho_max + 1e-12)
                throw std::invalid_argument("scenario: initial density exceeds rho_max");
        if (initial.total_mass() > 0.0 &&
            (initial.support_min() < -1.0 || initial.support_max() > 1.0))
            throw std::invalid_argument("scenario: initial density must be supported in (-1, 1)");
    }
}

bool is_builtin_scenario(const std::string& name) {
    return name == "fig1" || name == "fig2" || name == "fig3" || name == "fig4";
}

Scenario builtin_scenario(const std::string& name) {
    Scenario s;
    s.name = name;
    s.velocity = VelocityModel::linear(1.0, 1.0);
    s.cost = CostModel::reciprocal(s.velocity);
    s.horizon = 1.0;
    s.dpa_n = 11;
    s.wft_n = 10;
    if (name == "fig1") {
        s.initial = PiecewiseConstantDensity::uniform(-1.0, 1.0, 0.6);
    } else if (name == "fig2") {
        s.initial = PiecewiseConstantDensity({-1.0, 0.0, 1.0}, {0.25, 0.6});
    } else if (name == "fig3") {
        s.initial = PiecewiseConstantDensity({-1.0, 0.0, 1.0}, {0.1, 0.9});
    } else if (name == "fig4") {
        s.initial = PiecewiseConstantDensity::from_blocks(
            {{{-0.8, -0.5, 0.8}}, {{-0.3, 0.3, 0.6}}, {{0.4, 0.75, 0.9}}});
    } else {
        throw std::invalid_argument("unknown builtin scenario: " + name);
    }
    return s;
}

namespace {

double parse_number(const std::string& text, const std::string& key) {
    std::size_t used = 0;
    double value = 0.0;
    try {
        value = std::stod(text, &used);
    } catch (const std::exception&) {
        throw std::invalid_argument("scenario: bad number for key " + key + ": '" + text + "'");
    }
    while (used < text.size() && std::isspace(static_cast<unsigned char>(text[used]))) ++used;
    if (used != text.size())
        throw std::invalid_argument("scenario: trailing junk for key " + key + ": '" + text + "'");
    return value;
}

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

PiecewiseConstantDensity parse_blocks(const std::string& text) {
    std::vector<std::array<double, 3>> blocks;
    std::stringstream list(text);
    std::string triple;
    while (std::getline(list, triple, ',')) {
        triple = trim(triple);
        if (triple.empty()) continue;
        std::istringstream ts(triple);
        std::array<double, 3> blk{};
        if (!(ts >> blk[0] >> blk[1] >> blk[2]))
            throw std::invalid_argument("scenario: initial.blocks triple malformed: '" + triple + "'");
        std::string rest;
        if (ts >> rest)
            throw std::invalid_argument("scenario: initial.blocks triple has extra tokens: '" + triple + "'");
        blocks.push_back(blk);
    }
    if (blocks.empty()) throw std::invalid_argument("scenario: initial.blocks is empty");
    return PiecewiseConstantDensity::from_blocks(blocks);
}

} // namespace

Scenario parse_scenario(std::istream& in) {
    Scenario s;
    s.name = "file";
    std::string velocity_kind = "linear";
    std::string cost_kind = "linear";
    double v_max = 1.0, rho_max = 1.0, alpha = 1.0;
    bool saw_blocks = false;

    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("scenario line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));

        if (key == "velocity.kind") {
            if (value != "linear")
                throw std::invalid_argument("scenario: velocity.kind must be 'linear' in files");
            velocity_kind = value;
        } else if (key == "velocity.v_max") {
            v_max = parse_number(value, key);
        } else if (key == "velocity.rho_max") {
            rho_max = parse_number(value, key);
        } else if (key == "cost.kind") {
            if (value != "linear" && value != "reciprocal")
                throw std::invalid_argument("scenario: cost.kind must be linear or reciprocal");
            cost_kind = value;
        } else if (key == "cost.alpha") {
            alpha = parse_number(value, key);
        } else if (key == "initial.blocks") {
            s.initial = parse_blocks(value);
            saw_blocks = true;
        } else if (key == "horizon") {
            s.horizon = parse_number(value, key);
        } else if (key == "dpa.n") {
            s.dpa_n = static_cast<int>(parse_number(value, key));
        } else if (key == "dpa.N") {
            s.dpa_particles = static_cast<long>(parse_number(value, key));
        } else if (key == "dpa.perturb") {
            s.dpa_perturb = parse_number(value, key);
        } else if (key == "dpa.dt_factor") {
            s.dpa_dt_factor = parse_number(value, key);
        } else if (key == "wft.n") {
            s.wft_n = static_cast<int>(parse_number(value, key));
        } else if (key == "wft.mode") {
            if (value == "rh") s.wft_mode = WftSpeedMode::rankine_hugoniot;
            else if (value == "q") s.wft_mode = WftSpeedMode::entropy_flux;
            else throw std::invalid_argument("scenario: wft.mode must be rh or q");
        } else if (key == "turning.kind") {
            if (value == "balance") s.turning_kind = TurningKind::balance;
            else if (value == "particle") s.turning_kind = TurningKind::particle;
            else if (value == "memory") s.turning_kind = TurningKind::memory;
            else if (value == "relaxation") s.turning_kind = TurningKind::relaxation;
            else throw std::invalid_argument("scenario: unknown turning.kind '" + value + "'");
            s.turning_kind_explicit = true;
        } else if (key == "turning.delta") {
            s.turning_delta = parse_number(value, key);
        } else if (key == "turning.epsilon") {
            s.turning_epsilon = parse_number(value, key);
        } else if (key == "output.dt") {
            s.output_dt = parse_number(value, key);
        } else {
            throw std::invalid_argument("scenario: unknown key '" + key + "'");
        }
    }
    (void)velocity_kind;
    s.velocity = VelocityModel::linear(v_max, rho_max);
    if (cost_kind == "linear") s.cost = CostModel::linear(alpha);
    else s.cost = CostModel::reciprocal(s.velocity);
    if (!saw_blocks) throw std::invalid_argument("scenario: initial.blocks is required");
    s.validate();
    return s;
}

Scenario load_scenario_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open scenario file: " + path);
    Scenario s = parse_scenario(in);
    s.name = path;
    return s;
}

Scenario resolve_scenario(const std::string& name_or_path) {
    if (is_builtin_scenario(name_or_path)) return builtin_scenario(name_or_path);
    return load_scenario_file(name_or_path);
}

namespace {

std::string format_full(double x) {
    std::array<char, 64> buf{};
    auto [p, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
    (void)ec;
    return std::string(buf.data(), p);
}

} // namespace

std::string serialize_scenario(const Scenario& s) {
    std::ostringstream os;
    os << "velocity.kind = linear\n";
    os << "velocity.v_max = " << format_full(s.velocity.v_max()) << "\n";
    os << "velocity.rho_max = " << format_full(s.velocity.rho_max()) << "\n";
    os << "cost.kind = "
       << (s.cost.kind() == CostModel::Kind::linear ? "linear" : "reciprocal") << "\n";
    if (s.cost.kind() == CostModel::Kind::linear)
        os << "cost.alpha = " << format_full(s.cost.alpha()) << "\n";
    os << "initial.blocks = ";
    bool first = true;
    const auto& bp = s.initial.breakpoints();
    const auto& vals = s.initial.values();
    for (std::size_t k = 0; k < vals.size(); ++k) {
        if (vals[k] == 0.0) continue;
        if (!first) os << ", ";
        os << format_full(bp[k]) << " " << format_full(bp[k + 1]) << " " << format_full(vals[k]);
        first = false;
    }
    os << "\n";
    os << "horizon = " << format_full(s.horizon) << "\n";
    os << "dpa.n = " << s.dpa_n << "\n";
    if (s.dpa_particles > 0) os << "dpa.N = " << s.dpa_particles << "\n";
    if (s.dpa_perturb != 0.0) os << "dpa.perturb = " << format_full(s.dpa_perturb) << "\n";
    if (s.dpa_dt_factor != 0.2)
        os << "dpa.dt_factor = " << format_full(s.dpa_dt_factor) << "\n";
    os << "wft.n = " << s.wft_n << "\n";
    os << "wft.mode = " << (s.wft_mode == WftSpeedMode::rankine_hugoniot ? "rh" : "q") << "\n";
    if (s.turning_kind_explicit) {
        const char* kind = "balance";
        switch (s.turning_kind) {
        case TurningKind::balance: kind = "balance"; break;
        case TurningKind::particle: kind = "particle"; break;
        case TurningKind::memory: kind = "memory"; break;
        case TurningKind::relaxation: kind = "relaxation"; break;
        }
        os << "turning.kind = " << kind << "\n";
        if (s.turning_kind == TurningKind::memory)
            os << "turning.delta = " << format_full(s.turning_delta) << "\n";
        if (s.turning_kind == TurningKind::relaxation)
            os << "turning.epsilon = " << format_full(s.turning_epsilon) << "\n";
    }
    os << "output.dt = " << format_full(s.output_dt) << "\n";
    return os.str();
}

std::string scenario_hash(const Scenario& s) {
    const std::string text = serialize_scenario(s);
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    std::ostringstream os;
    os << std::hex << h;
    return os.str();
}

} // namespace hughes
