#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "decum/hjb.hpp"
#include "decum/problem.hpp"

namespace decum {

// Everything a run needs, with the documented defaults. Scenario dimensions
// (c2_ratio, kappa) are lists; the runner takes their cross product, except
// that c2_ratio = 1 collapses to a single scenario because the running cost
// vanishes there.
struct RunConfig {
    MarketParams market;
    GompertzMakeham mortality;
    double rho = 0.05;
    double horizon = 15.0;
    double x0 = 100.0;
    double age0 = 60.0;
    double max_age = 100.0;
    double c1 = 6.5155;
    double annuity_rate = -1.0;  // negative: use market.r
    double target_mult = 1.75;
    double safety_mult = 0.5;
    std::vector<double> c2_ratios{0.5, 2.0 / 3.0, 0.75, 1.0};
    std::vector<double> kappas{0.25, 0.5, 0.75, 1.0};

    int n_interior = 200;    // key N
    double dt = 1.0 / 52.0;  // solver time step
    SolverConfig solver;

    int n_paths = 5000;
    std::uint64_t seed = 1;
    double dt_sim = 1.0 / 52.0;
    int threads = 1;
    int hist_bins = 50;

    std::string out_dir = "out";
    bool dump_paths = false;
    bool dump_grids = true;
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

inline double parse_double(const std::string& key, const std::string& value) {
    std::size_t used = 0;
    double x = 0.0;
    try {
        x = std::stod(value, &used);
    } catch (const std::exception&) {
        throw std::invalid_argument("config key '" + key + "': cannot parse '" + value +
                                    "' as a number");
    }
    if (used != value.size())
        throw std::invalid_argument("config key '" + key + "': trailing characters in '" +
                                    value + "'");
    return x;
}

inline long long parse_int(const std::string& key, const std::string& value) {
    const double x = parse_double(key, value);
    const long long n = static_cast<long long>(x);
    if (static_cast<double>(n) != x)
        throw std::invalid_argument("config key '" + key + "': '" + value +
                                    "' is not an integer");
    return n;
}

inline bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1") return true;
    if (value == "false" || value == "0") return false;
    throw std::invalid_argument("config key '" + key + "': expected true/false, got '" +
                                value + "'");
}

inline std::vector<double> parse_list(const std::string& key, const std::string& value) {
    std::vector<double> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty())
            throw std::invalid_argument("config key '" + key + "': empty list entry");
        out.push_back(parse_double(key, item));
    }
    if (out.empty())
        throw std::invalid_argument("config key '" + key + "': empty list");
    return out;
}

}  // namespace detail

// Apply one key = value pair. Shared by the config-file parser and the CLI's
// --set option, so both surfaces accept exactly the same keys.
inline void apply_override(RunConfig& cfg, const std::string& key, const std::string& raw) {
    using detail::parse_bool;
    using detail::parse_double;
    using detail::parse_int;
    using detail::parse_list;
    const std::string value = detail::trim(raw);
    if (key == "r") cfg.market.r = parse_double(key, value);
    else if (key == "mu") cfg.market.mu = parse_double(key, value);
    else if (key == "sigma") cfg.market.sigma = parse_double(key, value);
    else if (key == "rho") cfg.rho = parse_double(key, value);
    else if (key == "T") cfg.horizon = parse_double(key, value);
    else if (key == "x0") cfg.x0 = parse_double(key, value);
    else if (key == "age0") cfg.age0 = parse_double(key, value);
    else if (key == "Tm") cfg.max_age = parse_double(key, value);
    else if (key == "C1") cfg.c1 = parse_double(key, value);
    else if (key == "A") cfg.mortality.a = parse_double(key, value);
    else if (key == "B") cfg.mortality.b = parse_double(key, value);
    else if (key == "C") cfg.mortality.c = parse_double(key, value);
    else if (key == "annuity_rate") cfg.annuity_rate = parse_double(key, value);
    else if (key == "target_mult") cfg.target_mult = parse_double(key, value);
    else if (key == "safety_mult") cfg.safety_mult = parse_double(key, value);
    else if (key == "c2_ratio") cfg.c2_ratios = parse_list(key, value);
    else if (key == "kappa") cfg.kappas = parse_list(key, value);
    else if (key == "N") cfg.n_interior = static_cast<int>(parse_int(key, value));
    else if (key == "dt") cfg.dt = parse_double(key, value);
    else if (key == "residual_tol") cfg.solver.residual_tol = parse_double(key, value);
    else if (key == "policy_rel_tol") cfg.solver.policy_rel_tol = parse_double(key, value);
    else if (key == "max_policy_iters")
        cfg.solver.max_policy_iters = static_cast<int>(parse_int(key, value));
    else if (key == "y_min") cfg.solver.y_min = parse_double(key, value);
    else if (key == "y_max") cfg.solver.y_max = parse_double(key, value);
    else if (key == "n_paths") cfg.n_paths = static_cast<int>(parse_int(key, value));
    else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(parse_int(key, value));
    else if (key == "dt_sim") cfg.dt_sim = parse_double(key, value);
    else if (key == "threads") cfg.threads = static_cast<int>(parse_int(key, value));
    else if (key == "hist_bins") cfg.hist_bins = static_cast<int>(parse_int(key, value));
    else if (key == "out_dir") cfg.out_dir = value;
    else if (key == "dump_paths") cfg.dump_paths = parse_bool(key, value);
    else if (key == "dump_grids") cfg.dump_grids = parse_bool(key, value);
    else
        throw std::invalid_argument("unknown config key '" + key + "'");
}

// key = value lines; blank lines and everything after '#' are ignored.
inline RunConfig parse_config(std::istream& in) {
    RunConfig cfg;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(line_no) +
                                        ": expected key = value, got '" + line + "'");
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));
        if (key.empty())
            throw std::invalid_argument("config line " + std::to_string(line_no) +
                                        ": empty key");
        apply_override(cfg, key, value);
    }
    return cfg;
}

inline RunConfig load_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw std::invalid_argument("cannot open config file " + path.string());
    return parse_config(in);
}

inline double resolved_annuity_rate(const RunConfig& cfg) {
    return cfg.annuity_rate < 0.0 ? cfg.market.r : cfg.annuity_rate;
}

// Checks that do not depend on the scenario. Scenario-dependent ones (the x0
// band, c2 > 0) happen in make_problem / the runner.
inline void validate_config(const RunConfig& cfg) {
    if (!(cfg.n_paths >= 1))
        throw std::invalid_argument("n_paths must satisfy n_paths >= 1");
    if (!(cfg.dt_sim > 0.0 && cfg.dt_sim <= cfg.horizon))
        throw std::invalid_argument("dt_sim must satisfy 0 < dt_sim <= T");
    if (!(cfg.threads >= 0))
        throw std::invalid_argument("threads must satisfy threads >= 0");
    if (!(cfg.hist_bins >= 1))
        throw std::invalid_argument("hist_bins must satisfy hist_bins >= 1");
    if (cfg.c2_ratios.empty())
        throw std::invalid_argument("c2_ratio must contain at least one value");
    if (cfg.kappas.empty())
        throw std::invalid_argument("kappa must contain at least one value");
    for (double rat : cfg.c2_ratios)
        if (!(rat > 0.0 && rat <= 1.0))
            throw std::invalid_argument("c2_ratio entries must satisfy 0 < c2_ratio <= 1");
    for (double k : cfg.kappas)
        if (!(k >= 0.0))
            throw std::invalid_argument("kappa entries must satisfy kappa >= 0");
    if (!(cfg.solver.max_policy_iters >= 2))
        throw std::invalid_argument("max_policy_iters must satisfy max_policy_iters >= 2");
}

}  // namespace decum
