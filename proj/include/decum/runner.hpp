#pragma once

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iomanip>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"

#include "decum/analytics.hpp"
#include "decum/config.hpp"
#include "decum/csv.hpp"
#include "decum/hjb.hpp"
#include "decum/simulate.hpp"

namespace decum {

// Market quote the default mortality parameters are calibrated against: the
// continuous life annuity price per unit rate at age 60. A mismatch beyond
// the tolerance is flagged in the manifest (it signals inconsistent mortality
// or rate inputs, not a solver problem).
constexpr double kAnnuityQuoteAge0 = 15.348;
constexpr double kAnnuityQuoteTolerance = 0.02;

struct Scenario {
    double c2_ratio = 0.5;
    double kappa = 0.5;
    std::string key;
    bool fixed = false;  // c2 == c1: consumption is forced, kappa irrelevant
};

inline std::string scenario_key(double ratio, double kappa, bool fixed) {
    char buf[64];
    if (fixed)
        std::snprintf(buf, sizeof buf, "c2r%.4f", ratio);
    else
        std::snprintf(buf, sizeof buf, "c2r%.4f_k%.2f", ratio, kappa);
    return buf;
}

// Cross product of the configured ratio and kappa lists, with ratio = 1
// collapsed to one scenario (the running cost is identically zero there).
inline std::vector<Scenario> make_scenarios(const RunConfig& cfg) {
    std::vector<Scenario> out;
    bool have_fixed = false;
    for (double ratio : cfg.c2_ratios) {
        if (std::fabs(ratio - 1.0) < 1e-12) {
            if (!have_fixed)
                out.push_back({1.0, cfg.kappas.front(), scenario_key(1.0, 0.0, true), true});
            have_fixed = true;
        } else {
            for (double kappa : cfg.kappas)
                out.push_back({ratio, kappa, scenario_key(ratio, kappa, false), false});
        }
    }
    return out;
}

inline ProblemSpec make_problem(const RunConfig& cfg, const Scenario& sc) {
    ProblemSpec spec;
    spec.market = cfg.market;
    spec.mortality = cfg.mortality;
    spec.annuity_rate = resolved_annuity_rate(cfg);
    spec.plan.horizon = cfg.horizon;
    spec.plan.x0 = cfg.x0;
    spec.plan.age0 = cfg.age0;
    spec.plan.max_age = cfg.max_age;
    spec.plan.c1 = cfg.c1;
    spec.plan.c2 = sc.c2_ratio * cfg.c1;
    spec.plan.kappa = sc.fixed ? 0.0 : sc.kappa;
    spec.plan.rho = cfg.rho;
    spec.plan.target_mult = cfg.target_mult;
    spec.plan.safety_mult = cfg.safety_mult;
    spec.finalize();

    const double lo = safety_curve(spec, 0.0);
    const double hi = target_curve(spec, 0.0);
    if (cfg.x0 < lo || cfg.x0 > hi)
        throw std::invalid_argument(
            "x0 must lie in [safety_curve(0), target_curve(0)] = [" + std::to_string(lo) +
            ", " + std::to_string(hi) + "] for scenario " + sc.key + " (x0 = " +
            std::to_string(cfg.x0) + ")");
    return spec;
}

struct ScenarioResult {
    Scenario sc;
    SolveStats stats;
    SummaryStats summary;
    Histogram hist;
    double z0 = 0.0;
    double value_at_start = 0.0;
};

struct MatrixResult {
    std::vector<ScenarioResult> scenarios;
    double annuity_at_age0 = 0.0;
    double annuity_reference = kAnnuityQuoteAge0;
    bool calibration_ok = false;
};

namespace detail {

inline void write_percentiles(const std::filesystem::path& path, const PercentileSeries& s) {
    std::vector<std::vector<std::string>> rows;
    rows.reserve(s.t.size());
    for (std::size_t k = 0; k < s.t.size(); ++k) {
        std::vector<std::string> row{g17(s.t[k])};
        for (std::size_t lev = 0; lev < s.levels.size(); ++lev)
            row.push_back(g17(s.q[lev][k]));
        rows.push_back(std::move(row));
    }
    write_csv(path, {"t", "q05", "q25", "q50", "q75", "q95"}, rows);
}

inline void write_histogram(const std::filesystem::path& path, const Histogram& h) {
    std::vector<std::vector<std::string>> rows;
    rows.push_back({"atom", g17(h.lo), std::to_string(h.atom)});
    for (std::size_t b = 0; b < h.counts.size(); ++b)
        rows.push_back({"bin", g17(h.lo + b * h.width), std::to_string(h.counts[b])});
    write_csv(path, {"kind", "left", "count"}, rows);
}

inline const char* absorption_name(Absorption a) {
    switch (a) {
        case Absorption::safety: return "safety";
        case Absorption::target: return "target";
        default: return "none";
    }
}

inline void write_paths(const std::filesystem::path& dir,
                        const std::vector<PathResult>& paths, const ProblemSpec& spec) {
    const int n = static_cast<int>(paths.front().invest.size());
    const DiscountTable tab(spec, n, spec.plan.horizon / n);
    {
        auto out = open_out(dir / "paths_index.csv");
        out << "path,absorbed,absorption_time,terminal_wealth,final_annuity,"
               "present_value,loss\n";
        for (std::size_t p = 0; p < paths.size(); ++p) {
            const auto& pr = paths[p];
            out << p << ',' << absorption_name(pr.absorbed) << ','
                << (std::isnan(pr.absorption_time) ? std::string()
                                                   : g17(pr.absorption_time))
                << ',' << g17(pr.terminal_wealth) << ',' << g17(final_annuity(pr, spec))
                << ',' << g17(present_value(pr, spec, tab)) << ','
                << g17(realized_loss(pr, spec, tab)) << '\n';
        }
    }
    {
        auto out = open_out(dir / "paths.csv");
        out << "path,t,wealth,invest,consume\n";
        const double h = spec.plan.horizon / n;
        for (std::size_t p = 0; p < paths.size(); ++p) {
            const auto& pr = paths[p];
            for (int k = 0; k <= n; ++k) {
                const double t = (k == n) ? spec.plan.horizon : k * h;
                out << p << ',' << g17(t) << ',' << g17(pr.wealth[k]);
                if (k < n)
                    out << ',' << g17(pr.invest[k]) << ',' << g17(pr.consume[k]) << '\n';
                else
                    out << ",,\n";
            }
        }
    }
}

inline std::vector<std::pair<std::string, double>> summary_rows(const SummaryStats& s) {
    return {{"mean_final_annuity", s.mean_final_annuity},
            {"sd_final_annuity", s.sd_final_annuity},
            {"mean_present_value", s.mean_present_value},
            {"sd_present_value", s.sd_present_value},
            {"prob_annuity_above_c1", s.prob_annuity_above_c1},
            {"prob_annuity_at_floor", s.prob_annuity_at_floor},
            {"mean_consumption", s.mean_consumption}};
}

}  // namespace detail

// Solve, simulate and analyze every scenario, writing per-scenario files and
// the combined summary/manifest under cfg.out_dir. Deterministic: identical
// configs (any thread count) produce byte-identical files.
inline MatrixResult run_matrix(const RunConfig& cfg, std::ostream* log = nullptr) {
    validate_config(cfg);
    const std::filesystem::path root(cfg.out_dir);
    std::filesystem::create_directories(root);

    MatrixResult out;
    out.annuity_at_age0 = annuity_value(cfg.mortality, cfg.age0, resolved_annuity_rate(cfg),
                                        cfg.max_age);
    out.calibration_ok = std::fabs(out.annuity_at_age0 - kAnnuityQuoteAge0) <=
                         kAnnuityQuoteTolerance * kAnnuityQuoteAge0;

    const auto scenarios = make_scenarios(cfg);
    for (const auto& sc : scenarios) {
        const auto spec = make_problem(cfg, sc);
        const auto grid = Grid::make(spec, cfg.n_interior, cfg.dt);
        const HjbSolver solver(spec, grid, cfg.solver);
        auto solved = solver.solve();

        PathConfig pc;
        pc.n_paths = cfg.n_paths;
        pc.seed = cfg.seed;
        pc.dt = cfg.dt_sim;
        pc.threads = cfg.threads;
        const auto paths = simulate_paths(solved.solution, spec, pc);

        ScenarioResult res;
        res.sc = sc;
        res.stats = std::move(solved.stats);
        res.summary = summarize(paths, spec);
        res.hist = annuity_histogram(paths, spec, cfg.hist_bins);
        res.z0 = to_z(spec, 0.0, cfg.x0);
        res.value_at_start = value_lookup(solved.solution, spec, 0.0, cfg.x0);

        const auto dir = root / sc.key;
        if (cfg.dump_grids) {
            write_grid_csv(dir / "value.csv", solved.solution, solved.solution.value);
            write_grid_csv(dir / "invest.csv", solved.solution, solved.solution.invest);
            write_grid_csv(dir / "consume.csv", solved.solution, solved.solution.consume);
        }
        detail::write_percentiles(dir / "wealth_percentiles.csv",
                                  percentiles(paths, spec, PathField::wealth));
        detail::write_percentiles(dir / "invest_percentiles.csv",
                                  percentiles(paths, spec, PathField::invest));
        detail::write_histogram(dir / "histogram.csv", res.hist);
        if (cfg.dump_paths) detail::write_paths(dir, paths, spec);

        if (log)
            *log << sc.key << ": value_at_start " << res.value_at_start << ", mean annuity "
                 << res.summary.mean_final_annuity << ", policy iters "
                 << res.stats.max_iterations << ", stability "
                 << (res.stats.stability_ok ? "ok" : "violated") << "\n";
        out.scenarios.push_back(std::move(res));
    }

    // combined summary: one column per scenario, one row per statistic
    {
        std::vector<std::string> header{"statistic"};
        for (const auto& r : out.scenarios) header.push_back(r.sc.key);
        std::vector<std::vector<std::string>> rows;
        const auto names = detail::summary_rows(out.scenarios.front().summary);
        for (std::size_t row = 0; row < names.size(); ++row) {
            std::vector<std::string> line{names[row].first};
            for (const auto& r : out.scenarios)
                line.push_back(g17(detail::summary_rows(r.summary)[row].second));
            rows.push_back(std::move(line));
        }
        write_csv(root / "summary.csv", header, rows);
    }

    // manifest: parameters, calibration, per-scenario diagnostics; no
    // timestamps or machine state, so reruns are byte-identical
    {
        nlohmann::ordered_json j;
        j["parameters"] = {
            {"r", cfg.market.r},         {"mu", cfg.market.mu},
            {"sigma", cfg.market.sigma}, {"rho", cfg.rho},
            {"T", cfg.horizon},          {"x0", cfg.x0},
            {"age0", cfg.age0},          {"Tm", cfg.max_age},
            {"C1", cfg.c1},              {"A", cfg.mortality.a},
            {"B", cfg.mortality.b},      {"C", cfg.mortality.c},
            {"annuity_rate", resolved_annuity_rate(cfg)},
            {"target_mult", cfg.target_mult},
            {"safety_mult", cfg.safety_mult},
            {"N", cfg.n_interior},       {"dt", cfg.dt},
            {"n_paths", cfg.n_paths},    {"seed", cfg.seed},
            {"dt_sim", cfg.dt_sim},      {"hist_bins", cfg.hist_bins}};
        j["annuity_calibration"] = {{"value", out.annuity_at_age0},
                                    {"reference", out.annuity_reference},
                                    {"relative_error",
                                     std::fabs(out.annuity_at_age0 - out.annuity_reference) /
                                         out.annuity_reference},
                                    {"ok", out.calibration_ok}};
        j["scenarios"] = nlohmann::ordered_json::array();
        for (const auto& r : out.scenarios) {
            nlohmann::ordered_json s;
            s["key"] = r.sc.key;
            s["c2_ratio"] = r.sc.c2_ratio;
            s["c2"] = r.sc.c2_ratio * cfg.c1;
            s["kappa"] = r.sc.fixed ? 0.0 : r.sc.kappa;
            s["stability"] = {{"sup_value", r.stats.sup_value},
                              {"bound", r.stats.stability_bound},
                              {"ok", r.stats.stability_ok}};
            s["solver"] = {{"max_policy_iterations", r.stats.max_iterations},
                           {"max_residual", r.stats.max_residual}};
            s["z0"] = r.z0;
            s["value_at_start"] = r.value_at_start;
            auto& sum = s["summary"] = nlohmann::ordered_json::object();
            for (const auto& [name, v] : detail::summary_rows(r.summary)) sum[name] = v;
            j["scenarios"].push_back(std::move(s));
        }
        auto outj = open_out(root / "manifest.json");
        outj << j.dump(2) << '\n';
    }
    return out;
}

struct ConvergenceRow {
    int n_interior = 0;
    double dz = 0.0;
    double value_at_start = 0.0;
    double diff = 0.0;   // previous minus this (0 for the first row)
    double ratio = 0.0;  // previous diff over this diff (0 for the first two)
};

// Value at (0, x0) for a ladder of spatial resolutions, same scenario. The
// diff ratios sit near 2 when the scheme converges at first order in dz.
inline std::vector<ConvergenceRow> convergence_study(const RunConfig& cfg, double c2_ratio,
                                                     double kappa,
                                                     const std::vector<int>& ns) {
    Scenario sc{c2_ratio, kappa, scenario_key(c2_ratio, kappa, false), false};
    if (std::fabs(c2_ratio - 1.0) < 1e-12) {
        sc.fixed = true;
        sc.key = scenario_key(1.0, 0.0, true);
    }
    const auto spec = make_problem(cfg, sc);
    std::vector<ConvergenceRow> rows;
    for (int n : ns) {
        const auto grid = Grid::make(spec, n, cfg.dt);
        const HjbSolver solver(spec, grid, cfg.solver);
        const auto solved = solver.solve();
        ConvergenceRow row;
        row.n_interior = n;
        row.dz = grid.dz();
        row.value_at_start = value_lookup(solved.solution, spec, 0.0, cfg.x0);
        if (!rows.empty()) {
            row.diff = rows.back().value_at_start - row.value_at_start;
            if (rows.size() > 1 && row.diff != 0.0)
                row.ratio = rows.back().diff / row.diff;
        }
        rows.push_back(row);
    }
    return rows;
}

inline void write_convergence_csv(const std::filesystem::path& path,
                                  const std::vector<ConvergenceRow>& rows) {
    std::vector<std::vector<std::string>> body;
    for (const auto& r : rows)
        body.push_back({std::to_string(r.n_interior), g17(r.dz), g17(r.value_at_start),
                        g17(r.diff), g17(r.ratio)});
    write_csv(path, {"N", "dz", "value_at_start", "diff", "ratio"}, body);
}

inline void print_summary(std::ostream& os, const MatrixResult& m) {
    os << "annuity calibration: value " << m.annuity_at_age0 << ", reference "
       << m.annuity_reference << (m.calibration_ok ? " (ok)" : " (MISMATCH)") << "\n";
    os << std::left << std::setw(18) << "scenario" << std::right << std::setw(10)
       << "mean FA" << std::setw(9) << "sd FA" << std::setw(10) << "mean PV" << std::setw(9)
       << "sd PV" << std::setw(9) << "P(>C1)" << std::setw(9) << "P(floor)" << std::setw(10)
       << "mean c" << std::setw(7) << "stab" << "\n";
    const auto pct = [](double p) {
        char buf[16];
        std::snprintf(buf, sizeof buf, "%.2f%%", 100.0 * p);
        return std::string(buf);
    };
    const auto num = [](double x, int prec) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.*f", prec, x);
        return std::string(buf);
    };
    for (const auto& r : m.scenarios) {
        os << std::left << std::setw(18) << r.sc.key << std::right << std::setw(10)
           << num(r.summary.mean_final_annuity, 3) << std::setw(9)
           << num(r.summary.sd_final_annuity, 3) << std::setw(10)
           << num(r.summary.mean_present_value, 2) << std::setw(9)
           << num(r.summary.sd_present_value, 2) << std::setw(9)
           << pct(r.summary.prob_annuity_above_c1) << std::setw(9)
           << pct(r.summary.prob_annuity_at_floor) << std::setw(10)
           << num(r.summary.mean_consumption, 4) << std::setw(7)
           << (r.stats.stability_ok ? "ok" : "viol") << "\n";
    }
}

}  // namespace decum
