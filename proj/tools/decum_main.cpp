#include <cstdint>
#include <exception>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "decum/config.hpp"
#include "decum/runner.hpp"

namespace {

decum::RunConfig build_config(const std::string& config_path,
                              const std::vector<std::string>& sets) {
    decum::RunConfig cfg;
    if (!config_path.empty()) cfg = decum::load_config_file(config_path);
    for (const auto& kv : sets) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("--set expects key=value, got '" + kv + "'");
        decum::apply_override(cfg, decum::detail::trim(kv.substr(0, eq)),
                              kv.substr(eq + 1));
    }
    return cfg;
}

std::vector<int> parse_n_list(const std::string& text) {
    std::vector<int> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ','))
        out.push_back(static_cast<int>(decum::detail::parse_int("--n", item)));
    if (out.size() < 2)
        throw std::invalid_argument("--n needs at least two grid sizes");
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "Optimal decumulation with a guaranteed final annuity: finite-difference "
        "solver, Monte Carlo simulator and scenario reports"};
    app.require_subcommand(1);

    std::string config_path;
    std::vector<std::string> sets;

    auto* run = app.add_subcommand("run", "solve and simulate the scenario matrix");
    run->add_option("--config", config_path, "config file (key = value lines)");
    run->add_option("--set", sets, "override one config key, e.g. --set rho=0.03")
        ->take_all();
    std::string out_dir;
    run->add_option("--out", out_dir, "output directory (default: out)");
    std::uint64_t seed = 0;
    auto* seed_opt = run->add_option("--seed", seed, "simulation seed");
    int n_paths = 0;
    auto* paths_opt = run->add_option("--paths", n_paths, "number of simulated paths");
    int threads = -1;
    auto* threads_opt =
        run->add_option("--threads", threads, "simulation threads (0 = all cores)");
    bool dump_paths = false;
    run->add_flag("--dump-paths", dump_paths, "write per-path series CSVs");
    bool no_grids = false;
    run->add_flag("--no-grids", no_grids, "skip the value/policy grid CSVs");
    bool quiet = false;
    run->add_flag("--quiet", quiet, "suppress progress output");

    auto* conv = app.add_subcommand(
        "convergence", "grid refinement report for one scenario");
    conv->add_option("--config", config_path, "config file (key = value lines)");
    conv->add_option("--set", sets, "override one config key")->take_all();
    std::string conv_out;
    conv->add_option("--out", conv_out, "output directory (default: out)");
    double ratio = 0.5, kappa = 0.5;
    conv->add_option("--ratio", ratio, "c2/c1 ratio of the studied scenario");
    conv->add_option("--kappa", kappa, "kappa of the studied scenario");
    std::string n_list = "100,200,400,800";
    conv->add_option("--n", n_list, "comma-separated interior node counts");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            auto cfg = build_config(config_path, sets);
            if (!out_dir.empty()) cfg.out_dir = out_dir;
            if (seed_opt->count()) cfg.seed = seed;
            if (paths_opt->count()) cfg.n_paths = n_paths;
            if (threads_opt->count()) cfg.threads = threads;
            if (dump_paths) cfg.dump_paths = true;
            if (no_grids) cfg.dump_grids = false;
            const auto result = decum::run_matrix(cfg, quiet ? nullptr : &std::cerr);
            if (!quiet) decum::print_summary(std::cout, result);
            std::cout << "wrote " << cfg.out_dir << "/summary.csv and manifest.json\n";
        } else {
            auto cfg = build_config(config_path, sets);
            if (!conv_out.empty()) cfg.out_dir = conv_out;
            const auto rows =
                decum::convergence_study(cfg, ratio, kappa, parse_n_list(n_list));
            const auto path = std::filesystem::path(cfg.out_dir) / "convergence.csv";
            decum::write_convergence_csv(path, rows);
            std::cout << "N,dz,value_at_start,diff,ratio\n";
            for (const auto& r : rows)
                std::cout << r.n_interior << ',' << decum::g17(r.dz) << ','
                          << decum::g17(r.value_at_start) << ',' << decum::g17(r.diff)
                          << ',' << decum::g17(r.ratio) << "\n";
            std::cout << "wrote " << path.string() << "\n";
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
