#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "decum/runner.hpp"

namespace fs = std::filesystem;

namespace {

decum::RunConfig small_config(const std::string& out_dir) {
    decum::RunConfig cfg;
    cfg.c2_ratios = {0.5, 1.0};
    cfg.kappas = {0.5};
    cfg.n_interior = 40;
    cfg.dt = 1.0 / 12.0;
    cfg.n_paths = 300;
    cfg.out_dir = out_dir;
    return cfg;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("matrix run writes the documented files and a parsable manifest") {
    const auto cfg = small_config("runner_out_a");
    const auto res = decum::run_matrix(cfg);

    REQUIRE(res.scenarios.size() == 2);
    CHECK(res.calibration_ok);
    CHECK(res.scenarios[0].sc.key == "c2r0.5000_k0.50");
    CHECK(res.scenarios[1].sc.key == "c2r1.0000");
    for (const auto& r : res.scenarios) {
        CHECK(r.summary.n_paths == 300);
        CHECK(r.stats.max_residual <= 1e-6);
        CHECK(r.value_at_start >= 0.0);
    }

    const fs::path root(cfg.out_dir);
    for (const char* name : {"summary.csv", "manifest.json"})
        CHECK(fs::exists(root / name));
    for (const auto& r : res.scenarios)
        for (const char* name : {"value.csv", "invest.csv", "consume.csv",
                                 "wealth_percentiles.csv", "invest_percentiles.csv",
                                 "histogram.csv"})
            CHECK(fs::exists(root / r.sc.key / name));
    CHECK_FALSE(fs::exists(root / res.scenarios[0].sc.key / "paths.csv"));

    const std::string summary = slurp(root / "summary.csv");
    CHECK(summary.rfind("statistic,c2r0.5000_k0.50,c2r1.0000\n", 0) == 0);
    CHECK(std::count(summary.begin(), summary.end(), '\n') == 8);  // header + 7 stats

    const auto manifest = nlohmann::json::parse(slurp(root / "manifest.json"));
    CHECK(manifest.at("parameters").at("rho").get<double>() == 0.05);
    CHECK(manifest.at("annuity_calibration").at("ok").get<bool>());
    REQUIRE(manifest.at("scenarios").size() == 2);
    const auto& s0 = manifest.at("scenarios").at(0);
    CHECK(s0.at("key").get<std::string>() == "c2r0.5000_k0.50");
    CHECK(s0.at("summary").at("mean_final_annuity").get<double>() > 0.0);
    CHECK(s0.at("stability").contains("ok"));

    const std::string hist = slurp(root / "c2r1.0000" / "histogram.csv");
    CHECK(hist.rfind("kind,left,count\natom,", 0) == 0);
}

TEST_CASE("reruns are byte-identical for any thread count") {
    auto cfg1 = small_config("runner_out_t1");
    cfg1.threads = 1;
    auto cfg2 = small_config("runner_out_t2");
    cfg2.threads = 2;
    decum::run_matrix(cfg1);
    decum::run_matrix(cfg2);
    for (const char* name :
         {"summary.csv", "manifest.json", "c2r0.5000_k0.50/value.csv",
          "c2r0.5000_k0.50/wealth_percentiles.csv", "c2r0.5000_k0.50/histogram.csv"}) {
        INFO(name);
        CHECK(slurp(fs::path(cfg1.out_dir) / name) == slurp(fs::path(cfg2.out_dir) / name));
    }
}

TEST_CASE("paths dump is written on request") {
    auto cfg = small_config("runner_out_paths");
    cfg.c2_ratios = {0.5};
    cfg.n_paths = 20;
    cfg.dump_paths = true;
    cfg.dump_grids = false;
    decum::run_matrix(cfg);
    const fs::path dir = fs::path(cfg.out_dir) / "c2r0.5000_k0.50";
    CHECK(fs::exists(dir / "paths.csv"));
    const std::string index = slurp(dir / "paths_index.csv");
    CHECK(index.rfind("path,absorbed,", 0) == 0);
    CHECK(std::count(index.begin(), index.end(), '\n') == 21);  // header + 20 paths
    CHECK_FALSE(fs::exists(dir / "value.csv"));
}

TEST_CASE("refining the spatial grid shrinks the value change") {
    auto cfg = small_config("runner_out_conv");
    cfg.dt = 0.25;
    const auto rows = decum::convergence_study(cfg, 0.5, 0.5, {40, 80, 160});
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].diff == 0.0);
    CHECK(rows[1].diff != 0.0);
    CHECK(std::fabs(rows[2].diff) < std::fabs(rows[1].diff));
    CHECK(rows[2].ratio > 1.0);
    decum::write_convergence_csv("runner_out_conv.csv", rows);
    const std::string csv = slurp("runner_out_conv.csv");
    CHECK(csv.rfind("N,dz,value_at_start,diff,ratio\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
}
