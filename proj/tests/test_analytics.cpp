#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "decum/analytics.hpp"
#include "decum/hjb.hpp"
#include "decum/simulate.hpp"
#include "fixtures.hpp"

using Catch::Approx;
using testutil::default_spec;

namespace {

decum::PathResult flat_path(int n_steps, std::vector<double> consume, double terminal,
                            decum::Absorption absorbed = decum::Absorption::none) {
    decum::PathResult p;
    p.wealth.assign(n_steps + 1, 100.0);
    p.wealth.back() = terminal;
    p.invest.assign(n_steps, 0.5);
    p.consume = std::move(consume);
    p.absorbed = absorbed;
    p.terminal_wealth = terminal;
    return p;
}

}  // namespace

TEST_CASE("quantile interpolates between order statistics") {
    std::vector<double> v{4, 9, 2, 7, 1, 10, 3, 8, 5, 6};  // 1..10 shuffled
    CHECK(decum::quantile(v, 0.25) == Approx(3.25).epsilon(1e-15));
    CHECK(decum::quantile(v, 0.5) == Approx(5.5).epsilon(1e-15));
    CHECK(decum::quantile(v, 0.0) == 1.0);
    CHECK(decum::quantile(v, 1.0) == 10.0);
    CHECK(decum::quantile({42.0}, 0.7) == 42.0);
    CHECK_THROWS_WITH(decum::quantile({}, 0.5),
                      Catch::Matchers::ContainsSubstring("empty sample"));
    CHECK_THROWS_WITH(decum::quantile(v, 1.5),
                      Catch::Matchers::ContainsSubstring("0 <= p <= 1"));
}

TEST_CASE("summary statistics match direct computation on a toy ensemble") {
    const auto spec = default_spec();
    const double a = spec.a_final;
    const double c1 = spec.plan.c1;
    std::vector<decum::PathResult> paths;
    paths.push_back(flat_path(3, {6, 6, 6}, 7.0 * a));
    paths.push_back(flat_path(3, {5, 6, 7}, 5.0 * a));
    paths.push_back(flat_path(3, {2, 2, 2}, spec.safety, decum::Absorption::safety));

    const auto s = decum::summarize(paths, spec);
    CHECK(s.n_paths == 3);
    const double f1 = 7.0, f2 = 5.0, f3 = 0.5 * c1;
    const double m = (f1 + f2 + f3) / 3.0;
    CHECK(s.mean_final_annuity == Approx(m).epsilon(1e-12));
    const double ss = (f1 - m) * (f1 - m) + (f2 - m) * (f2 - m) + (f3 - m) * (f3 - m);
    CHECK(s.sd_final_annuity == Approx(std::sqrt(ss / 2.0)).epsilon(1e-12));
    CHECK(s.prob_annuity_above_c1 == Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(s.prob_annuity_at_floor == Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(s.mean_consumption == Approx((6.0 + 6.0 + 2.0) / 3.0).epsilon(1e-14));
}

TEST_CASE("present value of a target-riding path equals its funding level") {
    // with the preference rate equal to the market rate, the payout stream of a
    // path gliding along the upper edge is worth exactly the edge's starting level
    const auto spec = default_spec(0.5, 0.5, 0.03);
    auto riding = spec;
    riding.plan.x0 = decum::target_curve(spec, 0.0);
    const decum::GridSolution sol(decum::Grid::make(riding, 20, 0.5));
    const auto p = decum::simulate_path(sol, riding, 1.0 / 52.0, 1, 0);
    REQUIRE(p.absorbed == decum::Absorption::target);
    CHECK(decum::present_value(p, riding) == Approx(145.219187371195).epsilon(1e-10));
}

TEST_CASE("realized loss of a floor-riding path equals the lower boundary value") {
    const auto spec = default_spec();  // kappa = 0.5, c2 = c1 / 2
    auto riding = spec;
    riding.plan.x0 = decum::safety_curve(spec, 0.0);
    const auto grid = decum::Grid::make(riding, 20, 1.0 / 52.0);
    const decum::GridSolution sol(grid);
    const auto p = decum::simulate_path(sol, riding, 1.0 / 52.0, 1, 0);
    REQUIRE(p.absorbed == decum::Absorption::safety);
    const double loss = decum::realized_loss(p, riding);
    CHECK(loss == Approx(74.6077980844833).epsilon(1e-12));
    const decum::HjbSolver solver(riding, grid);
    CHECK(loss == Approx(solver.lower_boundary_value(0)).epsilon(1e-12));
}

TEST_CASE("fixed-consumption plan consumes c1 on every path") {
    const auto spec = default_spec(1.0, 0.0);
    const auto solved = decum::HjbSolver(spec, decum::Grid::make(spec, 40, 1.0 / 26.0)).solve();
    decum::PathConfig pc;
    pc.n_paths = 50;
    pc.seed = 3;
    const auto paths = decum::simulate_paths(solved.solution, spec, pc);
    const auto s = decum::summarize(paths, spec);
    CHECK(s.mean_consumption == Approx(spec.plan.c1).epsilon(1e-12));
    // with kappa = 0 the loss is the discounted terminal shortfall alone
    double expected = 0.0;
    const double dT = spec.discount(spec.plan.horizon);
    for (const auto& p : paths) {
        const double gap = (spec.target - p.terminal_wealth) / spec.a_final;
        expected += dT * gap * gap;
    }
    CHECK(s.mean_loss == Approx(expected / paths.size()).epsilon(1e-12));
}

TEST_CASE("histogram separates the floor atom from the continuous bins") {
    const auto spec = default_spec();
    const double a = spec.a_final;
    const double lo = 0.5 * spec.plan.c1;
    const double hi = 1.75 * spec.plan.c1;
    const double w = (hi - lo) / 10.0;
    std::vector<decum::PathResult> paths;
    paths.push_back(flat_path(2, {5, 5}, (lo + 0.5 * w) * a));
    paths.push_back(flat_path(2, {5, 5}, (lo + 3.5 * w) * a));
    paths.push_back(flat_path(2, {5, 5}, (lo + 9.5 * w) * a));
    paths.push_back(flat_path(2, {5, 5}, hi * a));
    paths.push_back(flat_path(2, {5, 5}, spec.target, decum::Absorption::target));
    paths.push_back(flat_path(2, {5, 5}, spec.safety, decum::Absorption::safety));

    const auto h = decum::annuity_histogram(paths, spec, 10);
    CHECK(h.lo == Approx(lo).epsilon(1e-15));
    CHECK(h.hi == Approx(hi).epsilon(1e-15));
    CHECK(h.atom == 1);
    CHECK(h.counts[0] == 1);
    CHECK(h.counts[3] == 1);
    CHECK(h.counts[9] == 3);
    long total = h.atom;
    for (long c : h.counts) total += c;
    CHECK(total == static_cast<long>(paths.size()));
    CHECK_THROWS_WITH(decum::annuity_histogram(paths, spec, 0),
                      Catch::Matchers::ContainsSubstring("hist_bins"));
}

TEST_CASE("percentile series reduce each time slice to order statistics") {
    const auto spec = default_spec();
    std::vector<decum::PathResult> paths;
    for (int p = 0; p < 5; ++p) {
        decum::PathResult path;
        path.wealth.assign(3, static_cast<double>(p));
        path.invest.assign(2, 10.0 * p);
        path.consume.assign(2, 1.0 + p);
        path.terminal_wealth = p;
        paths.push_back(path);
    }
    const auto wp = decum::percentiles(paths, spec, decum::PathField::wealth);
    REQUIRE(wp.t.size() == 3);
    CHECK(wp.t[1] == Approx(7.5).epsilon(1e-15));
    CHECK(wp.t[2] == 15.0);
    REQUIRE(wp.levels.size() == 5);
    for (int k = 0; k < 3; ++k) {
        CHECK(wp.q[0][k] == Approx(0.2).epsilon(1e-12));   // p05 of {0..4}
        CHECK(wp.q[1][k] == Approx(1.0).epsilon(1e-12));
        CHECK(wp.q[2][k] == Approx(2.0).epsilon(1e-12));
        CHECK(wp.q[3][k] == Approx(3.0).epsilon(1e-12));
        CHECK(wp.q[4][k] == Approx(3.8).epsilon(1e-12));
    }
    const auto ip = decum::percentiles(paths, spec, decum::PathField::invest);
    REQUIRE(ip.t.size() == 2);
    CHECK(ip.q[2][1] == Approx(20.0).epsilon(1e-12));
}

TEST_CASE("analytics reject paths that do not match the discount table") {
    const auto spec = default_spec();
    const decum::DiscountTable tab(spec, 4, spec.plan.horizon / 4);
    const auto p = flat_path(3, {5, 5, 5}, 50.0);
    CHECK_THROWS_WITH(decum::present_value(p, spec, tab),
                      Catch::Matchers::ContainsSubstring("does not match"));
}
