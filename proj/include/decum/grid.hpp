#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "decum/problem.hpp"

namespace decum {

// Uniform rectangle in (t, z): n_steps intervals over [0, horizon] and
// n_interior z nodes strictly between the band edges z_low, z_high.
// t(n_steps) and z(n_interior + 1) return the edges exactly.
struct Grid {
    int n_steps = 780;
    int n_interior = 200;
    double horizon = 15.0;
    double z_low = 0.0;
    double z_high = 0.0;

    static Grid make(const ProblemSpec& spec, int n_interior, double dt) {
        if (!(n_interior >= 3))
            throw std::invalid_argument("N must satisfy N >= 3");
        if (!(dt > 0.0 && dt <= spec.plan.horizon))
            throw std::invalid_argument("dt must satisfy 0 < dt <= T");
        Grid g;
        g.n_steps = static_cast<int>(std::lround(spec.plan.horizon / dt));
        if (g.n_steps < 1) g.n_steps = 1;
        g.n_interior = n_interior;
        g.horizon = spec.plan.horizon;
        g.z_low = spec.safety;
        g.z_high = spec.target;
        return g;
    }

    double dt() const { return horizon / n_steps; }
    double dz() const { return (z_high - z_low) / (n_interior + 1); }
    int n_nodes() const { return n_interior + 2; }
    int n_times() const { return n_steps + 1; }

    double t(int i) const { return i == n_steps ? horizon : i * dt(); }
    double z(int j) const {
        return j == n_interior + 1 ? z_high : z_low + j * dz();
    }
};

// Value function and feedback policies on a Grid, stored row-major by time
// index: entry (i, j) is time node i, space node j.
struct GridSolution {
    Grid grid;
    std::vector<double> value;
    std::vector<double> invest;   // risky fraction of wealth
    std::vector<double> consume;  // consumption rate

    GridSolution() = default;
    explicit GridSolution(const Grid& g)
        : grid(g),
          value(static_cast<std::size_t>(g.n_times()) * g.n_nodes(), 0.0),
          invest(value.size(), 0.0),
          consume(value.size(), 0.0) {}

    std::size_t idx(int i, int j) const {
        return static_cast<std::size_t>(i) * grid.n_nodes() + j;
    }
    double value_at(int i, int j) const { return value[idx(i, j)]; }
    double invest_at(int i, int j) const { return invest[idx(i, j)]; }
    double consume_at(int i, int j) const { return consume[idx(i, j)]; }
};

}  // namespace decum
