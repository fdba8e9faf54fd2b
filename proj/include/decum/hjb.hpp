#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "decum/domain.hpp"
#include "decum/grid.hpp"
#include "decum/problem.hpp"
#include "decum/tridiagonal.hpp"

namespace decum {

struct SolverConfig {
    double residual_tol = 1e-6;    // max discrete-equation residual per column
    double policy_rel_tol = 1e-6;  // relative change gates for c, y and V
    int max_policy_iters = 100;
    int min_policy_iters = 2;
    double y_min = -1.0;  // admissible risky fraction bounds
    double y_max = 2.0;
};

// Drift and diffusion of the transformed state at one node for a given
// control pair. diffusion >= 0 always.
struct LocalCoefficients {
    double drift;
    double diffusion;
};

inline LocalCoefficients local_coefficients(const ProblemSpec& spec, double t, double z,
                                            double y, double c) {
    const double g = gain(spec, t);
    const double x = (z - shift(spec, t)) / g;
    const double drift = x * gain_dt(spec, t) +
                         g * ((y * (spec.market.mu - spec.market.r) + spec.market.r) * x - c) +
                         shift_dt(spec, t);
    const double gsx = g * spec.market.sigma * y * x;
    return {drift, 0.5 * gsx * gsx};
}

struct ColumnStats {
    int iterations = 0;
    double residual = 0.0;
};

struct SolveStats {
    int max_iterations = 0;        // worst column of the backward sweep
    double max_residual = 0.0;     // largest converged residual
    double sup_value = 0.0;        // max |V| over the whole grid
    double stability_bound = 0.0;  // ((target - safety)/a_final)^2 + kappa (c1 - c2)^2
    bool stability_ok = true;
    std::vector<ColumnStats> columns;
};

struct SolveResult {
    GridSolution solution;
    SolveStats stats;
};

// Implicit finite-difference solver for the optimal investment/consumption
// value function on the transformed rectangle, marching backward in time with
// policy iteration in every column. The scheme upwinds the drift so every
// linear system is an M-matrix, which keeps the iteration monotone.
class HjbSolver {
  public:
    HjbSolver(const ProblemSpec& spec, const Grid& grid, SolverConfig cfg = {})
        : spec_(spec), grid_(grid), cfg_(cfg) {
        if (!(spec.a_final > 0.0))
            throw std::invalid_argument("HjbSolver: spec must be finalized first");
        if (std::fabs(grid.z_low - spec.safety) > 1e-9 ||
            std::fabs(grid.z_high - spec.target) > 1e-9)
            throw std::invalid_argument(
                "HjbSolver: grid band must match the problem's safety/target levels");
        if (!(cfg.y_min <= 0.0 && cfg.y_max >= 0.0))
            throw std::invalid_argument("y_min, y_max must satisfy y_min <= 0 <= y_max");
        if (!(cfg.residual_tol > 0.0))
            throw std::invalid_argument("residual_tol must satisfy residual_tol > 0");
        if (!(cfg.policy_rel_tol > 0.0))
            throw std::invalid_argument("policy_rel_tol must satisfy policy_rel_tol > 0");
        precompute();
    }

    const ProblemSpec& spec() const { return spec_; }
    const Grid& grid() const { return grid_; }

    // V at the horizon: discounted squared shortfall of the final annuity
    // against the target, in annuity units.
    double terminal_value(double z) const {
        const double gap = (spec_.target - z) / spec_.a_final;
        return disc_.back() * gap * gap;
    }

    // V on the lower band edge: the guarantee is locked in, consumption is
    // pinned at its minimum, and the remaining cost is deterministic.
    double lower_boundary_value(int i) const {
        const double gap = (spec_.target - spec_.safety) / spec_.a_final;
        const double dc = spec_.plan.c1 - spec_.plan.c2;
        return disc_.back() * gap * gap + spec_.plan.kappa * dc * dc * tail_integral_[i];
    }

    LocalCoefficients coefficients(int i, int j, double y, double c) const {
        const double x = state_[idx(i, j)];
        const double drift =
            x * gain_dt_[i] +
            gain_[i] * ((y * (spec_.market.mu - spec_.market.r) + spec_.market.r) * x - c) +
            shift_dt_[i];
        const double gsx = gain_[i] * spec_.market.sigma * y * x;
        return {drift, 0.5 * gsx * gsx};
    }

    // The tridiagonal row the implicit step assembles for node j of column i
    // under controls (y, c). Upwinding keeps diag > 0 and the off-diagonals
    // <= 0 with diagonal dominance margin exactly 1/dt, for any controls.
    struct MatrixRow {
        double sub, diag, sup;
    };
    MatrixRow matrix_row(int i, int j, double y, double c) const {
        const double dt = grid_.dt();
        const double dz = grid_.dz();
        const auto [a, b] = coefficients(i, j, y, c);
        const double bdz2 = b / (dz * dz);
        if (a >= 0.0)
            return {-bdz2, 1.0 / dt + a / dz + 2.0 * bdz2, -(a / dz + bdz2)};
        return {-(-a / dz + bdz2), 1.0 / dt - a / dz + 2.0 * bdz2, -bdz2};
    }

    // Backward sweep over all columns. Throws if any column fails to converge.
    SolveResult solve() const {
        const int n = grid_.n_steps;
        const int nn = grid_.n_nodes();
        SolveResult out;
        out.solution = GridSolution(grid_);
        GridSolution& sol = out.solution;
        SolveStats& stats = out.stats;
        stats.columns.assign(n + 1, {});

        std::vector<double> v(nn), y(nn), c(nn);
        for (int j = 0; j < nn; ++j) v[j] = terminal_value(grid_.z(j));
        seed_policies(y, c);
        improve_policy(n, v, y, c);
        store_column(sol, n, v, y, c);

        std::vector<double> v_next = v;
        for (int i = n - 1; i >= 0; --i) {
            stats.columns[i] = solve_column(i, v_next, v, y, c);
            store_column(sol, i, v, y, c);
            v_next = v;
        }

        for (const auto& cs : stats.columns) {
            stats.max_iterations = std::max(stats.max_iterations, cs.iterations);
            stats.max_residual = std::max(stats.max_residual, cs.residual);
        }
        for (double vv : sol.value) stats.sup_value = std::max(stats.sup_value, std::fabs(vv));
        const double gap = (spec_.target - spec_.safety) / spec_.a_final;
        const double dc = spec_.plan.c1 - spec_.plan.c2;
        stats.stability_bound = gap * gap + spec_.plan.kappa * dc * dc;
        stats.stability_ok = stats.sup_value <= stats.stability_bound * (1.0 + 1e-9);
        return out;
    }

    // Max residual of the discrete equation between columns i and i+1, given
    // the full node values and policies of column i. Used for verification.
    double residual(int i, const std::vector<double>& v, const std::vector<double>& v_next,
                    const std::vector<double>& y, const std::vector<double>& c,
                    int* argmax = nullptr) const {
        const double dt = grid_.dt();
        double worst = 0.0;
        for (int j = 1; j <= grid_.n_interior; ++j) {
            const double res =
                (v_next[j] - v[j]) / dt + hamiltonian(i, j, v, y[j], c[j]);
            if (std::fabs(res) > worst) {
                worst = std::fabs(res);
                if (argmax) *argmax = j;
            }
        }
        return worst;
    }

  private:
    ProblemSpec spec_;
    Grid grid_;
    SolverConfig cfg_;

    // per time index
    std::vector<double> disc_, tail_integral_, gain_, gain_dt_, shift_dt_;
    // wealth at every node, (n_steps+1) x n_nodes
    std::vector<double> state_;

    std::size_t idx(int i, int j) const {
        return static_cast<std::size_t>(i) * grid_.n_nodes() + j;
    }

    void precompute() {
        const int n = grid_.n_steps;
        const int nn = grid_.n_nodes();
        disc_.resize(n + 1);
        tail_integral_.resize(n + 1);
        gain_.resize(n + 1);
        gain_dt_.resize(n + 1);
        shift_dt_.resize(n + 1);
        state_.resize(static_cast<std::size_t>(n + 1) * nn);
        for (int i = 0; i <= n; ++i) {
            const double t = grid_.t(i);
            disc_[i] = spec_.discount(t);
            gain_[i] = gain(spec_, t);
            gain_dt_[i] = gain_dt(spec_, t);
            shift_dt_[i] = shift_dt(spec_, t);
            const double sh = shift(spec_, t);
            for (int j = 0; j < nn; ++j)
                state_[idx(i, j)] = (grid_.z(j) - sh) / gain_[i];
        }
        // backward integral of the discount, one Simpson panel per step
        tail_integral_[n] = 0.0;
        for (int i = n - 1; i >= 0; --i) {
            const double a = grid_.t(i);
            const double b = grid_.t(i + 1);
            tail_integral_[i] =
                tail_integral_[i + 1] +
                (b - a) / 6.0 *
                    (spec_.discount(a) + 4.0 * spec_.discount(0.5 * (a + b)) +
                     spec_.discount(b));
        }
    }

    void seed_policies(std::vector<double>& y, std::vector<double>& c) const {
        const int top = grid_.n_interior + 1;
        std::fill(y.begin(), y.end(), 0.5);
        std::fill(c.begin(), c.end(), 0.5 * (spec_.plan.c1 + spec_.plan.c2));
        y[0] = 0.0;
        c[0] = spec_.plan.c2;
        y[top] = 0.0;
        c[top] = spec_.plan.c1;
    }

    void store_column(GridSolution& sol, int i, const std::vector<double>& v,
                      const std::vector<double>& y, const std::vector<double>& c) const {
        const int nn = grid_.n_nodes();
        std::copy(v.begin(), v.end(), sol.value.begin() + idx(i, 0));
        std::copy(y.begin(), y.end(), sol.invest.begin() + idx(i, 0));
        std::copy(c.begin(), c.end(), sol.consume.begin() + idx(i, 0));
        (void)nn;
    }

    // Upwinded discrete generator plus running cost at node j of column i.
    double hamiltonian(int i, int j, const std::vector<double>& v, double y,
                       double c) const {
        const double dz = grid_.dz();
        const auto [a, b] = coefficients(i, j, y, c);
        const double up = (v[j + 1] - v[j]) / dz;
        const double dn = (v[j] - v[j - 1]) / dz;
        const double vzz = (v[j + 1] - 2.0 * v[j] + v[j - 1]) / (dz * dz);
        const double dc = spec_.plan.c1 - c;
        return (a >= 0.0 ? a * up : a * dn) + b * vzz +
               spec_.plan.kappa * disc_[i] * dc * dc;
    }

    // One implicit solve of column i for fixed policies. The rows form an
    // M-matrix by upwinding; this is asserted, not assumed.
    void assemble_and_solve(int i, const std::vector<double>& y, const std::vector<double>& c,
                            const std::vector<double>& v_next, std::vector<double>& v) const {
        const int m = grid_.n_interior;
        const double dt = grid_.dt();
        std::vector<double> sub(m), diag(m), sup(m), rhs(m);
        for (int j = 1; j <= m; ++j) {
            const auto row = matrix_row(i, j, y[j], c[j]);
            if (!(row.sub <= 0.0 && row.sup <= 0.0 && row.diag > 0.0)) {
                const auto [a, b] = coefficients(i, j, y[j], c[j]);
                throw std::runtime_error(
                    "HjbSolver: row is not an M-matrix row at time index " +
                    std::to_string(i) + ", node " + std::to_string(j) +
                    " (drift " + std::to_string(a) + ", diffusion " + std::to_string(b) + ")");
            }
            const double dc = spec_.plan.c1 - c[j];
            double r = v_next[j] / dt + spec_.plan.kappa * disc_[i] * dc * dc;
            if (j == 1) r -= row.sub * v[0];
            if (j == m) r -= row.sup * v[m + 1];
            sub[j - 1] = row.sub;
            diag[j - 1] = row.diag;
            sup[j - 1] = row.sup;
            rhs[j - 1] = r;
        }
        auto interior = solve_tridiagonal(std::move(sub), std::move(diag), std::move(sup),
                                          std::move(rhs));
        std::copy(interior.begin(), interior.end(), v.begin() + 1);
    }

    // Pointwise minimization of the discrete Hamiltonian. Candidate controls
    // come from the first-order conditions under both one-sided slopes; each
    // candidate is scored on the upwinded Hamiltonian it would actually face.
    void improve_policy(int i, const std::vector<double>& v, std::vector<double>& y,
                        std::vector<double>& c) const {
        const double dz = grid_.dz();
        const double excess = spec_.market.mu - spec_.market.r;
        const double sig2 = spec_.market.sigma * spec_.market.sigma;
        const double c1 = spec_.plan.c1;
        const double c2 = spec_.plan.c2;
        const double kap = spec_.plan.kappa;
        const double di = disc_[i];
        const double g = gain_[i];
        for (int j = 1; j <= grid_.n_interior; ++j) {
            const double x = state_[idx(i, j)];
            const double slope_f = (v[j + 1] - v[j]) / dz;
            const double slope_b = (v[j] - v[j - 1]) / dz;
            const double vzz = (v[j + 1] - 2.0 * v[j] + v[j - 1]) / (dz * dz);
            const double quad = 0.5 * g * g * sig2 * x * x * vzz;  // times y^2
            double best = std::numeric_limits<double>::infinity();
            for (const double slope : {slope_f, slope_b}) {
                double cc;
                if (kap > 0.0) {
                    cc = std::clamp(c1 + g * slope / (2.0 * kap * di), c2, c1);
                } else {
                    cc = slope >= 0.0 ? c1 : c2;
                }
                const double lin = g * x * excess * slope;  // times y
                double yy;
                if (quad > 1e-300) {
                    yy = std::clamp(-lin / (2.0 * quad), cfg_.y_min, cfg_.y_max);
                } else {
                    const double f_lo = lin * cfg_.y_min + quad * cfg_.y_min * cfg_.y_min;
                    const double f_hi = lin * cfg_.y_max + quad * cfg_.y_max * cfg_.y_max;
                    yy = f_lo <= f_hi ? cfg_.y_min : cfg_.y_max;
                }
                const double h = hamiltonian(i, j, v, yy, cc);
                if (h < best) {
                    best = h;
                    y[j] = yy;
                    c[j] = cc;
                }
            }
        }
    }

    static double max_abs(const std::vector<double>& a, int lo, int hi) {
        double m = 0.0;
        for (int j = lo; j <= hi; ++j) m = std::max(m, std::fabs(a[j]));
        return m;
    }

    static double max_diff(const std::vector<double>& a, const std::vector<double>& b,
                           int lo, int hi) {
        double m = 0.0;
        for (int j = lo; j <= hi; ++j) m = std::max(m, std::fabs(a[j] - b[j]));
        return m;
    }

    ColumnStats solve_column(int i, const std::vector<double>& v_next, std::vector<double>& v,
                             std::vector<double>& y, std::vector<double>& c) const {
        const int m = grid_.n_interior;
        seed_policies(y, c);
        v[0] = lower_boundary_value(i);
        v[m + 1] = 0.0;
        std::vector<double> y_new = y, c_new = c, v_prev;
        for (int it = 1; it <= cfg_.max_policy_iters; ++it) {
            assemble_and_solve(i, y, c, v_next, v);
            improve_policy(i, v, y_new, c_new);
            const double res = residual(i, v, v_next, y_new, c_new);
            const double tol = cfg_.policy_rel_tol;
            const bool done =
                it >= cfg_.min_policy_iters && res <= cfg_.residual_tol &&
                max_diff(c_new, c, 1, m) <= tol * std::max(max_abs(c_new, 1, m), spec_.plan.c1) &&
                max_diff(y_new, y, 1, m) <= tol * std::max(max_abs(y_new, 1, m), 1.0) &&
                !v_prev.empty() &&
                max_diff(v, v_prev, 0, m + 1) <= tol * std::max(max_abs(v, 0, m + 1), 1.0);
            y.swap(y_new);
            c.swap(c_new);
            if (done) return {it, res};
            v_prev = v;
        }
        int bad = 0;
        const double res = residual(i, v, v_next, y, c, &bad);
        throw std::runtime_error(
            "HjbSolver: policy iteration did not converge at time index " +
            std::to_string(i) + " (worst residual " + std::to_string(res) + " at node " +
            std::to_string(bad) + ")");
    }
};

}  // namespace decum
