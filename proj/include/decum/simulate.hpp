#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <exception>
#include <limits>
#include <mutex>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "decum/domain.hpp"
#include "decum/grid.hpp"
#include "decum/problem.hpp"

namespace decum {

// splitmix64 of (seed, index): independent, reproducible per-path seeds that
// do not collide across nearby seeds or indices.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t x = seed + 0x9E3779B97F4A7C15ull * (index + 1);
    x ^= x >> 30;
    x *= 0xBF58476D1CE4E5B9ull;
    x ^= x >> 27;
    x *= 0x94D049BB133111EBull;
    x ^= x >> 31;
    return x;
}

// Standard normal draws via Box-Muller on top of mt19937_64. The engine's
// output sequence is fixed by the standard, and the transform below is plain
// arithmetic, so streams are reproducible across platforms and thread counts
// (std::normal_distribution is not, which is why it is not used here).
class NormalStream {
  public:
    explicit NormalStream(std::uint64_t seed) : gen_(seed) {}

    double next() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = ((gen_() >> 11) + 1) * 0x1.0p-53;  // in (0, 1]
        const double u2 = (gen_() >> 11) * 0x1.0p-53;        // in [0, 1)
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * 3.14159265358979323846 * u2;
        spare_ = radius * std::sin(angle);
        have_spare_ = true;
        return radius * std::cos(angle);
    }

  private:
    std::mt19937_64 gen_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

enum class Absorption { none, safety, target };

struct PathConfig {
    int n_paths = 5000;
    std::uint64_t seed = 1;
    double dt = 1.0 / 52.0;
    int threads = 1;  // 0 picks hardware concurrency
};

struct PolicyPoint {
    double invest;
    double consume;
};

namespace detail {
struct BilinearWeights {
    int i, j;
    double wt, wz;
};

inline BilinearWeights locate(const GridSolution& sol, const ProblemSpec& spec, double t,
                              double x) {
    const Grid& g = sol.grid;
    const double tc = std::clamp(t, 0.0, g.horizon);
    int i = std::min(static_cast<int>(tc / g.dt()), g.n_steps - 1);
    const double wt = std::clamp(tc / g.dt() - i, 0.0, 1.0);
    const double z = to_z(spec, tc, x);
    const double u = (z - g.z_low) / g.dz();
    int j = std::min(static_cast<int>(u), g.n_interior);
    const double wz = std::clamp(u - j, 0.0, 1.0);
    return {i, j, wt, wz};
}

inline double bilinear(const std::vector<double>& field, const GridSolution& sol,
                       const BilinearWeights& w) {
    const auto at = [&](int i, int j) { return field[sol.idx(i, j)]; };
    return (1.0 - w.wt) * ((1.0 - w.wz) * at(w.i, w.j) + w.wz * at(w.i, w.j + 1)) +
           w.wt * ((1.0 - w.wz) * at(w.i + 1, w.j) + w.wz * at(w.i + 1, w.j + 1));
}
}  // namespace detail

// Feedback controls at (t, x), bilinear in (t, z). t is clamped to the grid;
// x must lie in the admissible band at time t.
inline PolicyPoint policy_lookup(const GridSolution& sol, const ProblemSpec& spec, double t,
                                 double x) {
    const auto w = detail::locate(sol, spec, t, x);
    return {detail::bilinear(sol.invest, sol, w), detail::bilinear(sol.consume, sol, w)};
}

// Value surface at (t, x), same interpolation as policy_lookup.
inline double value_lookup(const GridSolution& sol, const ProblemSpec& spec, double t,
                           double x) {
    const auto w = detail::locate(sol, spec, t, x);
    return detail::bilinear(sol.value, sol, w);
}

struct StepOutcome {
    double wealth;
    Absorption hit;
};

// One wealth step of length dt from (t, x) under controls (y, c), then
// projection onto the admissible band at t + dt. A riskless step (y == 0)
// integrates x' = r x - c exactly, so paths riding a band edge stay on it to
// rounding error; risky steps are Euler-Maruyama with one normal draw.
inline StepOutcome euler_step(const ProblemSpec& spec, double t, double x, double y,
                              double c, double dt, double noise) {
    const double r = spec.market.r;
    double x1;
    if (y == 0.0) {
        x1 = c / r + (x - c / r) * std::exp(r * dt);
    } else {
        x1 = x + ((y * (spec.market.mu - r) + r) * x - c) * dt +
             spec.market.sigma * y * x * std::sqrt(dt) * noise;
    }
    const double lo = safety_curve(spec, t + dt);
    const double hi = target_curve(spec, t + dt);
    if (x1 <= lo) return {lo, Absorption::safety};
    if (x1 >= hi) return {hi, Absorption::target};
    return {x1, Absorption::none};
}

struct PathResult {
    std::vector<double> wealth;   // n+1 node values
    std::vector<double> invest;   // n step values, constant on [t_k, t_{k+1})
    std::vector<double> consume;  // n step values
    Absorption absorbed = Absorption::none;
    double absorption_time = std::numeric_limits<double>::quiet_NaN();
    double terminal_wealth = 0.0;
};

// Simulate one path under the stored feedback policies. Exactly one normal
// draw is consumed per step, absorbed or not, so path index k sees the same
// noise in every scenario sharing the seed. Once a path touches a band edge
// it is pinned to the closed-form edge curve for the rest of the horizon.
inline PathResult simulate_path(const GridSolution& sol, const ProblemSpec& spec,
                                double dt, std::uint64_t seed, std::uint64_t index) {
    const double horizon = spec.plan.horizon;
    int n = static_cast<int>(std::lround(horizon / dt));
    if (n < 1) n = 1;
    const double h = horizon / n;

    PathResult p;
    p.wealth.resize(n + 1);
    p.invest.resize(n);
    p.consume.resize(n);

    const double tol = 1e-9 * (spec.target - spec.safety);
    const double lo0 = safety_curve(spec, 0.0);
    const double hi0 = target_curve(spec, 0.0);
    double x = spec.plan.x0;
    if (x < lo0 - tol || x > hi0 + tol)
        throw std::invalid_argument("x0 must lie in [safety_curve(0), target_curve(0)] = [" +
                                    std::to_string(lo0) + ", " + std::to_string(hi0) + "]");
    if (x <= lo0 + tol) {
        p.absorbed = Absorption::safety;
        p.absorption_time = 0.0;
        x = lo0;
    } else if (x >= hi0 - tol) {
        p.absorbed = Absorption::target;
        p.absorption_time = 0.0;
        x = hi0;
    }
    p.wealth[0] = x;

    NormalStream rng(mix_seed(seed, index));
    for (int k = 0; k < n; ++k) {
        const double noise = rng.next();
        const double t = k * h;
        const double t1 = (k + 1 == n) ? horizon : (k + 1) * h;
        if (p.absorbed != Absorption::none) {
            const bool safe = p.absorbed == Absorption::safety;
            p.invest[k] = 0.0;
            p.consume[k] = safe ? spec.plan.c2 : spec.plan.c1;
            x = safe ? safety_curve(spec, t1) : target_curve(spec, t1);
        } else {
            const auto pol = policy_lookup(sol, spec, t, x);
            p.invest[k] = pol.invest;
            p.consume[k] = pol.consume;
            const auto step = euler_step(spec, t, x, pol.invest, pol.consume, t1 - t, noise);
            x = step.wealth;
            if (step.hit != Absorption::none) {
                p.absorbed = step.hit;
                p.absorption_time = t1;
            }
        }
        p.wealth[k + 1] = x;
    }
    p.terminal_wealth = p.wealth[n];
    return p;
}

// Ensemble of paths. Path index determines its noise stream, so the result
// is identical for any thread count.
inline std::vector<PathResult> simulate_paths(const GridSolution& sol,
                                              const ProblemSpec& spec,
                                              const PathConfig& cfg) {
    if (cfg.n_paths < 1)
        throw std::invalid_argument("n_paths must satisfy n_paths >= 1");
    if (!(cfg.dt > 0.0))
        throw std::invalid_argument("dt_sim must satisfy dt_sim > 0");
    std::vector<PathResult> out(cfg.n_paths);
    unsigned n_threads = cfg.threads > 0 ? cfg.threads : std::thread::hardware_concurrency();
    if (n_threads < 1) n_threads = 1;
    n_threads = std::min<unsigned>(n_threads, cfg.n_paths);

    std::exception_ptr error;
    std::mutex error_mu;
    auto work = [&](int begin, int end) {
        try {
            for (int k = begin; k < end; ++k)
                out[k] = simulate_path(sol, spec, cfg.dt, cfg.seed, k);
        } catch (...) {
            std::lock_guard<std::mutex> lock(error_mu);
            if (!error) error = std::current_exception();
        }
    };
    if (n_threads == 1) {
        work(0, cfg.n_paths);
    } else {
        std::vector<std::thread> pool;
        const int chunk = (cfg.n_paths + n_threads - 1) / n_threads;
        for (unsigned w = 0; w < n_threads; ++w) {
            const int begin = static_cast<int>(w) * chunk;
            const int end = std::min(cfg.n_paths, begin + chunk);
            if (begin >= end) break;
            pool.emplace_back(work, begin, end);
        }
        for (auto& th : pool) th.join();
    }
    if (error) std::rethrow_exception(error);
    return out;
}

}  // namespace decum
