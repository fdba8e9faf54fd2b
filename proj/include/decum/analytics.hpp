#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <tuple>
#include <utility>
#include <vector>

#include "decum/problem.hpp"
#include "decum/quadrature.hpp"
#include "decum/simulate.hpp"

namespace decum {

// Discount-related quantities sampled on the simulation step grid, computed
// once per ensemble instead of once per path.
struct DiscountTable {
    int n_steps = 0;
    double dt = 0.0;
    std::vector<double> node;     // discount at t_k
    std::vector<double> hazard;   // force of mortality at t_k
    std::vector<double> panel;    // Simpson integral of the discount per step
    double tail = 0.0;            // integral of the discount over the payout years

    DiscountTable(const ProblemSpec& spec, int n_steps_, double dt_)
        : n_steps(n_steps_), dt(dt_) {
        node.resize(n_steps + 1);
        hazard.resize(n_steps + 1);
        panel.resize(n_steps);
        const double horizon = spec.plan.horizon;
        for (int k = 0; k <= n_steps; ++k) {
            const double t = (k == n_steps) ? horizon : k * dt;
            node[k] = spec.discount(t);
            hazard[k] = spec.hazard_at(t);
        }
        for (int k = 0; k < n_steps; ++k) {
            const double a = k * dt;
            const double b = (k + 1 == n_steps) ? horizon : (k + 1) * dt;
            panel[k] = (b - a) / 6.0 *
                       (spec.discount(a) + 4.0 * spec.discount(0.5 * (a + b)) +
                        spec.discount(b));
        }
        tail = simpson([&](double t) { return spec.discount(t); }, horizon,
                       spec.plan.max_age - spec.plan.age0, dt);
    }
};

// Annual annuity bought with the path's terminal wealth.
inline double final_annuity(const PathResult& p, const ProblemSpec& spec) {
    return p.terminal_wealth / spec.a_final;
}

namespace detail {
inline int path_steps(const PathResult& p) {
    return static_cast<int>(p.invest.size());
}

inline void check_table(const PathResult& p, const DiscountTable& tab) {
    if (path_steps(p) != tab.n_steps)
        throw std::invalid_argument("analytics: path length does not match the table");
}
}  // namespace detail

// Discounted value of everything the plan pays out while alive: consumption
// until the horizon (weighted by survival, plus the estate flow at death,
// valued via the hazard rate) and the annuity bought at the horizon.
// Trapezoid over the step grid for the pre-horizon part.
inline double present_value(const PathResult& p, const ProblemSpec& spec,
                            const DiscountTable& tab) {
    detail::check_table(p, tab);
    const int n = tab.n_steps;
    double acc = 0.0;
    double prev = 0.0;
    for (int k = 0; k <= n; ++k) {
        const double c = p.consume[std::min(k, n - 1)];
        const double f = tab.node[k] * (c + tab.hazard[k] * p.wealth[k]);
        if (k > 0) acc += 0.5 * (prev + f) * tab.dt;
        prev = f;
    }
    return acc + final_annuity(p, spec) * tab.tail;
}

// Realized value of the cost functional along one path: the discounted
// running penalty for consuming below c1 plus the discounted terminal
// shortfall penalty. Matches the objective the solver minimizes in
// expectation, so the ensemble mean estimates the value function at t = 0.
inline double realized_loss(const PathResult& p, const ProblemSpec& spec,
                            const DiscountTable& tab) {
    detail::check_table(p, tab);
    double acc = 0.0;
    for (int k = 0; k < tab.n_steps; ++k) {
        const double dc = spec.plan.c1 - p.consume[k];
        acc += spec.plan.kappa * dc * dc * tab.panel[k];
    }
    const double gap = (spec.target - p.terminal_wealth) / spec.a_final;
    return acc + tab.node[tab.n_steps] * gap * gap;
}

inline double present_value(const PathResult& p, const ProblemSpec& spec) {
    return present_value(p, spec, DiscountTable(spec, detail::path_steps(p),
                                                spec.plan.horizon / detail::path_steps(p)));
}

inline double realized_loss(const PathResult& p, const ProblemSpec& spec) {
    return realized_loss(p, spec, DiscountTable(spec, detail::path_steps(p),
                                                spec.plan.horizon / detail::path_steps(p)));
}

struct SummaryStats {
    int n_paths = 0;
    double mean_final_annuity = 0.0;
    double sd_final_annuity = 0.0;
    double mean_present_value = 0.0;
    double sd_present_value = 0.0;
    double prob_annuity_above_c1 = 0.0;  // strictly above
    double prob_annuity_at_floor = 0.0;  // absorbed at the safety edge
    double mean_consumption = 0.0;       // over all paths and steps
    double mean_loss = 0.0;
    double se_loss = 0.0;  // standard error of mean_loss
};

namespace detail {
inline std::pair<double, double> mean_sd(const std::vector<double>& v) {
    const double n = static_cast<double>(v.size());
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= n;
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    const double sd = v.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
    return {mean, sd};
}
}  // namespace detail

inline SummaryStats summarize(const std::vector<PathResult>& paths,
                              const ProblemSpec& spec) {
    if (paths.empty()) throw std::invalid_argument("summarize: no paths");
    const int n_steps = detail::path_steps(paths.front());
    const DiscountTable tab(spec, n_steps, spec.plan.horizon / n_steps);

    std::vector<double> fa, pv, loss;
    fa.reserve(paths.size());
    pv.reserve(paths.size());
    loss.reserve(paths.size());
    long above = 0, at_floor = 0;
    double cons = 0.0;
    for (const auto& p : paths) {
        detail::check_table(p, tab);
        fa.push_back(final_annuity(p, spec));
        pv.push_back(present_value(p, spec, tab));
        loss.push_back(realized_loss(p, spec, tab));
        if (fa.back() > spec.plan.c1) ++above;
        if (p.absorbed == Absorption::safety) ++at_floor;
        double s = 0.0;
        for (double c : p.consume) s += c;
        cons += s / n_steps;
    }
    SummaryStats out;
    out.n_paths = static_cast<int>(paths.size());
    std::tie(out.mean_final_annuity, out.sd_final_annuity) = detail::mean_sd(fa);
    std::tie(out.mean_present_value, out.sd_present_value) = detail::mean_sd(pv);
    const auto [lm, lsd] = detail::mean_sd(loss);
    out.mean_loss = lm;
    out.se_loss = lsd / std::sqrt(static_cast<double>(paths.size()));
    out.prob_annuity_above_c1 = static_cast<double>(above) / paths.size();
    out.prob_annuity_at_floor = static_cast<double>(at_floor) / paths.size();
    out.mean_consumption = cons / paths.size();
    return out;
}

// Quantile with linear interpolation between order statistics (the common
// spreadsheet definition): rank h = (n-1) p, interpolate between floor(h)
// and floor(h)+1.
inline double quantile(std::vector<double> v, double p) {
    if (v.empty()) throw std::invalid_argument("quantile: empty sample");
    if (!(p >= 0.0 && p <= 1.0))
        throw std::invalid_argument("quantile: p must satisfy 0 <= p <= 1");
    std::sort(v.begin(), v.end());
    const double h = (v.size() - 1) * p;
    const std::size_t k = static_cast<std::size_t>(h);
    if (k + 1 >= v.size()) return v.back();
    return v[k] + (h - k) * (v[k + 1] - v[k]);
}

enum class PathField { wealth, invest, consume };

struct PercentileSeries {
    std::vector<double> t;
    // rows follow `levels`; one column per time point
    std::vector<double> levels{0.05, 0.25, 0.5, 0.75, 0.95};
    std::vector<std::vector<double>> q;  // q[level][time]
};

inline PercentileSeries percentiles(const std::vector<PathResult>& paths,
                                    const ProblemSpec& spec, PathField field) {
    if (paths.empty()) throw std::invalid_argument("percentiles: no paths");
    const int n_steps = detail::path_steps(paths.front());
    const double h = spec.plan.horizon / n_steps;
    const int n_nodes = field == PathField::wealth ? n_steps + 1 : n_steps;
    PercentileSeries out;
    out.t.resize(n_nodes);
    out.q.assign(out.levels.size(), std::vector<double>(n_nodes, 0.0));
    std::vector<double> column(paths.size());
    for (int k = 0; k < n_nodes; ++k) {
        out.t[k] = (field == PathField::wealth && k == n_steps) ? spec.plan.horizon : k * h;
        for (std::size_t p = 0; p < paths.size(); ++p) {
            const PathResult& path = paths[p];
            column[p] = field == PathField::wealth
                            ? path.wealth[k]
                            : (field == PathField::invest ? path.invest[k]
                                                          : path.consume[k]);
        }
        std::sort(column.begin(), column.end());
        for (std::size_t lev = 0; lev < out.levels.size(); ++lev) {
            const double hh = (column.size() - 1) * out.levels[lev];
            const std::size_t kk = static_cast<std::size_t>(hh);
            out.q[lev][k] = (kk + 1 >= column.size())
                                ? column.back()
                                : column[kk] + (hh - kk) * (column[kk + 1] - column[kk]);
        }
    }
    return out;
}

// Final-annuity histogram over [safety_mult*c1, target_mult*c1] with equal
// bins. Paths absorbed at the safety edge form a point mass exactly at the
// left end and are counted separately; atom + sum(counts) == n_paths.
struct Histogram {
    double lo = 0.0;
    double hi = 0.0;
    double width = 0.0;
    long atom = 0;
    std::vector<long> counts;
};

inline Histogram annuity_histogram(const std::vector<PathResult>& paths,
                                   const ProblemSpec& spec, int n_bins = 50) {
    if (n_bins < 1) throw std::invalid_argument("hist_bins must satisfy hist_bins >= 1");
    Histogram h;
    h.lo = spec.plan.safety_mult * spec.plan.c1;
    h.hi = spec.plan.target_mult * spec.plan.c1;
    h.width = (h.hi - h.lo) / n_bins;
    h.counts.assign(n_bins, 0);
    for (const auto& p : paths) {
        if (p.absorbed == Absorption::safety) {
            ++h.atom;
            continue;
        }
        const double fa = final_annuity(p, spec);
        int b = static_cast<int>((fa - h.lo) / h.width);
        b = std::clamp(b, 0, n_bins - 1);
        ++h.counts[b];
    }
    return h;
}

}  // namespace decum
