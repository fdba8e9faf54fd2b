#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

#include "decum/problem.hpp"

namespace decum {

// Wealth that, invested risklessly while consuming at rate c, ends the horizon
// holding exactly `end`: the backward solution of x' = r x - c from x(T) = end.
// -expm1 vanishes exactly at t = horizon, so the curve ends on `end` to the bit.
inline double funding_curve(const ProblemSpec& spec, double c, double end, double t) {
    const double r = spec.market.r;
    return end + (c / r - end) * -std::expm1(-r * (spec.plan.horizon - t));
}

// Lower edge of the admissible wealth region: below it, the guaranteed
// annuity can no longer be funded even with minimal consumption.
inline double safety_curve(const ProblemSpec& spec, double t) {
    return funding_curve(spec, spec.plan.c2, spec.safety, t);
}

// Upper edge: at or above it, the target annuity is funded risklessly even
// with maximal consumption, and the plan stops taking risk.
inline double target_curve(const ProblemSpec& spec, double t) {
    return funding_curve(spec, spec.plan.c1, spec.target, t);
}

inline double safety_curve_dt(const ProblemSpec& spec, double t) {
    return spec.market.r * safety_curve(spec, t) - spec.plan.c2;
}

inline double target_curve_dt(const ProblemSpec& spec, double t) {
    return spec.market.r * target_curve(spec, t) - spec.plan.c1;
}

// The moving band [safety_curve(t), target_curve(t)] is mapped onto the fixed
// band [safety, target] by the affine change of variable
//   z = gain(t) * x + shift(t).
// gain stays positive and reaches 1 at the horizon (where shift is 0).
inline double gain(const ProblemSpec& spec, double t) {
    return (spec.target - spec.safety) / (target_curve(spec, t) - safety_curve(spec, t));
}

inline double shift(const ProblemSpec& spec, double t) {
    return spec.safety - safety_curve(spec, t) * gain(spec, t);
}

inline double gain_dt(const ProblemSpec& spec, double t) {
    const double width = target_curve(spec, t) - safety_curve(spec, t);
    const double width_dt = spec.market.r * width - (spec.plan.c1 - spec.plan.c2);
    return -gain(spec, t) * width_dt / width;
}

inline double shift_dt(const ProblemSpec& spec, double t) {
    return -safety_curve_dt(spec, t) * gain(spec, t) -
           safety_curve(spec, t) * gain_dt(spec, t);
}

// Transformed coordinate of wealth x at time t. x must lie in the admissible
// band (up to a small tolerance, inside which it is clamped).
inline double to_z(const ProblemSpec& spec, double t, double x) {
    const double lo = safety_curve(spec, t);
    const double hi = target_curve(spec, t);
    const double tol = 1e-9 * (spec.target - spec.safety);
    if (x < lo - tol || x > hi + tol)
        throw std::domain_error("to_z: wealth " + std::to_string(x) +
                                " outside the admissible band [" + std::to_string(lo) +
                                ", " + std::to_string(hi) + "] at t = " +
                                std::to_string(t));
    const double z = gain(spec, t) * std::min(std::max(x, lo), hi) + shift(spec, t);
    return std::min(std::max(z, spec.safety), spec.target);
}

// Wealth whose transformed coordinate is z at time t.
inline double from_z(const ProblemSpec& spec, double t, double z) {
    return (z - shift(spec, t)) / gain(spec, t);
}

}  // namespace decum
