#pragma once

#include <cmath>
#include <stdexcept>

namespace decum {

// Composite Simpson rule over [lo, hi] with panels no wider than max_step.
// Exact for cubics on each panel. f is evaluated 2n+1 times for n panels.
template <typename F>
double simpson(F&& f, double lo, double hi, double max_step) {
    if (!(max_step > 0.0))
        throw std::invalid_argument("simpson: max_step must satisfy max_step > 0");
    if (hi == lo) return 0.0;
    if (hi < lo) return -simpson(f, hi, lo, max_step);
    const double span = hi - lo;
    int n = static_cast<int>(std::ceil(span / max_step - 1e-12));
    if (n < 1) n = 1;
    const double h = span / n;
    double sum = 0.0;
    double f_left = f(lo);
    for (int k = 0; k < n; ++k) {
        const double a = lo + k * h;
        const double b = (k + 1 == n) ? hi : lo + (k + 1) * h;
        const double f_mid = f(0.5 * (a + b));
        const double f_right = f(b);
        sum += (b - a) / 6.0 * (f_left + 4.0 * f_mid + f_right);
        f_left = f_right;
    }
    return sum;
}

}  // namespace decum
