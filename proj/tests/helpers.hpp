#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <vector>

// Test-side oracles, intentionally independent of the library's numerics.

namespace testutil {

// Adaptive Simpson with Richardson error control.
inline double adaptive_simpson_rec(const std::function<double(double)>& f, double a,
                                   double b, double fa, double fm, double fb, double whole,
                                   double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::fabs(left + right - whole) < 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, tol / 2, depth - 1) +
           adaptive_simpson_rec(f, m, b, fm, frm, fb, right, tol / 2, depth - 1);
}

inline double integrate(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-12) {
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return adaptive_simpson_rec(f, a, b, fa, fm, fb, whole, tol, 48);
}

// Dense Gaussian elimination with partial pivoting; reference for the Thomas
// solver. a is row-major n x n.
inline std::vector<double> dense_solve(std::vector<double> a, std::vector<double> rhs) {
    const std::size_t n = rhs.size();
    if (a.size() != n * n) throw std::invalid_argument("dense_solve: shape");
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::fabs(a[r * n + col]) > std::fabs(a[piv * n + col])) piv = r;
        if (piv != col) {
            for (std::size_t k = 0; k < n; ++k) std::swap(a[col * n + k], a[piv * n + k]);
            std::swap(rhs[col], rhs[piv]);
        }
        const double p = a[col * n + col];
        if (std::fabs(p) < 1e-300) throw std::runtime_error("dense_solve: singular");
        for (std::size_t r = col + 1; r < n; ++r) {
            const double m = a[r * n + col] / p;
            if (m == 0.0) continue;
            for (std::size_t k = col; k < n; ++k) a[r * n + k] -= m * a[col * n + k];
            rhs[r] -= m * rhs[col];
        }
    }
    std::vector<double> x(n);
    for (std::size_t r = n; r-- > 0;) {
        double s = rhs[r];
        for (std::size_t k = r + 1; k < n; ++k) s -= a[r * n + k] * x[k];
        x[r] = s / a[r * n + r];
    }
    return x;
}

}  // namespace testutil
