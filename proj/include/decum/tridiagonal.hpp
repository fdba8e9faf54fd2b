#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace decum {

// Thomas algorithm for A x = rhs with A tridiagonal. sub[0] and sup[n-1] are
// ignored. No pivoting: intended for the strictly diagonally dominant systems
// the solver produces. Inputs are taken by value and consumed.
inline std::vector<double> solve_tridiagonal(std::vector<double> sub,
                                             std::vector<double> diag,
                                             std::vector<double> sup,
                                             std::vector<double> rhs) {
    const std::size_t n = diag.size();
    if (n == 0 || sub.size() != n || sup.size() != n || rhs.size() != n)
        throw std::invalid_argument("solve_tridiagonal: band sizes must match");
    for (std::size_t k = 1; k < n; ++k) {
        const double pivot = diag[k - 1];
        if (!(std::fabs(pivot) > 1e-300))
            throw std::runtime_error("solve_tridiagonal: vanishing pivot at row " +
                                     std::to_string(k - 1));
        const double m = sub[k] / pivot;
        diag[k] -= m * sup[k - 1];
        rhs[k] -= m * rhs[k - 1];
    }
    if (!(std::fabs(diag[n - 1]) > 1e-300))
        throw std::runtime_error("solve_tridiagonal: vanishing pivot at row " +
                                 std::to_string(n - 1));
    rhs[n - 1] /= diag[n - 1];
    for (std::size_t k = n - 1; k-- > 0;)
        rhs[k] = (rhs[k] - sup[k] * rhs[k + 1]) / diag[k];
    return rhs;
}

}  // namespace decum
