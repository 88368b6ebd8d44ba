#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "motility/errors.hpp"

namespace motility {

// Thomas algorithm for a tridiagonal system.  lower[0] and upper[n-1] are
// ignored.  `x` receives the solution; `scratch` must hold n doubles.  The
// inputs are left untouched, so a caller can reuse coefficient arrays across
// right-hand sides.  Throws SingularSystem on a vanishing pivot.
inline void thomas_solve_inplace(std::span<const double> lower,
                                 std::span<const double> diag,
                                 std::span<const double> upper,
                                 std::span<const double> rhs,
                                 std::span<double> x,
                                 std::span<double> scratch) {
    const std::size_t n = diag.size();
    if (n == 0 || lower.size() != n || upper.size() != n || rhs.size() != n ||
        x.size() != n || scratch.size() != n) {
        throw std::invalid_argument("thomas_solve: inconsistent band sizes");
    }

    double piv = diag[0];
    if (!(std::abs(piv) > 1e-300)) throw SingularSystem("thomas_solve: zero pivot at row 0");
    scratch[0] = upper[0] / piv;
    x[0] = rhs[0] / piv;
    for (std::size_t i = 1; i < n; ++i) {
        piv = diag[i] - lower[i] * scratch[i - 1];
        if (!(std::abs(piv) > 1e-300)) {
            throw SingularSystem("thomas_solve: zero pivot at row " + std::to_string(i));
        }
        scratch[i] = upper[i] / piv;
        x[i] = (rhs[i] - lower[i] * x[i - 1]) / piv;
    }
    for (std::size_t i = n - 1; i-- > 0;) {
        x[i] -= scratch[i] * x[i + 1];
    }
}

inline std::vector<double> thomas_solve(std::span<const double> lower,
                                        std::span<const double> diag,
                                        std::span<const double> upper,
                                        std::span<const double> rhs) {
    std::vector<double> x(diag.size()), scratch(diag.size());
    thomas_solve_inplace(lower, diag, upper, rhs, x, scratch);
    return x;
}

}  // namespace motility
