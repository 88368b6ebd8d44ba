#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "motility/errors.hpp"

namespace motility {

struct QuadResult {
    double value = 0.0;
    double error = 0.0;  // accumulated error estimate
    int evaluations = 0;
};

namespace detail {

// 15-point Kronrod extension of 7-point Gauss on [-1, 1].
// Nodes (positive half) and weights from the standard QUADPACK tables.
inline constexpr double kKronrodNodes[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
    0.586087235467691, 0.405845151377397, 0.207784955007898, 0.000000000000000};
inline constexpr double kKronrodWeights[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728};
inline constexpr double kGaussWeights[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119, 0.417959183673469};

template <class F>
std::pair<double, double> gauss_kronrod_15(F&& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    double fv[15];
    for (int i = 0; i < 7; ++i) {
        fv[i] = f(c - h * kKronrodNodes[i]);
        fv[14 - i] = f(c + h * kKronrodNodes[i]);
    }
    fv[7] = f(c);
    double kronrod = 0.0;
    for (int i = 0; i < 7; ++i) kronrod += kKronrodWeights[i] * (fv[i] + fv[14 - i]);
    kronrod += kKronrodWeights[7] * fv[7];
    // Gauss nodes sit at the odd Kronrod indices 1,3,5 and the center.
    double gauss = kGaussWeights[3] * fv[7];
    for (int i = 0; i < 3; ++i) gauss += kGaussWeights[i] * (fv[2 * i + 1] + fv[13 - 2 * i]);
    kronrod *= h;
    gauss *= h;
    const double err = std::pow(200.0 * std::abs(kronrod - gauss), 1.5);
    return {kronrod, std::min(err, std::abs(kronrod - gauss) * 200.0)};
}

}  // namespace detail

// Adaptive quadrature on [a, b]: repeatedly bisect the interval with the worst
// error estimate until the global estimate meets abs_tol + rel_tol*|I|.
// Throws QuadratureError when the subdivision budget is exhausted.
template <class F>
QuadResult integrate_adaptive(F&& f, double a, double b, double rel_tol = 1e-10,
                              double abs_tol = 1e-12, int max_intervals = 2000) {
    struct Interval {
        double a, b, value, error;
    };
    QuadResult res;
    auto [v0, e0] = detail::gauss_kronrod_15(f, a, b);
    res.evaluations = 15;
    std::vector<Interval> stack{{a, b, v0, e0}};
    double total = v0, total_err = e0;
    while (total_err > abs_tol + rel_tol * std::abs(total)) {
        if (static_cast<int>(stack.size()) >= max_intervals) {
            throw QuadratureError("integrate_adaptive: interval budget exhausted");
        }
        // Find and split the interval with the largest error contribution.
        std::size_t worst = 0;
        for (std::size_t i = 1; i < stack.size(); ++i) {
            if (stack[i].error > stack[worst].error) worst = i;
        }
        Interval cur = stack[worst];
        const double mid = 0.5 * (cur.a + cur.b);
        if (!(mid > cur.a && mid < cur.b)) {
            throw QuadratureError("integrate_adaptive: interval collapsed before convergence");
        }
        auto [vl, el] = detail::gauss_kronrod_15(f, cur.a, mid);
        auto [vr, er] = detail::gauss_kronrod_15(f, mid, cur.b);
        res.evaluations += 30;
        total += vl + vr - cur.value;
        total_err += el + er - cur.error;
        stack[worst] = {cur.a, mid, vl, el};
        stack.push_back({mid, cur.b, vr, er});
    }
    res.value = total;
    res.error = total_err;
    return res;
}

}  // namespace motility
