#pragma once

#include <utility>

#include "refl/errors.hpp"
#include "refl/matrix.hpp"

namespace refl {

namespace detail {

template <typename F>
RVec simpson_rec(F& f, double a, double b, const RVec& fa, const RVec& fm, const RVec& fb,
                 const RVec& whole, double tol, int depth) {
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    RVec flm = f(lm), frm = f(rm);
    RVec left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    RVec right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    RVec err = left + right - whole;
    if (err.norm() <= 15.0 * tol) return left + right + err / 15.0;
    if (depth <= 0)
        throw AccuracyError("adaptive quadrature: depth limit reached before tolerance");
    return simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

} // namespace detail

// Oriented adaptive Simpson for vector-valued integrands; absolute tolerance.
template <typename F>
RVec integrate(F&& f, double a, double b, double tol = 1e-10, int max_depth = 30) {
    if (a == b) {
        RVec probe = f(a);
        return RVec::Zero(probe.size());
    }
    RVec fa = f(a), fb = f(b);
    double m = 0.5 * (a + b);
    RVec fm = f(m);
    RVec whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return detail::simpson_rec(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

} // namespace refl
