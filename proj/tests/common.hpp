#pragma once

// Shared fixtures for the test suite: reference systems with known closed
// forms, plus small matrix helpers.

#include <cmath>
#include <random>
#include <vector>

#include "refl/matrix.hpp"
#include "refl/opalg.hpp"
#include "refl/sysfun.hpp"

namespace testing {

using refl::RMat;
using refl::RVec;

inline RMat mat2(double a, double b, double c, double d) {
    RMat m(2, 2);
    m << a, b, c, d;
    return m;
}

inline RMat mat1(double a) {
    RMat m(1, 1);
    m << a;
    return m;
}

inline double max_abs(const RMat& m) { return m.cwiseAbs().maxCoeff(); }

inline double max_diff(const RMat& a, const RMat& b) { return max_abs(a - b); }

// u1' = u2, u2' = u1(-t); solution X(t) = [[cosh t, -sinh t], [-sinh t, cosh t]].
inline refl::ReflectionSystem mixed_derivative_system() {
    return refl::ReflectionSystem(mat2(1, 0, 0, 0), mat2(0, 0, 0, 1), mat2(0, 1, 0, 0),
                                  mat2(0, 0, 1, 0));
}

// u' = b^2 v(-t), v' = g^2 u(-t); X(t) is the cos/sin rotation block with
// rate b*g and Y(t) = X(-t).
inline refl::ReflectionSystem cross_reflection_system(double b, double g) {
    return refl::ReflectionSystem(RMat::Identity(2, 2), RMat::Zero(2, 2), RMat::Zero(2, 2),
                                  mat2(0, -b * b, -g * g, 0));
}

// u' = b v(-t), v' = g u(-t); det X(t) = cos(2 sqrt(b g) t).
inline refl::ReflectionSystem sine_reflection_system(double b, double g) {
    return refl::ReflectionSystem(RMat::Identity(2, 2), RMat::Zero(2, 2), RMat::Zero(2, 2),
                                  mat2(0, -b, -g, 0));
}

// M+ and M- do not commute here, so XeYe - XoYo drifts away from the identity.
// E = M-M+ = I + N with N nilpotent, which makes the blocks hand-computable.
inline refl::ReflectionSystem noncommuting_system() {
    return refl::ReflectionSystem(RMat::Identity(2, 2), RMat::Zero(2, 2),
                                  mat2(0.5, 1, 1, 0), mat2(-0.5, 0, 0, 0));
}

// x'(t) + m x(-t) = gamma as a one-dimensional system; X(t) = cos mt - sin mt.
inline refl::ReflectionSystem scalar_reflection_system(double m) {
    return refl::ReflectionSystem(mat1(1), mat1(0), mat1(0), mat1(m));
}

// 2 u4(t) + u4(-t) - 2g u(t) - g u(-t) = 0, the fourth-order operator whose
// kernel is spanned by cos, sin, cosh, sinh of g^{1/4} t.
inline refl::ReflectionOperator fourth_order_operator(const refl::Rational& g) {
    std::vector<refl::Rational> a{-2 * g, 0, 0, 0, 2};
    std::vector<refl::Rational> b{-g, 0, 0, 0, 1};
    return refl::ReflectionOperator{refl::RationalPoly(b), refl::RationalPoly(a)};
}

// Closed form of the fundamental matrix of fourth_order_operator's companion
// system, g4 = g^{1/4}.
inline RMat fourth_order_fundamental(double g4, double t) {
    double c = std::cos(g4 * t), ch = std::cosh(g4 * t);
    double s = std::sin(g4 * t), sh = std::sinh(g4 * t);
    double p = 0.5 * (c + ch);
    double q = (s + sh) / (2.0 * g4);
    double r = (ch - c) / (2.0 * g4 * g4);
    double w = (sh - s) / (2.0 * g4 * g4 * g4);
    RMat x(4, 4);
    double g = g4 * g4 * g4 * g4;
    x << p, q, r, w,
         g * w, p, q, r,
         g * r, g * w, p, q,
         g * q, g * r, g * w, p;
    return x;
}

inline std::mt19937_64 fixed_rng(unsigned seed = 20260815u) { return std::mt19937_64(seed); }

inline RMat random_matrix(std::mt19937_64& rng, int n, double scale) {
    std::uniform_real_distribution<double> dist(-scale, scale);
    RMat m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = dist(rng);
    return m;
}

// Random system with F = Id and a contraction G, so F +- G stay invertible.
inline refl::ReflectionSystem random_system(std::mt19937_64& rng, int n) {
    RMat g = random_matrix(rng, n, 0.4 / n);
    RMat a = random_matrix(rng, n, 1.0);
    RMat b = random_matrix(rng, n, 1.0);
    return refl::ReflectionSystem(RMat::Identity(n, n), std::move(g), std::move(a),
                                  std::move(b));
}

} // namespace testing
