#pragma once

#include <cmath>
#include <complex>
#include <string>
#include <utility>
#include <vector>

#include "refl/errors.hpp"
#include "refl/exppoly.hpp"
#include "refl/polynomial.hpp"
#include "refl/polyroots.hpp"

namespace refl {

// L = phi* P(D) + Q(D), acting as Lu(t) = sum a_k u^(k)(t) + sum b_k u^(k)(-t)
// with P = sum b_k D^k (reflected part) and Q = sum a_k D^k (plain part).
struct ReflectionOperator {
    RationalPoly P;
    RationalPoly Q;

    bool is_zero() const { return P.is_zero() && Q.is_zero(); }
    int order() const { return std::max(P.degree(), Q.degree()); }

    std::string to_string() const {
        if (is_zero()) return "0";
        std::string out;
        if (!P.is_zero()) out += "phi*(" + P.to_string() + ")";
        if (!Q.is_zero()) {
            if (!out.empty()) out += " + ";
            out += "(" + Q.to_string() + ")";
        }
        return out;
    }
};

// Composition in R[D, phi*]; uses P(D) phi* = phi* P(-D).
inline ReflectionOperator compose(const ReflectionOperator& l1, const ReflectionOperator& l2) {
    ReflectionOperator out;
    out.P = l1.P * l2.Q + l1.Q.reflected() * l2.P;
    out.Q = l1.P.reflected() * l2.P + l1.Q * l2.Q;
    return out;
}

// L1 = phi* P(D) - Q(-D); compose(L1, L) = compose(L, L1) is a pure
// differential operator.
inline ReflectionOperator reduction(const ReflectionOperator& l) {
    return {l.P, -l.Q.reflected()};
}

// Lhat = phi* Pt(D) - Qt(-D) with R the largest even divisor of the monic
// gcd(P(D), Q(D), P(-D), Q(-D)), Pt = P/R, Qt = Q/R. The gcd's root multiset
// is negation-symmetric, so the gcd is an even or odd polynomial; an odd one
// (zero root of odd multiplicity) keeps one zero root in Pt, Qt so that R
// commutes with phi* and compose(Lhat, L) = compose(L, Lhat).
inline std::pair<ReflectionOperator, RationalPoly>
refined_reduction(const ReflectionOperator& l) {
    if (l.is_zero()) throw InvalidInputError("refined_reduction: zero operator");
    RationalPoly r = poly_gcd(poly_gcd(l.P, l.Q), poly_gcd(l.P.reflected(), l.Q.reflected()));
    if (!(r == r.reflected())) {
        auto [even_part, zero_root] = r.divmod(RationalPoly::monomial(1));
        if (!zero_root.is_zero())
            throw Error("refined_reduction: odd common factor without a zero root");
        r = even_part;
    }
    if (r.is_zero() || r.degree() == 0) {
        return {reduction(l), RationalPoly::constant(1)};
    }
    auto [pt, prem] = l.P.divmod(r);
    auto [qt, qrem] = l.Q.divmod(r);
    if (!prem.is_zero() || !qrem.is_zero())
        throw Error("refined_reduction: inexact common-factor division");
    return {ReflectionOperator{pt, -qt.reflected()}, r};
}

// Closed form for the coefficients of compose(reduction(L), L): odd ones
// vanish, even ones combine products of the a_k and b_k.
inline RationalPoly composed_coefficients(const ReflectionOperator& l) {
    int n = std::max(l.order(), 0);
    std::vector<Rational> c(static_cast<std::size_t>(2 * n) + 1, Rational(0));
    auto a = [&](int k) { return l.Q.coeff(k); };
    auto b = [&](int k) { return l.P.coeff(k); };
    for (int k = 0; k <= 2 * n; k += 2) {
        Rational ck = 0;
        int half = k / 2;
        for (int j = 0; j < half; ++j) {
            Rational term = b(j) * b(k - j) - a(j) * a(k - j);
            ck += (j % 2 == 0) ? 2 * term : -2 * term;
        }
        Rational diag = b(half) * b(half) - a(half) * a(half);
        ck += (half % 2 == 0) ? diag : -diag;
        c[static_cast<std::size_t>(k)] = ck;
    }
    return RationalPoly(std::move(c));
}

// Lu(t) = sum a_k f^(k)(t) + sum b_k f^(k)(-t) on the exp-poly term basis.
inline ExpPoly apply_to_exppoly(const ReflectionOperator& l, const ExpPoly& f) {
    ExpPoly out;
    ExpPoly deriv = f;
    int n = l.order();
    for (int k = 0; k <= n; ++k) {
        double ak = to_double(l.Q.coeff(k));
        double bk = to_double(l.P.coeff(k));
        if (ak != 0.0) out = out + ak * deriv;
        if (bk != 0.0) out = out + bk * deriv.reflected();
        if (k < n) deriv = deriv.derivative();
    }
    return out;
}

namespace detail {

// Snaps root clusters of a divisor polynomial onto the composed operator's
// root set so both runs share bit-identical rates and frequencies.
inline Complex snap_value(Complex z, const std::vector<Complex>& anchors, double radius) {
    for (const auto& a : anchors) {
        if (std::abs(z - a) <= radius * (1.0 + std::abs(a))) return a;
    }
    return z;
}

struct BasisCandidates {
    std::vector<ExpPoly> funcs;
    int target = 0;
};

// Greedy order-preserving rank selection over the term-coefficient space.
inline std::vector<ExpPoly> select_independent(const std::vector<ExpPoly>& cands, int target,
                                               double rel_tol = 1e-8) {
    struct Key {
        int kind, k;
        double a, b;
        bool operator<(const Key& o) const {
            if (kind != o.kind) return kind < o.kind;
            if (k != o.k) return k < o.k;
            if (a != o.a) return a < o.a;
            return b < o.b;
        }
    };
    std::vector<Key> keys;
    auto key_index = [&](const ExpPoly::Term& t) {
        Key key{static_cast<int>(t.kind), t.k, t.a, t.b};
        for (std::size_t i = 0; i < keys.size(); ++i)
            if (!(keys[i] < key) && !(key < keys[i])) return i;
        keys.push_back(key);
        return keys.size() - 1;
    };
    std::vector<std::vector<double>> basis; // orthonormal accepted vectors
    std::vector<ExpPoly> out;
    for (const auto& f : cands) {
        if (static_cast<int>(out.size()) == target) break;
        std::vector<double> v(keys.size(), 0.0);
        for (const auto& t : f.terms()) {
            std::size_t idx = key_index(t);
            if (idx >= v.size()) v.resize(keys.size(), 0.0);
            v[idx] += t.coeff;
        }
        for (auto& b : basis) b.resize(keys.size(), 0.0);
        double norm0 = 0.0;
        for (double x : v) norm0 += x * x;
        norm0 = std::sqrt(norm0);
        if (norm0 == 0.0) continue;
        for (const auto& b : basis) {
            double dot = 0.0;
            for (std::size_t i = 0; i < v.size(); ++i) dot += v[i] * b[i];
            for (std::size_t i = 0; i < v.size(); ++i) v[i] -= dot * b[i];
        }
        double norm = 0.0;
        for (double x : v) norm += x * x;
        norm = std::sqrt(norm);
        if (norm > rel_tol * norm0) {
            for (auto& x : v) x /= norm;
            basis.push_back(std::move(v));
            out.push_back(f);
        }
    }
    return out;
}

} // namespace detail

// Kernel basis of Lu = 0 as exp-polynomials. Root pairs of the reduced
// composed polynomial feed the reflected-candidate rule; the classical kernel
// of the common factor R is appended (L factors through R, so ker R lies in
// ker L); a rank pass trims collisions to the kernel dimension
// deg(composed_coefficients(L))/2.
inline std::vector<ExpPoly> solution_basis(const ReflectionOperator& l) {
    auto [lhat, r] = refined_reduction(l);
    RationalPoly composed = compose(lhat, l).Q;
    if (composed.is_zero())
        throw InvalidInputError("solution_basis: reduced operator is zero; kernel is not finite-dimensional");
    RationalPoly full = composed_coefficients(l);
    int target = full.degree() / 2;
    if (full.degree() % 2 != 0)
        throw Error("solution_basis: composed operator of odd degree");

    const double cluster_radius = 1e-6;
    auto clusters = cluster_roots(aberth_roots(composed.double_coeffs()), cluster_radius);
    for (const auto& c : clusters) {
        if (std::abs(c.value) <= cluster_radius)
            throw UnsupportedCaseError(
                "solution_basis: 0 is a root of the reduced composed polynomial; "
                "the closed-form kernel basis is undefined here");
    }

    double p_tol = 1e-9 * (1.0 + lhat.P.height());
    double q_tol = 1e-9 * (1.0 + lhat.Q.height());
    // lhat.Q stores -Qt(-D); Qt(-x) = -lhat.Q(x).
    auto xi = [&](Complex z) {
        bool p_zero = std::abs(lhat.P.eval(z)) <= p_tol;
        bool q_zero = std::abs(lhat.Q.eval(z)) <= q_tol;
        return (p_zero && q_zero) ? -1.0 : 1.0;
    };

    std::vector<ExpPoly> cands;
    std::vector<Complex> anchors;
    const double im_tol = cluster_radius;
    for (const auto& c : clusters) {
        double x = c.value.real(), y = c.value.imag();
        if (std::abs(y) <= im_tol * (1.0 + std::abs(x))) {
            if (x <= 0.0) continue; // partner of the positive root
            anchors.push_back(Complex(x, 0.0));
            anchors.push_back(Complex(-x, 0.0));
            double s = xi(Complex(x, 0.0));
            for (int j = 0; j < c.multiplicity; ++j)
                cands.push_back(apply_to_exppoly(
                    lhat, ExpPoly::term(1.0, j, s * x, 0.0, ExpPoly::Trig::plain)));
        } else {
            if (y < 0.0) continue;                                   // conjugate
            if (x < -im_tol * (1.0 + std::abs(c.value))) continue;   // pair partner
            if (x < 0.0) x = 0.0;                                    // pure imaginary
            anchors.push_back(Complex(x, y));
            anchors.push_back(Complex(-x, y));
            anchors.push_back(Complex(x, -y));
            anchors.push_back(Complex(-x, -y));
            double s = xi(Complex(x, y));
            for (int j = 0; j < c.multiplicity; ++j) {
                cands.push_back(apply_to_exppoly(
                    lhat, ExpPoly::term(1.0, j, s * x, y, ExpPoly::Trig::sin)));
                cands.push_back(apply_to_exppoly(
                    lhat, ExpPoly::term(1.0, j, s * x, y, ExpPoly::Trig::cos)));
            }
        }
    }

    if (r.degree() > 0) {
        auto rclusters = cluster_roots(aberth_roots(r.double_coeffs()), cluster_radius);
        for (const auto& c : rclusters) {
            Complex z = detail::snap_value(c.value, anchors, cluster_radius);
            double x = z.real(), y = z.imag();
            if (std::abs(y) <= im_tol * (1.0 + std::abs(x))) {
                for (int j = 0; j < c.multiplicity; ++j)
                    cands.push_back(ExpPoly::term(1.0, j, x, 0.0, ExpPoly::Trig::plain));
            } else {
                if (y < 0.0) continue;
                for (int j = 0; j < c.multiplicity; ++j) {
                    cands.push_back(ExpPoly::term(1.0, j, x, y, ExpPoly::Trig::cos));
                    cands.push_back(ExpPoly::term(1.0, j, x, y, ExpPoly::Trig::sin));
                }
            }
        }
    }

    auto basis = detail::select_independent(cands, target);
    if (static_cast<int>(basis.size()) != target)
        throw ConvergenceError("solution_basis: rank selection found " +
                               std::to_string(basis.size()) + " independent functions, expected " +
                               std::to_string(target) + " (cluster radius 1e-6)");
    for (const auto& f : basis) {
        ExpPoly residual = apply_to_exppoly(l, f);
        if (residual.max_abs_coeff() > 1e-8 * f.max_abs_coeff())
            throw AccuracyError("solution_basis: candidate not annihilated within tolerance");
    }
    return basis;
}

} // namespace refl
