#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include <Eigen/Eigenvalues>

#include "refl/errors.hpp"
#include "refl/matrix.hpp"

namespace refl {

inline constexpr int kSeriesCap = 200;
inline constexpr double kSqrtTol = 1e-12;
inline constexpr int kSqrtMaxIter = 100;

// Partial sums of S1 = sum E^k t^{2k}/(2k)! and S2 = sum E^k t^{2k+1}/(2k+1)!.
// S1 is even and S2 odd in t; S1(0) = Id, S2(0) = 0.
template <typename Mat>
struct SeriesPair {
    Mat S1;
    Mat S2;
    int terms_used = 0;
    double truncation_error_bound = 0.0;
};

// Term-recursive evaluation: term_{k+1} = E * term_k * t^2/((2k+1)(2k+2)).
// Argument halving keeps term growth bounded for large ||E|| t^2, using
// S1(2t) = 2 S1(t)^2 - Id and S2(2t) = 2 S2(t) S1(t).
template <typename Mat>
SeriesPair<Mat> series_pair(const Mat& E, double t, double tol = 1e-15) {
    check_square(E, "series_pair");
    if (tol <= 0.0) throw InvalidInputError("series_pair: tol must be positive");
    const auto n = E.rows();
    double anorm = E.norm();

    int halvings = 0;
    double th = t;
    while (anorm * th * th > 100.0 && halvings < 60) {
        th *= 0.5;
        ++halvings;
    }

    Mat s1 = identity_like(E);
    Mat s2 = s1 * th;
    Mat term1 = s1;
    Mat term2 = s2;
    SeriesPair<Mat> out;
    out.terms_used = 0;
    double bound = 0.0;
    bool converged = false;
    for (int k = 0; k < kSeriesCap; ++k) {
        double k2 = 2.0 * static_cast<double>(k);
        term1 = (E * term1) * (th * th / ((k2 + 1.0) * (k2 + 2.0)));
        term2 = (E * term2) * (th * th / ((k2 + 2.0) * (k2 + 3.0)));
        s1 += term1;
        s2 += term2;
        ++out.terms_used;
        bound = std::max(term1.norm(), term2.norm());
        double scale = std::max(s1.norm(), s2.norm());
        if (bound <= tol * (scale > 0.0 ? scale : 1.0)) {
            converged = true;
            break;
        }
    }
    if (!converged)
        throw ConvergenceError("series_pair: series cap reached without meeting tolerance");

    Mat id = identity_like(E);
    for (int j = 0; j < halvings; ++j) {
        Mat s1d = 2.0 * (s1 * s1) - id;
        Mat s2d = 2.0 * (s2 * s1);
        s1 = std::move(s1d);
        s2 = std::move(s2d);
    }
    (void)n;
    out.S1 = std::move(s1);
    out.S2 = std::move(s2);
    out.truncation_error_bound = bound;
    return out;
}

inline CVec eigenvalues(const CMat& m) {
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(m, false);
    if (solver.info() != Eigen::Success)
        throw ConvergenceError("eigenvalues: QR iteration failed");
    return solver.eigenvalues();
}
inline CVec eigenvalues(const RMat& m) { return eigenvalues(CMat(to_complex(m))); }

namespace detail {

// Coupled Newton iteration with determinant scaling; converges to the
// square root whose spectrum avoids the rotated cut. Iterates are rational
// functions of M, so the result commutes with everything M commutes with.
inline CMat denman_beavers(const CMat& m) {
    const auto n = m.rows();
    CMat y = m, z = CMat::Identity(n, n);
    for (int iter = 0; iter < kSqrtMaxIter; ++iter) {
        if (!is_invertible(y) || !is_invertible(z))
            throw BranchCutError("matrix sqrt: singular iterate, spectrum meets the branch cut");
        double mu = std::pow(std::abs(determinant(y)) * std::abs(determinant(z)),
                             -1.0 / (2.0 * static_cast<double>(n)));
        if (!std::isfinite(mu) || mu <= 0.0) mu = 1.0;
        CMat yinv = y.inverse();
        CMat zinv = z.inverse();
        CMat ynew = 0.5 * (mu * y + (1.0 / mu) * zinv);
        CMat znew = 0.5 * (mu * z + (1.0 / mu) * yinv);
        double delta = (ynew - y).norm();
        y = std::move(ynew);
        z = std::move(znew);
        if (delta <= kSqrtTol * std::max(1.0, y.norm())) return y;
    }
    throw BranchCutError("matrix sqrt: iteration did not converge");
}

// True when some eigenvalue sits on the closed negative real axis.
inline bool touches_negative_axis(const CVec& eigs) {
    for (Eigen::Index i = 0; i < eigs.size(); ++i) {
        auto l = eigs[i];
        if (l.real() <= 0.0 && std::abs(l.imag()) <= 1e-12 * (1.0 + std::abs(l))) return true;
    }
    return false;
}

// Midpoint of the widest angular gap between eigenvalue arguments; a ray
// through it misses the whole spectrum.
inline double spectral_gap_direction(const CVec& eigs) {
    std::vector<double> angles;
    angles.reserve(static_cast<std::size_t>(eigs.size()));
    for (Eigen::Index i = 0; i < eigs.size(); ++i) angles.push_back(std::arg(eigs[i]));
    std::sort(angles.begin(), angles.end());
    double best_gap = -1.0, best_mid = 3.14159265358979323846 / 2.0;
    for (std::size_t i = 0; i < angles.size(); ++i) {
        double a = angles[i];
        double b = (i + 1 < angles.size()) ? angles[i + 1]
                                           : angles[0] + 2.0 * 3.14159265358979323846;
        double gap = b - a;
        if (gap > best_gap) {
            best_gap = gap;
            best_mid = 0.5 * (a + b);
        }
    }
    return best_mid;
}

} // namespace detail

// Square root commuting with everything that commutes with M. Principal
// branch when the spectrum allows it; otherwise the cut is rotated through
// the widest eigenvalue-free direction, which still yields a rational
// function of M. Only a (numerically) singular M is rejected.
inline CMat commuting_sqrt(const CMat& m) {
    check_square(m, "commuting_sqrt");
    if (!is_invertible(m))
        throw SingularMatrixError("commuting_sqrt: input is singular", -1);
    CVec eigs = eigenvalues(m);
    for (Eigen::Index i = 0; i < eigs.size(); ++i)
        if (std::abs(eigs[i]) <= kSingularTol * (1.0 + m.norm()))
            throw SingularMatrixError("commuting_sqrt: eigenvalue at the origin", -1);
    if (!detail::touches_negative_axis(eigs)) {
        return detail::denman_beavers(m);
    }
    double beta = detail::spectral_gap_direction(eigs);
    double theta = beta - 3.14159265358979323846;
    std::complex<double> rot = std::polar(1.0, -theta);
    CMat s = detail::denman_beavers(CMat(rot * m));
    return CMat(std::polar(1.0, theta / 2.0) * s);
}
inline CMat commuting_sqrt(const RMat& m) { return commuting_sqrt(CMat(to_complex(m))); }

// Scaling-and-squaring Taylor exponential.
template <typename Mat>
Mat expm(const Mat& m) {
    check_square(m, "expm");
    double norm = m.norm();
    int squarings = 0;
    while (norm > 0.5 && squarings < 60) {
        norm *= 0.5;
        ++squarings;
    }
    Mat x = m * std::pow(0.5, squarings);
    Mat id = identity_like(m);
    Mat sum = id;
    Mat term = id;
    bool converged = false;
    for (int k = 1; k <= kSeriesCap; ++k) {
        term = (x * term) * (1.0 / static_cast<double>(k));
        sum += term;
        if (term.norm() <= 1e-16 * std::max(1.0, sum.norm())) {
            converged = true;
            break;
        }
    }
    if (!converged) throw ConvergenceError("expm: series cap reached");
    for (int j = 0; j < squarings; ++j) sum = sum * sum;
    return sum;
}

// Principal logarithm by inverse scaling-and-squaring: repeated principal
// square roots bring M near Id, then log(Id+X) by series, then scale back.
// The spectrum must avoid the closed negative real axis.
inline CMat commuting_log(const CMat& m) {
    check_square(m, "commuting_log");
    if (!is_invertible(m))
        throw SingularMatrixError("commuting_log: input is singular", -1);
    CVec eigs = eigenvalues(m);
    if (detail::touches_negative_axis(eigs))
        throw BranchCutError("commuting_log: eigenvalue on the closed negative real axis");

    CMat a = m;
    CMat id = CMat::Identity(m.rows(), m.cols());
    int k = 0;
    while ((a - id).norm() > 0.25) {
        a = detail::denman_beavers(a);
        if (++k > 60) throw ConvergenceError("commuting_log: scaling did not contract");
    }
    CMat x = a - id;
    CMat term = x;
    CMat sum = x;
    bool converged = false;
    for (int j = 2; j <= kSeriesCap; ++j) {
        term = term * x;
        sum += (((j % 2 == 0) ? -1.0 : 1.0) / static_cast<double>(j)) * term;
        if (term.norm() / static_cast<double>(j) <= 1e-16 * std::max(1.0, sum.norm())) {
            converged = true;
            break;
        }
    }
    if (!converged) throw ConvergenceError("commuting_log: series cap reached");
    return CMat(std::pow(2.0, k) * sum);
}
inline CMat commuting_log(const RMat& m) { return commuting_log(CMat(to_complex(m))); }

// det [[M1,M2],[M3,M4]] = det(M1 M4 - M3 M2) when M1 and M3 commute.
template <typename Mat>
typename Mat::Scalar block_det_commuting(const Mat& m1, const Mat& m2, const Mat& m3,
                                         const Mat& m4) {
    check_square(m1, "block_det_commuting");
    if (m2.rows() != m1.rows() || m3.rows() != m1.rows() || m4.rows() != m1.rows() ||
        m2.cols() != m1.cols() || m3.cols() != m1.cols() || m4.cols() != m1.cols())
        throw InvalidInputError("block_det_commuting: blocks must share one square size");
    if (!commute_within_tol(m1, m3))
        throw InvalidInputError("block_det_commuting: M1 and M3 do not commute within tolerance");
    return determinant(Mat(m1 * m4 - m3 * m2));
}

} // namespace refl
