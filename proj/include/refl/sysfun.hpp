#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "refl/errors.hpp"
#include "refl/matfun.hpp"
#include "refl/matrix.hpp"
#include "refl/opalg.hpp"

namespace refl {

// First-order reflection system F u'(t) + G u'(-t) + A u(t) + B u(-t) = gamma(t).
// F+G and F-G must be invertible; the derived products M+, M-, E drive every
// fundamental-matrix formula.
class ReflectionSystem {
public:
    ReflectionSystem(RMat f, RMat g, RMat a, RMat b)
        : F_(std::move(f)), G_(std::move(g)), A_(std::move(a)), B_(std::move(b)) {
        check_square(F_, "ReflectionSystem F");
        n_ = static_cast<int>(F_.rows());
        auto check_match = [&](const RMat& m, const char* name) {
            if (m.rows() != n_ || m.cols() != n_)
                throw InvalidInputError(std::string("ReflectionSystem ") + name +
                                        ": dimension mismatch");
        };
        check_match(G_, "G");
        check_match(A_, "A");
        check_match(B_, "B");
        FpG_inv_ = inverse_checked(RMat(F_ + G_), "ReflectionSystem F+G");
        FmG_inv_ = inverse_checked(RMat(F_ - G_), "ReflectionSystem F-G");
        Mp_ = FpG_inv_ * (A_ + B_);
        Mm_ = FmG_inv_ * (A_ - B_);
        E_ = Mm_ * Mp_;
        Et_ = Mp_ * Mm_;
    }

    int dim() const { return n_; }
    const RMat& F() const { return F_; }
    const RMat& G() const { return G_; }
    const RMat& A() const { return A_; }
    const RMat& B() const { return B_; }
    const RMat& FpG_inv() const { return FpG_inv_; }
    const RMat& FmG_inv() const { return FmG_inv_; }
    const RMat& Mp() const { return Mp_; }
    const RMat& Mm() const { return Mm_; }
    const RMat& E() const { return E_; }
    const RMat& Et() const { return Et_; }

    // The associated system with G and B negated; its fundamental matrix is Y.
    ReflectionSystem negated() const { return ReflectionSystem(F_, RMat(-G_), A_, RMat(-B_)); }

private:
    RMat F_, G_, A_, B_;
    RMat FpG_inv_, FmG_inv_, Mp_, Mm_, E_, Et_;
    int n_ = 0;
};

inline RMat matrix_E(const ReflectionSystem& sys) { return sys.E(); }

// X(t) = S1(E, t) - M+ S2(E, t); X(0) = Id by the series structure.
inline RMat fundamental_series(const ReflectionSystem& sys, double t, double tol = 1e-15) {
    auto s = series_pair(sys.E(), t, tol);
    return s.S1 - sys.Mp() * s.S2;
}

// Y(t) = S1(Et, t) - M- S2(Et, t), the fundamental matrix of the negated system.
inline RMat associated_Y(const ReflectionSystem& sys, double t, double tol = 1e-15) {
    auto s = series_pair(sys.Et(), t, tol);
    return s.S1 - sys.Mm() * s.S2;
}

// Closed form X(t) = cosh(Omega t) - M+ Omega^{-1} sinh(Omega t) with
// Omega = commuting_sqrt(E). Omega may be complex; X itself is real because
// cosh is even and Omega^{-1} sinh odd in Omega.
class ClosedFormEvaluator {
public:
    explicit ClosedFormEvaluator(const ReflectionSystem& sys) {
        if (!is_invertible(RMat(sys.A() + sys.B())) || !is_invertible(RMat(sys.A() - sys.B())))
            throw InvalidInputError("fundamental_closed: A+B and A-B must be invertible");
        omega_ = commuting_sqrt(sys.E());
        mp_omega_inv_ = to_complex(sys.Mp()) * inverse_checked(omega_, "fundamental_closed Omega");
    }

    RMat operator()(double t) const {
        CMat ep = expm(CMat(omega_ * t));
        CMat em = expm(CMat(omega_ * (-t)));
        CMat cosh_t = 0.5 * (ep + em);
        CMat sinh_t = 0.5 * (ep - em);
        return validated_real(CMat(cosh_t - mp_omega_inv_ * sinh_t));
    }

    const CMat& omega() const { return omega_; }

private:
    CMat omega_;
    CMat mp_omega_inv_;
};

inline RMat fundamental_closed(const ReflectionSystem& sys, double t) {
    return ClosedFormEvaluator(sys)(t);
}

// Companion form of the scalar operator: variables x_i = u^(i). Requires
// a_n^2 != b_n^2 (exact), which is precisely invertibility of F+G and F-G.
inline ReflectionSystem companion_system(const ReflectionOperator& l) {
    int n = l.order();
    if (n < 1) throw InvalidInputError("companion_system: operator order must be at least 1");
    Rational an = l.Q.coeff(n), bn = l.P.coeff(n);
    if (an * an == bn * bn)
        throw InvalidInputError(
            "companion_system: a_n^2 = b_n^2 degenerates the leading coefficient "
            "(the composed operator drops order)");
    RMat f = RMat::Identity(n, n);
    RMat g = RMat::Zero(n, n);
    RMat a = RMat::Zero(n, n);
    RMat b = RMat::Zero(n, n);
    f(n - 1, n - 1) = to_double(an);
    g(n - 1, n - 1) = to_double(bn);
    for (int i = 0; i + 1 < n; ++i) a(i, i + 1) = -1.0;
    for (int j = 0; j < n; ++j) {
        a(n - 1, j) = to_double(l.Q.coeff(j));
        b(n - 1, j) = to_double(l.P.coeff(j));
    }
    return ReflectionSystem(std::move(f), std::move(g), std::move(a), std::move(b));
}

// Even/odd parts of X and Y from evaluations at +t and -t.
struct BlockParts {
    RMat Xe, Xo, Ye, Yo;
};

inline BlockParts block_parts(const ReflectionSystem& sys, double t) {
    RMat xp = fundamental_series(sys, t);
    RMat xm = fundamental_series(sys, -t);
    RMat yp = associated_Y(sys, t);
    RMat ym = associated_Y(sys, -t);
    BlockParts p;
    p.Xe = 0.5 * (xp + xm);
    p.Xo = 0.5 * (xp - xm);
    p.Ye = 0.5 * (yp + ym);
    p.Yo = 0.5 * (yp - ym);
    return p;
}

inline RMat assemble_block(const BlockParts& p, bool negate_odd = false) {
    const auto n = p.Xe.rows();
    RMat out(2 * n, 2 * n);
    double s = negate_odd ? -1.0 : 1.0;
    out.topLeftCorner(n, n) = p.Xe;
    out.topRightCorner(n, n) = s * p.Yo;
    out.bottomLeftCorner(n, n) = s * p.Xo;
    out.bottomRightCorner(n, n) = p.Ye;
    return out;
}

// The 2n x 2n matrix [[X_e, Y_o],[X_o, Y_e]]; equals Id at t = 0.
inline RMat block_X(const ReflectionSystem& sys, double t) {
    return assemble_block(block_parts(sys, t));
}

// M cosh U + N sinh U collapsed to M0 N0 cosh(U0 + U) with M0 = sqrt(M+N),
// N0 = sqrt(M-N), U0 = log(N0^{-1} M0). All inputs must commute pairwise.
inline CMat matrix_paf(const CMat& m, const CMat& n, const CMat& u) {
    check_square(m, "matrix_paf");
    if (n.rows() != m.rows() || u.rows() != m.rows() || n.cols() != m.cols() ||
        u.cols() != m.cols())
        throw InvalidInputError("matrix_paf: dimension mismatch");
    if (!commute_within_tol(m, n) || !commute_within_tol(m, u) || !commute_within_tol(n, u))
        throw InvalidInputError("matrix_paf: M, N, U must commute pairwise within tolerance");
    if (!is_invertible(CMat(m + n)) || !is_invertible(CMat(m - n)))
        throw InvalidInputError("matrix_paf: M+N and M-N must be invertible");
    CMat m0 = commuting_sqrt(CMat(m + n));
    CMat n0 = commuting_sqrt(CMat(m - n));
    CMat u0 = commuting_log(CMat(inverse_checked(n0, "matrix_paf N0") * m0));
    CMat ep = expm(CMat(u0 + u));
    CMat em = expm(CMat(-(u0 + u)));
    return m0 * n0 * (0.5 * (ep + em));
}

inline RMat matrix_paf(const RMat& m, const RMat& n, const RMat& u) {
    return validated_real(matrix_paf(to_complex(m), to_complex(n), to_complex(u)));
}

// Zeros of det X on [t_lo, t_hi]: grid scan for sign changes, then bisection
// down to width 1e-10.
inline std::vector<double> singular_locus(const ReflectionSystem& sys, double t_lo, double t_hi,
                                          double step) {
    if (!(step > 0.0) || t_hi < t_lo)
        throw InvalidInputError("singular_locus: need t_lo <= t_hi and step > 0");
    auto det_at = [&](double t) { return determinant(fundamental_series(sys, t)); };
    std::vector<double> zeros;
    double prev_t = t_lo;
    double prev_d = det_at(prev_t);
    const double width_tol = 1e-10;
    for (double t = t_lo + step; prev_t < t_hi; t += step) {
        if (t > t_hi) t = t_hi;
        double d = det_at(t);
        if (prev_d == 0.0) {
            zeros.push_back(prev_t);
        } else if (d != 0.0 && ((prev_d < 0.0) != (d < 0.0))) {
            double lo = prev_t, hi = t, flo = prev_d;
            while (hi - lo > width_tol) {
                double mid = 0.5 * (lo + hi);
                double fm = det_at(mid);
                if (fm == 0.0) {
                    lo = hi = mid;
                    break;
                }
                if ((flo < 0.0) != (fm < 0.0))
                    hi = mid;
                else {
                    lo = mid;
                    flo = fm;
                }
            }
            zeros.push_back(0.5 * (lo + hi));
        }
        prev_t = t;
        prev_d = d;
        if (t >= t_hi) break;
    }
    if (prev_d == 0.0) zeros.push_back(prev_t);
    return zeros;
}

} // namespace refl
