#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "refl/errors.hpp"
#include "refl/matrix.hpp"
#include "refl/quadrature.hpp"
#include "refl/sysfun.hpp"
#include "refl/varpar.hpp"

namespace refl {

namespace detail {

// P+ = [(F-G)^{-1}; (F+G)^{-1}], P- = [-(F-G)^{-1}; (F+G)^{-1}]: the stacks
// multiplying gamma(s) and gamma(-s) after the even/odd split.
inline RMat stack_plus(const ReflectionSystem& sys) {
    RMat out(2 * sys.dim(), sys.dim());
    out.topRows(sys.dim()) = sys.FmG_inv();
    out.bottomRows(sys.dim()) = sys.FpG_inv();
    return out;
}

inline RMat stack_minus(const ReflectionSystem& sys) {
    RMat out(2 * sys.dim(), sys.dim());
    out.topRows(sys.dim()) = -sys.FmG_inv();
    out.bottomRows(sys.dim()) = sys.FpG_inv();
    return out;
}

struct BlockSolves {
    RMat zp; // blockX(s)^{-1} P+
    RMat zm; // blockX(-s)^{-1} P-
};

inline BlockSolves block_solves(const ReflectionSystem& sys, double s, const RMat& pp,
                                const RMat& pm) {
    BlockParts parts = block_parts(sys, s);
    RMat chi_p = assemble_block(parts, false);
    RMat chi_m = assemble_block(parts, true);
    if (!is_invertible(chi_p) || !is_invertible(chi_m))
        throw SingularPathError(
            "green: block fundamental matrix singular at s = " + std::to_string(s), s);
    BlockSolves out;
    out.zp = chi_p.partialPivLu().solve(pp);
    out.zm = chi_m.partialPivLu().solve(pm);
    return out;
}

} // namespace detail

// Green's function of the initial value problem u(0) = delta. Supported on
// |s| <= |t|; the kernel is normalized so that
//   u(t) = X(t) delta + integral_{-|t|}^{|t|} G(t,s) gamma(s) ds
// with the integral positively oriented, which flips the sign for t < 0.
class GreenIvp {
public:
    explicit GreenIvp(ReflectionSystem sys)
        : sys_(std::move(sys)), pp_(detail::stack_plus(sys_)), pm_(detail::stack_minus(sys_)) {}

    const ReflectionSystem& system() const { return sys_; }

    RMat operator()(double t, double s) const {
        int n = sys_.dim();
        double at = std::abs(t);
        if (std::abs(s) > at) return RMat::Zero(n, n);
        BlockParts pt = block_parts(sys_, t);
        RMat w(n, 2 * n);
        w.leftCols(n) = pt.Xe + pt.Xo;          // X(t)
        w.rightCols(n) = pt.Ye + pt.Yo;         // Y(t)
        auto solves = detail::block_solves(sys_, s, pp_, pm_);
        double orient = (t >= 0.0) ? 0.5 : -0.5;
        bool same_side = (t >= 0.0) ? (s >= 0.0) : (s <= 0.0);
        return orient * w * (same_side ? solves.zp : solves.zm);
    }

private:
    ReflectionSystem sys_;
    RMat pp_, pm_;
};

inline RMat green_ivp(const ReflectionSystem& sys, double t, double s) {
    return GreenIvp(sys)(t, s);
}

// u(t) = X(t) delta + (1/2) (X|Y)(t) [ int_0^t blockX(s)^{-1} P+ gamma(s) ds
//                                    + int_{-t}^0 blockX(-s)^{-1} P- gamma(s) ds ]
// with oriented integrals, the quadrature form of the IVP Green representation.
inline RVec solve_ivp(const ReflectionSystem& sys, const ForcingFunction& gamma, const RVec& delta,
                      double t, double tol = 1e-10) {
    int n = sys.dim();
    if (delta.size() != n) throw InvalidInputError("solve_ivp: delta has wrong dimension");
    RMat pp = detail::stack_plus(sys);
    RMat pm = detail::stack_minus(sys);
    auto f_plus = [&](double s) -> RVec {
        auto solves = detail::block_solves(sys, s, pp, pm);
        return solves.zp * gamma(s);
    };
    auto f_minus = [&](double s) -> RVec {
        auto solves = detail::block_solves(sys, s, pp, pm);
        return solves.zm * gamma(s);
    };
    RVec acc = integrate(f_plus, 0.0, t, tol) + integrate(f_minus, -t, 0.0, tol);
    BlockParts pt = block_parts(sys, t);
    RMat x = pt.Xe + pt.Xo;
    RMat y = pt.Ye + pt.Yo;
    return x * delta + 0.5 * (x * acc.head(n) + y * acc.tail(n));
}

// Solvability matrix of the two-point problem C u(-T) + K u(T) = delta.
inline RMat mx_matrix(const ReflectionSystem& sys, const RMat& c, const RMat& k, double T) {
    if (!(T > 0.0)) throw InvalidInputError("mx_matrix: T must be positive");
    return c * fundamental_series(sys, -T) + k * fundamental_series(sys, T);
}

// Green's function of the two-point boundary value problem on [-T, T].
// Dispatches the six regions in their listed order with non-strict
// inequalities; ties hit the earliest region.
class GreenBvp {
public:
    GreenBvp(ReflectionSystem sys, RMat c, RMat k, double T)
        : sys_(std::move(sys)), C_(std::move(c)), K_(std::move(k)), T_(T) {
        int n = sys_.dim();
        if (C_.rows() != n || C_.cols() != n || K_.rows() != n || K_.cols() != n)
            throw InvalidInputError("GreenBvp: C and K must match the system dimension");
        if (!(T_ > 0.0)) throw InvalidInputError("GreenBvp: T must be positive");
        BlockParts pT = block_parts(sys_, T_);
        RMat w_plus(n, 2 * n), w_minus(n, 2 * n);
        w_plus.leftCols(n) = pT.Xe + pT.Xo;
        w_plus.rightCols(n) = pT.Ye + pT.Yo;
        w_minus.leftCols(n) = pT.Xe - pT.Xo;
        w_minus.rightCols(n) = pT.Ye - pT.Yo;
        mx_ = C_ * w_minus.leftCols(n) + K_ * w_plus.leftCols(n);
        // solvability is judged against the size of the boundary data, so a
        // cancellation that wipes out M_X entirely still reads as singular
        double scale = C_.cwiseAbs().maxCoeff() * w_minus.leftCols(n).cwiseAbs().maxCoeff() +
                       K_.cwiseAbs().maxCoeff() * w_plus.leftCols(n).cwiseAbs().maxCoeff();
        double floor = kSingularTol * std::max(std::pow(scale, n), 1e-300);
        if (std::abs(determinant(mx_)) <= floor)
            throw UnsolvableBvpError(
                "boundary problem is not uniquely solvable: C X(-T) + K X(T) is singular");
        mx_inv_ = mx_.inverse();
        cw_ = mx_inv_ * (C_ * w_minus); // M_X^{-1} C (X(-T)|Y(-T))
        kw_ = mx_inv_ * (K_ * w_plus);  // M_X^{-1} K (X(T)|Y(T))
        pp_ = detail::stack_plus(sys_);
        pm_ = detail::stack_minus(sys_);
    }

    const ReflectionSystem& system() const { return sys_; }
    const RMat& mx() const { return mx_; }
    const RMat& mx_inverse() const { return mx_inv_; }
    double horizon() const { return T_; }

    RMat operator()(double t, double s) const {
        const double slack = 1e-9 * (1.0 + T_);
        if (std::abs(t) > T_ + slack || std::abs(s) > T_ + slack)
            throw InvalidInputError("GreenBvp: (t,s) outside [-T,T]^2");
        int n = sys_.dim();
        BlockParts pt = block_parts(sys_, t);
        RMat x = pt.Xe + pt.Xo;
        RMat w(n, 2 * n);
        w.leftCols(n) = x;
        w.rightCols(n) = pt.Ye + pt.Yo;
        RMat theta_c = x * cw_;
        RMat theta_k = x * kw_;
        auto solves = detail::block_solves(sys_, s, pp_, pm_);

        RMat coef_p, coef_m;
        if (0.0 <= s && s <= t) {
            coef_p = -theta_k + w;
            coef_m = theta_c;
        } else if (0.0 <= -s && -s <= t) {
            coef_p = theta_c;
            coef_m = -theta_k + w;
        } else if (0.0 <= s && s <= -t) {
            coef_p = -theta_k;
            coef_m = theta_c - w;
        } else if (0.0 <= -s && -s <= -t) {
            coef_p = theta_c - w;
            coef_m = -theta_k;
        } else if (std::abs(t) <= s) {
            coef_p = -theta_k;
            coef_m = theta_c;
        } else { // |t| <= -s
            coef_p = theta_c;
            coef_m = -theta_k;
        }
        return 0.5 * (coef_p * solves.zp + coef_m * solves.zm);
    }

private:
    ReflectionSystem sys_;
    RMat C_, K_;
    double T_;
    RMat mx_, mx_inv_;
    RMat cw_, kw_;
    RMat pp_, pm_;
};

inline RMat green_bvp(const ReflectionSystem& sys, const RMat& c, const RMat& k, double T,
                      double t, double s) {
    return GreenBvp(sys, c, k, T)(t, s);
}

// u(t) = X(t) M_X^{-1} delta + integral_{-T}^{T} G(t,s) gamma(s) ds, the
// integral split at the region boundaries -|t|, 0, |t| so each panel is
// smooth for the adaptive rule.
inline RVec solve_bvp(const GreenBvp& green, const ForcingFunction& gamma, const RVec& delta,
                      double t, double tol = 1e-10) {
    const ReflectionSystem& sys = green.system();
    int n = sys.dim();
    if (delta.size() != n) throw InvalidInputError("solve_bvp: delta has wrong dimension");
    double T = green.horizon();
    std::vector<double> cuts{-T, -std::abs(t), 0.0, std::abs(t), T};
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    RVec acc = RVec::Zero(n);
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        if (cuts[i] < -T || cuts[i + 1] > T) continue;
        double a = cuts[i], b = cuts[i + 1];
        // the kernel jumps across panel boundaries; clamp endpoint samples
        // into the open panel so the quadrature sees the one-sided limits
        double nudge = 1e-9 * (b - a);
        auto integrand = [&](double s) -> RVec {
            double sc = std::min(std::max(s, a + nudge), b - nudge);
            return green(t, sc) * gamma(sc);
        };
        acc += integrate(integrand, a, b, tol);
    }
    RMat x = fundamental_series(sys, t);
    return x * (green.mx_inverse() * delta) + acc;
}

inline RVec solve_bvp(const ReflectionSystem& sys, const RMat& c, const RMat& k, double T,
                      const ForcingFunction& gamma, const RVec& delta, double t,
                      double tol = 1e-10) {
    return solve_bvp(GreenBvp(sys, c, k, T), gamma, delta, t, tol);
}

} // namespace refl
