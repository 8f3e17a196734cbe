#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "refl/errors.hpp"
#include "refl/matrix.hpp"
#include "refl/sysfun.hpp"
#include "refl/varpar.hpp"

namespace refl {

// w = (u(t), v(t)) with v(t) = u(-t) turns the reflection system into the
// constant-coefficient ODE w' = coefficient * w + forcing(t).
struct DoubledODE {
    int dim = 0; // 2n
    RMat coefficient;
    std::function<RVec(double)> forcing;
};

inline DoubledODE lift(const ReflectionSystem& sys, const ForcingFunction& gamma) {
    int n = sys.dim();
    RMat d(2 * n, 2 * n);
    d.topLeftCorner(n, n) = sys.F();
    d.topRightCorner(n, n) = -sys.G();
    d.bottomLeftCorner(n, n) = sys.G();
    d.bottomRightCorner(n, n) = -sys.F();
    RMat d_inv = inverse_checked(d, "oracle lift derivative block");
    RMat coupling(2 * n, 2 * n);
    coupling.topLeftCorner(n, n) = sys.A();
    coupling.topRightCorner(n, n) = sys.B();
    coupling.bottomLeftCorner(n, n) = sys.B();
    coupling.bottomRightCorner(n, n) = sys.A();
    DoubledODE ode;
    ode.dim = 2 * n;
    ode.coefficient = -d_inv * coupling;
    ode.forcing = [d_inv, gamma, n](double t) -> RVec {
        RVec stacked(2 * n);
        stacked.head(n) = gamma(t);
        stacked.tail(n) = gamma(-t);
        return d_inv * stacked;
    };
    return ode;
}

// Fixed-step RK4 nodes with stored derivatives for cubic Hermite dense output.
class Trajectory {
public:
    Trajectory(std::vector<double> ts, std::vector<RVec> ys, std::vector<RVec> fs)
        : ts_(std::move(ts)), ys_(std::move(ys)), fs_(std::move(fs)) {}

    double t_front() const { return ts_.front(); }
    double t_back() const { return ts_.back(); }

    RVec eval(double t) const {
        const double slack = 1e-9 * (1.0 + std::abs(ts_.back()));
        if (t < ts_.front() - slack || t > ts_.back() + slack)
            throw InvalidInputError("Trajectory: evaluation outside integrated range");
        t = std::clamp(t, ts_.front(), ts_.back());
        auto it = std::upper_bound(ts_.begin(), ts_.end(), t);
        std::size_t hi = std::min<std::size_t>(
            std::max<std::ptrdiff_t>(it - ts_.begin(), 1), ts_.size() - 1);
        std::size_t lo = hi - 1;
        double h = ts_[hi] - ts_[lo];
        if (h == 0.0) return ys_[lo];
        double x = (t - ts_[lo]) / h;
        double x2 = x * x, x3 = x2 * x;
        return (2 * x3 - 3 * x2 + 1) * ys_[lo] + (x3 - 2 * x2 + x) * h * fs_[lo] +
               (-2 * x3 + 3 * x2) * ys_[hi] + (x3 - x2) * h * fs_[hi];
    }

private:
    std::vector<double> ts_;
    std::vector<RVec> ys_;
    std::vector<RVec> fs_;
};

// Classical RK4 from 0 to t_end (either sign); h <= 0 selects the default
// step 1e-4 |t_end| clamped to [1e-6, 1e-3].
inline Trajectory integrate(const DoubledODE& ode, const RVec& w0, double t_end, double h = 0.0) {
    if (w0.size() != ode.dim) throw InvalidInputError("oracle integrate: bad initial dimension");
    if (h <= 0.0) h = std::clamp(1e-4 * std::abs(t_end), 1e-6, 1e-3);
    auto f = [&](double t, const RVec& y) -> RVec {
        return ode.coefficient * y + ode.forcing(t);
    };
    double span = std::abs(t_end);
    long steps = std::max(1L, static_cast<long>(std::ceil(span / h)));
    double step = (t_end == 0.0) ? 0.0 : t_end / static_cast<double>(steps);

    std::vector<double> ts;
    std::vector<RVec> ys, fs;
    ts.reserve(static_cast<std::size_t>(steps) + 1);
    ys.reserve(static_cast<std::size_t>(steps) + 1);
    fs.reserve(static_cast<std::size_t>(steps) + 1);
    double t = 0.0;
    RVec y = w0;
    ts.push_back(t);
    ys.push_back(y);
    fs.push_back(f(t, y));
    for (long i = 0; i < steps && step != 0.0; ++i) {
        RVec k1 = fs.back();
        RVec k2 = f(t + 0.5 * step, y + 0.5 * step * k1);
        RVec k3 = f(t + 0.5 * step, y + 0.5 * step * k2);
        RVec k4 = f(t + step, y + step * k3);
        y = y + (step / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        t = (i + 1 == steps) ? t_end : t + step;
        ts.push_back(t);
        ys.push_back(y);
        fs.push_back(f(t, y));
    }
    if (t_end < 0.0) {
        std::reverse(ts.begin(), ts.end());
        std::reverse(ys.begin(), ys.end());
        std::reverse(fs.begin(), fs.end());
    }
    return Trajectory(std::move(ts), std::move(ys), std::move(fs));
}

// Max over the grid of |F u'(t) + G u'(-t) + A u(t) + B u(-t) - gamma(t)|_inf
// with central-difference derivatives, normalized by 1 + |u(t)|_inf.
inline double residual(const ReflectionSystem& sys, const ForcingFunction& gamma,
                       const std::function<RVec(double)>& u, const std::vector<double>& grid) {
    const double h = 1e-5;
    double worst = 0.0;
    for (double t : grid) {
        RVec du = (u(t + h) - u(t - h)) / (2.0 * h);
        RVec du_ref = (u(-t + h) - u(-t - h)) / (2.0 * h);
        RVec ut = u(t);
        RVec r = sys.F() * du + sys.G() * du_ref + sys.A() * ut + sys.B() * u(-t) - gamma(t);
        double denom = 1.0 + ut.cwiseAbs().maxCoeff();
        worst = std::max(worst, r.cwiseAbs().maxCoeff() / denom);
    }
    return worst;
}

// One forward trajectory on [0, span] serves both signs: the top block is
// u(t), the bottom block is u(-t).
class OracleSolution {
public:
    OracleSolution(const ReflectionSystem& sys, const ForcingFunction& gamma, const RVec& u0,
                   double span, double h = 0.0)
        : n_(sys.dim()), traj_(make_traj(sys, gamma, u0, span, h)) {}

    RVec operator()(double t) const {
        RVec w = traj_.eval(std::abs(t));
        return (t >= 0.0) ? RVec(w.head(n_)) : RVec(w.tail(n_));
    }

private:
    static Trajectory make_traj(const ReflectionSystem& sys, const ForcingFunction& gamma,
                                const RVec& u0, double span, double h) {
        DoubledODE ode = lift(sys, gamma);
        RVec w0(2 * sys.dim());
        w0.head(sys.dim()) = u0;
        w0.tail(sys.dim()) = u0;
        return integrate(ode, w0, std::abs(span), h);
    }
    int n_;
    Trajectory traj_;
};

// Shooting solve of C u(-T) + K u(T) = delta against the doubled ODE:
// homogeneous columns plus one particular trajectory determine u(0).
inline RVec oracle_bvp_initial_value(const ReflectionSystem& sys, const RMat& c, const RMat& k,
                                     double T, const ForcingFunction& gamma, const RVec& delta,
                                     double h = 0.0) {
    int n = sys.dim();
    DoubledODE hom = lift(sys, zero_forcing(n));
    RMat h_top(n, n), h_bot(n, n);
    for (int j = 0; j < n; ++j) {
        RVec w0 = RVec::Zero(2 * n);
        w0[j] = 1.0;
        w0[n + j] = 1.0;
        RVec wT = integrate(hom, w0, T, h).eval(T);
        h_top.col(j) = wT.head(n);
        h_bot.col(j) = wT.tail(n);
    }
    DoubledODE forced = lift(sys, gamma);
    RVec pT = integrate(forced, RVec::Zero(2 * n), T, h).eval(T);
    RMat shoot = c * h_bot + k * h_top;
    RVec rhs = delta - c * pT.tail(n) - k * pT.head(n);
    double scale = c.cwiseAbs().maxCoeff() * h_bot.cwiseAbs().maxCoeff() +
                   k.cwiseAbs().maxCoeff() * h_top.cwiseAbs().maxCoeff();
    if (std::abs(determinant(shoot)) <= kSingularTol * std::max(std::pow(scale, n), 1e-300))
        throw UnsolvableBvpError("oracle shooting: boundary matrix is singular");
    return shoot.partialPivLu().solve(rhs);
}

} // namespace refl
