#pragma once

#include <complex>
#include <string>
#include <vector>

#include "refl/errors.hpp"
#include "refl/rational.hpp"

namespace refl {

// Dense univariate polynomial with exact rational coefficients, indexed by
// power: c[k] multiplies D^k.
class RationalPoly {
public:
    RationalPoly() = default;
    explicit RationalPoly(std::vector<Rational> coeffs) : c_(std::move(coeffs)) { trim(); }
    static RationalPoly constant(const Rational& v) { return RationalPoly({v}); }
    static RationalPoly monomial(int k, const Rational& v = 1) {
        std::vector<Rational> c(static_cast<std::size_t>(k) + 1, Rational(0));
        c.back() = v;
        return RationalPoly(std::move(c));
    }

    const std::vector<Rational>& coeffs() const { return c_; }
    bool is_zero() const { return c_.empty(); }
    int degree() const { return static_cast<int>(c_.size()) - 1; } // -1 for zero
    Rational coeff(int k) const {
        if (k < 0 || k >= static_cast<int>(c_.size())) return Rational(0);
        return c_[static_cast<std::size_t>(k)];
    }
    Rational leading() const { return c_.empty() ? Rational(0) : c_.back(); }

    // P(-D): flips the sign of odd-order coefficients.
    RationalPoly reflected() const {
        auto c = c_;
        for (std::size_t k = 1; k < c.size(); k += 2) c[k] = -c[k];
        return RationalPoly(std::move(c));
    }

    RationalPoly derivative() const {
        if (c_.size() <= 1) return {};
        std::vector<Rational> d(c_.size() - 1);
        for (std::size_t k = 1; k < c_.size(); ++k)
            d[k - 1] = c_[k] * Rational(static_cast<int>(k));
        return RationalPoly(std::move(d));
    }

    friend RationalPoly operator+(const RationalPoly& a, const RationalPoly& b) {
        std::vector<Rational> c(std::max(a.c_.size(), b.c_.size()), Rational(0));
        for (std::size_t k = 0; k < a.c_.size(); ++k) c[k] += a.c_[k];
        for (std::size_t k = 0; k < b.c_.size(); ++k) c[k] += b.c_[k];
        return RationalPoly(std::move(c));
    }
    friend RationalPoly operator-(const RationalPoly& a, const RationalPoly& b) {
        std::vector<Rational> c(std::max(a.c_.size(), b.c_.size()), Rational(0));
        for (std::size_t k = 0; k < a.c_.size(); ++k) c[k] += a.c_[k];
        for (std::size_t k = 0; k < b.c_.size(); ++k) c[k] -= b.c_[k];
        return RationalPoly(std::move(c));
    }
    RationalPoly operator-() const {
        auto c = c_;
        for (auto& x : c) x = -x;
        return RationalPoly(std::move(c));
    }
    friend RationalPoly operator*(const RationalPoly& a, const RationalPoly& b) {
        if (a.is_zero() || b.is_zero()) return {};
        std::vector<Rational> c(a.c_.size() + b.c_.size() - 1, Rational(0));
        for (std::size_t i = 0; i < a.c_.size(); ++i)
            for (std::size_t j = 0; j < b.c_.size(); ++j)
                c[i + j] += a.c_[i] * b.c_[j];
        return RationalPoly(std::move(c));
    }
    friend RationalPoly operator*(const Rational& s, const RationalPoly& p) {
        auto c = p.c_;
        for (auto& x : c) x *= s;
        return RationalPoly(std::move(c));
    }
    friend bool operator==(const RationalPoly& a, const RationalPoly& b) {
        return a.c_ == b.c_;
    }

    // Exact Euclidean division; both parts returned.
    std::pair<RationalPoly, RationalPoly> divmod(const RationalPoly& d) const {
        if (d.is_zero()) throw InvalidInputError("polynomial division by zero");
        RationalPoly q, r = *this;
        std::vector<Rational> qc(r.c_.size(), Rational(0));
        while (!r.is_zero() && r.degree() >= d.degree()) {
            int shift = r.degree() - d.degree();
            Rational factor = r.leading() / d.leading();
            qc[static_cast<std::size_t>(shift)] = factor;
            r = r - factor * (RationalPoly::monomial(shift) * d);
        }
        return {RationalPoly(std::move(qc)), r};
    }

    RationalPoly monic() const {
        if (is_zero()) return {};
        return (Rational(1) / leading()) * (*this);
    }

    Rational eval(const Rational& x) const {
        Rational p = 0;
        for (auto it = c_.rbegin(); it != c_.rend(); ++it) p = p * x + *it;
        return p;
    }
    std::complex<double> eval(std::complex<double> z) const {
        std::complex<double> p = 0.0;
        for (auto it = c_.rbegin(); it != c_.rend(); ++it) p = p * z + to_double(*it);
        return p;
    }
    std::vector<std::complex<double>> double_coeffs() const {
        std::vector<std::complex<double>> out(c_.size());
        for (std::size_t k = 0; k < c_.size(); ++k) out[k] = to_double(c_[k]);
        return out;
    }

    // Largest |coefficient| in double precision; crude height for tolerances.
    double height() const {
        double h = 0.0;
        for (const auto& x : c_) h = std::max(h, std::abs(to_double(x)));
        return h;
    }

    std::string to_string(const std::string& var = "D") const {
        if (is_zero()) return "0";
        std::string out;
        for (int k = degree(); k >= 0; --k) {
            Rational ck = coeff(k);
            if (ck == 0) continue;
            bool neg = ck < 0;
            Rational mag = neg ? Rational(-ck) : ck;
            if (out.empty())
                out += neg ? "-" : "";
            else
                out += neg ? " - " : " + ";
            bool unit = (mag == 1) && k > 0;
            if (!unit) out += refl::to_string(mag);
            if (k > 0) {
                if (!unit) out += "*";
                out += var;
                if (k > 1) out += "^" + std::to_string(k);
            }
        }
        return out;
    }

private:
    void trim() {
        while (!c_.empty() && c_.back() == 0) c_.pop_back();
    }
    std::vector<Rational> c_;
};

// Monic gcd by exact Euclid; gcd(0,0) = 0 by convention.
inline RationalPoly poly_gcd(RationalPoly a, RationalPoly b) {
    while (!b.is_zero()) {
        auto [q, r] = a.divmod(b);
        (void)q;
        a = std::move(b);
        b = std::move(r);
    }
    return a.monic();
}

} // namespace refl
