#pragma once

#include <cmath>
#include <cstdio>
#include <map>
#include <string>
#include <tuple>
#include <vector>

namespace refl {

// Real exp-polynomial: finite sum of c * t^k * e^{a t} * {1, cos(b t), sin(b t)}.
// Terms are kept canonical (b > 0 for trig terms, exact-zero coefficients
// dropped), so differentiation and reflection stay closed and comparable.
class ExpPoly {
public:
    enum class Trig { plain = 0, cos = 1, sin = 2 };

    struct Term {
        double coeff;
        int k;      // power of t
        double a;   // exponential rate
        double b;   // trig frequency, 0 for plain terms
        Trig kind;
    };

    ExpPoly() = default;

    static ExpPoly term(double coeff, int k, double a, double b, Trig kind) {
        ExpPoly p;
        p.add_term(coeff, k, a, b, kind);
        return p;
    }

    void add_term(double coeff, int k, double a, double b, Trig kind) {
        if (coeff == 0.0) return;
        if (kind == Trig::plain) b = 0.0;
        if (kind != Trig::plain && b == 0.0) {
            if (kind == Trig::sin) return; // sin(0) = 0
            kind = Trig::plain;
        }
        if (kind != Trig::plain && b < 0.0) {
            b = -b;
            if (kind == Trig::sin) coeff = -coeff;
        }
        if (a == 0.0) a = 0.0; // normalize -0.0
        Key key{static_cast<int>(kind), k, a, b};
        auto [it, inserted] = terms_.try_emplace(key, coeff);
        if (!inserted) {
            it->second += coeff;
            if (it->second == 0.0) terms_.erase(it);
        }
    }

    bool is_zero() const { return terms_.empty(); }

    std::vector<Term> terms() const {
        std::vector<Term> out;
        out.reserve(terms_.size());
        for (const auto& [key, coeff] : terms_) {
            const auto& [kind, k, a, b] = key;
            out.push_back({coeff, k, a, b, static_cast<Trig>(kind)});
        }
        return out;
    }

    friend ExpPoly operator+(const ExpPoly& x, const ExpPoly& y) {
        ExpPoly out = x;
        for (const auto& [key, coeff] : y.terms_) {
            const auto& [kind, k, a, b] = key;
            out.add_term(coeff, k, a, b, static_cast<Trig>(kind));
        }
        return out;
    }
    friend ExpPoly operator*(double s, const ExpPoly& p) {
        ExpPoly out;
        if (s == 0.0) return out;
        for (const auto& [key, coeff] : p.terms_) out.terms_[key] = s * coeff;
        return out;
    }

    ExpPoly derivative() const {
        ExpPoly out;
        for (const auto& [key, c] : terms_) {
            const auto& [kind_i, k, a, b] = key;
            auto kind = static_cast<Trig>(kind_i);
            if (k > 0) out.add_term(c * k, k - 1, a, b, kind);
            if (a != 0.0) out.add_term(c * a, k, a, b, kind);
            if (kind == Trig::cos) out.add_term(-c * b, k, a, b, Trig::sin);
            if (kind == Trig::sin) out.add_term(c * b, k, a, b, Trig::cos);
        }
        return out;
    }

    // f(t) -> f(-t); closed on the term basis since cos is even and sin odd.
    ExpPoly reflected() const {
        ExpPoly out;
        for (const auto& [key, c] : terms_) {
            const auto& [kind_i, k, a, b] = key;
            auto kind = static_cast<Trig>(kind_i);
            double sign = (k % 2 == 0) ? 1.0 : -1.0;
            if (kind == Trig::sin) sign = -sign;
            out.add_term(sign * c, k, -a, b, kind);
        }
        return out;
    }

    double eval(double t) const {
        double sum = 0.0;
        for (const auto& [key, c] : terms_) {
            const auto& [kind_i, k, a, b] = key;
            double v = c * std::pow(t, k) * std::exp(a * t);
            switch (static_cast<Trig>(kind_i)) {
                case Trig::plain: break;
                case Trig::cos: v *= std::cos(b * t); break;
                case Trig::sin: v *= std::sin(b * t); break;
            }
            sum += v;
        }
        return sum;
    }

    double max_abs_coeff() const {
        double m = 0.0;
        for (const auto& [key, c] : terms_) m = std::max(m, std::abs(c));
        return m;
    }

    std::string to_string() const {
        if (terms_.empty()) return "0";
        std::string out;
        for (const auto& [key, c] : terms_) {
            const auto& [kind_i, k, a, b] = key;
            auto kind = static_cast<Trig>(kind_i);
            bool neg = c < 0.0;
            double mag = std::abs(c);
            if (out.empty())
                out += neg ? "-" : "";
            else
                out += neg ? " - " : " + ";
            std::string factors;
            auto append = [&](const std::string& f) {
                if (!factors.empty()) factors += "*";
                factors += f;
            };
            if (k >= 1) append(k == 1 ? "t" : "t^" + std::to_string(k));
            if (a != 0.0) append("exp(" + fmt(a) + "*t)");
            if (kind == Trig::cos) append("cos(" + fmt(b) + "*t)");
            if (kind == Trig::sin) append("sin(" + fmt(b) + "*t)");
            if (factors.empty()) {
                out += fmt(mag);
            } else {
                if (mag != 1.0) out += fmt(mag) + "*";
                out += factors;
            }
        }
        return out;
    }

private:
    using Key = std::tuple<int, int, double, double>; // kind, k, a, b

    static std::string fmt(double v) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.12g", v);
        return buf;
    }

    std::map<Key, double> terms_;
};

} // namespace refl
