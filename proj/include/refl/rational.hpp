#pragma once

#include <cctype>
#include <cstdint>
#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

#include "refl/errors.hpp"

namespace refl {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

inline double to_double(const Rational& r) { return static_cast<double>(r); }

// Accepts integers, fractions "p/q", and finite decimals "-1.25"; decimals
// convert exactly (1.25 -> 5/4). Anything else is rejected.
inline Rational parse_rational(std::string_view text) {
    std::size_t pos = 0;
    auto fail = [&]() -> Rational {
        throw InvalidInputError("not a rational number: '" + std::string(text) + "'");
    };
    auto skip_ws = [&] {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    };
    auto read_sign = [&]() -> bool {
        if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) {
            bool neg = text[pos] == '-';
            ++pos;
            return neg;
        }
        return false;
    };
    auto read_digits = [&](BigInt& out, std::size_t& count) {
        count = 0;
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
            out = out * 10 + (text[pos] - '0');
            ++pos;
            ++count;
        }
    };

    skip_ws();
    bool neg = read_sign();
    BigInt ipart = 0;
    std::size_t idigits = 0;
    read_digits(ipart, idigits);

    BigInt num = ipart, den = 1;
    bool any_digits = idigits > 0;

    if (pos < text.size() && text[pos] == '.') {
        ++pos;
        BigInt fpart = 0;
        std::size_t fdigits = 0;
        read_digits(fpart, fdigits);
        any_digits = any_digits || fdigits > 0;
        for (std::size_t i = 0; i < fdigits; ++i) den *= 10;
        num = ipart * den + fpart;
    } else if (pos < text.size() && text[pos] == '/') {
        ++pos;
        skip_ws();
        bool dneg = read_sign();
        BigInt q = 0;
        std::size_t qdigits = 0;
        read_digits(q, qdigits);
        if (qdigits == 0 || q == 0) return fail();
        den = q;
        if (dneg) neg = !neg;
    }
    if (!any_digits) return fail();
    skip_ws();
    if (pos != text.size()) return fail();

    Rational r(num, den);
    return neg ? -r : r;
}

inline std::string to_string(const Rational& r) {
    if (denominator(r) == 1) return numerator(r).str();
    return numerator(r).str() + "/" + denominator(r).str();
}

} // namespace refl
