#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "refl/errors.hpp"

namespace refl {

using Complex = std::complex<double>;

struct ClusteredRoot {
    Complex value;        // cluster centroid
    int multiplicity;     // cluster size
    double radius;        // max distance of a member from the centroid
};

namespace detail {

// Horner evaluation of p and p' at z; coefficients indexed by power.
inline std::pair<Complex, Complex> horner2(const std::vector<Complex>& c, Complex z) {
    Complex p = 0.0, dp = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) {
        dp = dp * z + p;
        p = p * z + *it;
    }
    return {p, dp};
}

} // namespace detail

// Aberth-Ehrlich simultaneous iteration. Coefficients are indexed by power;
// the leading coefficient must be nonzero. Zero roots (vanishing low-order
// coefficients) are split off exactly before iterating.
inline std::vector<Complex> aberth_roots(std::vector<Complex> coeffs,
                                         double tol = 1e-13, int max_iter = 500) {
    while (!coeffs.empty() && std::abs(coeffs.back()) == 0.0) coeffs.pop_back();
    if (coeffs.size() <= 1) return {};

    std::vector<Complex> roots;
    std::size_t zeros = 0;
    while (zeros + 1 < coeffs.size() && std::abs(coeffs[zeros]) == 0.0) ++zeros;
    if (zeros > 0) {
        roots.assign(zeros, Complex(0.0, 0.0));
        coeffs.erase(coeffs.begin(), coeffs.begin() + static_cast<long>(zeros));
    }
    const std::size_t n = coeffs.size() - 1;
    if (n == 0) return roots;

    // Initial guesses on a circle whose radius reflects the root magnitudes,
    // with an angular offset to break symmetric stalls.
    double lead = std::abs(coeffs[n]);
    double radius = std::pow(std::abs(coeffs[0]) / lead, 1.0 / static_cast<double>(n));
    if (!std::isfinite(radius) || radius == 0.0) radius = 1.0;
    std::vector<Complex> z(n);
    for (std::size_t k = 0; k < n; ++k) {
        double angle = 2.0 * std::numbers::pi * static_cast<double>(k) /
                           static_cast<double>(n) +
                       0.4;
        z[k] = radius * Complex(std::cos(angle), std::sin(angle));
    }

    for (int iter = 0; iter < max_iter; ++iter) {
        double max_step = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            auto [p, dp] = detail::horner2(coeffs, z[i]);
            if (std::abs(p) == 0.0) continue;
            Complex ratio = (dp != 0.0) ? p / dp : Complex(1.0, 0.0);
            Complex sum = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                if (j == i) continue;
                Complex diff = z[i] - z[j];
                if (std::abs(diff) < 1e-300) diff = Complex(1e-300, 0.0);
                sum += 1.0 / diff;
            }
            Complex w = ratio / (1.0 - ratio * sum);
            z[i] -= w;
            max_step = std::max(max_step, std::abs(w) / (1.0 + std::abs(z[i])));
        }
        if (max_step < tol) break;
        if (iter == max_iter - 1)
            throw ConvergenceError("aberth_roots: iteration did not converge");
    }

    roots.insert(roots.end(), z.begin(), z.end());
    return roots;
}

// Groups numerically coincident roots; multiplicity = cluster size. The
// radius scales with the root magnitude so multiple roots of large modulus
// still coalesce.
inline std::vector<ClusteredRoot> cluster_roots(const std::vector<Complex>& roots,
                                                double radius = 1e-6) {
    std::vector<ClusteredRoot> clusters;
    std::vector<bool> used(roots.size(), false);
    for (std::size_t i = 0; i < roots.size(); ++i) {
        if (used[i]) continue;
        std::vector<Complex> members{roots[i]};
        used[i] = true;
        bool grew = true;
        while (grew) {
            grew = false;
            Complex centroid = 0.0;
            for (auto m : members) centroid += m;
            centroid /= static_cast<double>(members.size());
            double r = radius * (1.0 + std::abs(centroid));
            for (std::size_t j = 0; j < roots.size(); ++j) {
                if (used[j]) continue;
                if (std::abs(roots[j] - centroid) <= r) {
                    members.push_back(roots[j]);
                    used[j] = true;
                    grew = true;
                }
            }
        }
        Complex centroid = 0.0;
        for (auto m : members) centroid += m;
        centroid /= static_cast<double>(members.size());
        double spread = 0.0;
        for (auto m : members) spread = std::max(spread, std::abs(m - centroid));
        clusters.push_back({centroid, static_cast<int>(members.size()), spread});
    }
    std::sort(clusters.begin(), clusters.end(), [](const auto& a, const auto& b) {
        if (a.value.real() != b.value.real()) return a.value.real() < b.value.real();
        return a.value.imag() < b.value.imag();
    });
    return clusters;
}

} // namespace refl
