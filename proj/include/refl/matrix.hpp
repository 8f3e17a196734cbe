#pragma once

#include <cmath>
#include <complex>
#include <string>

#include <Eigen/Dense>

#include "refl/errors.hpp"

namespace refl {

// Row-major to match the problem-file layout of matrix literals.
using RMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using CMat = Eigen::Matrix<std::complex<double>, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RVec = Eigen::VectorXd;
using CVec = Eigen::VectorXcd;

inline constexpr int kMaxDim = 32;
inline constexpr double kSingularTol = 1e-12;

template <typename Mat>
void check_square(const Mat& m, const char* name) {
    if (m.rows() != m.cols() || m.rows() == 0)
        throw InvalidInputError(std::string(name) + ": matrix must be square and nonempty");
    if (m.rows() > kMaxDim)
        throw InvalidInputError(std::string(name) + ": dimension exceeds supported maximum");
}

inline CMat to_complex(const RMat& m) { return m.cast<std::complex<double>>(); }

// Guards the "X is real although Omega might not be" conversions: the
// imaginary residue must be negligible against the real part.
inline RMat validated_real(const CMat& m, double tol = 1e-9) {
    double re = m.real().norm();
    double im = m.imag().norm();
    if (im > tol * (1.0 + re))
        throw AccuracyError("validated_real: imaginary residue " + std::to_string(im) +
                            " exceeds tolerance");
    return m.real();
}

template <typename Mat>
typename Mat::Scalar determinant(const Mat& m) {
    return m.determinant();
}

// Scaled singularity test: |det M| > 1e-12 * ||M||_F^n.
template <typename Mat>
bool is_invertible(const Mat& m) {
    if (m.rows() != m.cols() || m.rows() == 0) return false;
    double scale = std::pow(m.norm(), static_cast<double>(m.rows()));
    if (!std::isfinite(scale)) scale = 1.0;
    return std::abs(determinant(m)) > kSingularTol * std::max(scale, 1e-300);
}

template <typename Mat>
Mat inverse_checked(const Mat& m, const char* context) {
    check_square(m, context);
    if (!is_invertible(m)) {
        Eigen::PartialPivLU<Eigen::Matrix<typename Mat::Scalar, Eigen::Dynamic, Eigen::Dynamic>>
            lu(m);
        auto diag = lu.matrixLU().diagonal();
        int pivot = -1;
        double best = std::numeric_limits<double>::infinity();
        for (Eigen::Index i = 0; i < diag.size(); ++i) {
            double mag = std::abs(diag[i]);
            if (mag < best) {
                best = mag;
                pivot = static_cast<int>(i);
            }
        }
        throw SingularMatrixError(std::string(context) + ": matrix is singular", pivot);
    }
    return m.inverse();
}

// ||AB - BA||_F <= tol * ||A||_F ||B||_F
template <typename Mat>
bool commute_within_tol(const Mat& a, const Mat& b, double tol = 1e-8) {
    double scale = a.norm() * b.norm();
    if (scale == 0.0) return true;
    return (a * b - b * a).norm() <= tol * scale;
}

template <typename Mat>
Mat identity_like(const Mat& m) {
    return Mat::Identity(m.rows(), m.cols());
}

} // namespace refl
