#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>

#include "common.hpp"
#include "refl/matfun.hpp"

using namespace refl;
using namespace testing;

namespace {

// Random matrix with spectrum pushed into the right half plane, so both the
// principal square root and the logarithm are defined.
RMat random_shifted(std::mt19937_64& rng, int n) {
    RMat m = random_matrix(rng, n, 0.5);
    return RMat(m + (0.6 * n + 1.5) * RMat::Identity(n, n));
}

double cmax_diff(const CMat& a, const CMat& b) { return (a - b).cwiseAbs().maxCoeff(); }

} // namespace

TEST_CASE("series pair on the identity gives cosh and sinh") {
    RMat e = RMat::Identity(2, 2);
    auto sp = series_pair(e, 1.0);
    CHECK(max_diff(sp.S1, RMat(std::cosh(1.0) * e)) < 1e-14);
    CHECK(max_diff(sp.S2, RMat(std::sinh(1.0) * e)) < 1e-14);
    CHECK(sp.terms_used > 0);
    CHECK(sp.truncation_error_bound <= 1e-13);
}

TEST_CASE("series pair at t = 0 is the identity and zero") {
    auto rng = fixed_rng(11);
    RMat e = random_matrix(rng, 3, 2.0);
    auto sp = series_pair(e, 0.0);
    CHECK(max_diff(sp.S1, RMat::Identity(3, 3)) == 0.0);
    CHECK(max_abs(sp.S2) == 0.0);
}

TEST_CASE("negative multiple of the identity yields cos and sin") {
    double b = 1.3, g = 0.7;
    double w = std::sqrt(b * g);
    RMat e = RMat(-b * g * RMat::Identity(2, 2));
    for (double t : {-1.5, 0.25, 2.0}) {
        auto sp = series_pair(e, t);
        CHECK(max_diff(sp.S1, RMat(std::cos(w * t) * RMat::Identity(2, 2))) < 1e-13);
        CHECK(max_diff(sp.S2, RMat(std::sin(w * t) / w * RMat::Identity(2, 2))) < 1e-13);
    }
}

TEST_CASE("argument halving keeps large arguments accurate") {
    // ||E|| t^2 = 4 * 49 >> 100 forces the doubling path.
    RMat e = RMat(4.0 * RMat::Identity(1, 1));
    double t = 7.0;
    auto sp = series_pair(e, t);
    CHECK(sp.S1(0, 0) == Catch::Approx(std::cosh(2.0 * t)).epsilon(1e-12));
    CHECK(sp.S2(0, 0) == Catch::Approx(std::sinh(2.0 * t) / 2.0).epsilon(1e-12));
}

TEST_CASE("series derivatives satisfy S1' = E S2 and S2' = S1") {
    auto rng = fixed_rng(12);
    double h = 1e-5;
    for (int trial = 0; trial < 5; ++trial) {
        RMat e = random_matrix(rng, 3, 1.5);
        for (double t : {-0.8, 0.3, 1.1}) {
            auto plus = series_pair(e, t + h);
            auto minus = series_pair(e, t - h);
            auto mid = series_pair(e, t);
            RMat d1 = (plus.S1 - minus.S1) / (2.0 * h);
            RMat d2 = (plus.S2 - minus.S2) / (2.0 * h);
            CHECK(max_diff(d1, RMat(e * mid.S2)) < 1e-6);
            CHECK(max_diff(d2, mid.S1) < 1e-6);
        }
    }
}

TEST_CASE("series pair satisfies S1^2 - E S2^2 = Id") {
    auto rng = fixed_rng(13);
    for (int trial = 0; trial < 10; ++trial) {
        int n = 2 + trial % 3;
        RMat e = random_matrix(rng, n, 1.0);
        auto sp = series_pair(e, 1.7);
        CHECK(max_diff(RMat(sp.S1 * sp.S1 - e * sp.S2 * sp.S2), RMat::Identity(n, n)) < 1e-11);
    }
}

TEST_CASE("series pair rejects bad input") {
    RMat e = RMat::Identity(2, 2);
    CHECK_THROWS_AS(series_pair(e, 1.0, -1.0), InvalidInputError);
    RMat rect(2, 3);
    rect.setZero();
    CHECK_THROWS_AS(series_pair(rect, 1.0), InvalidInputError);
}

TEST_CASE("square root of a diagonal matrix is the principal root") {
    RMat m(2, 2);
    m << 4, 0, 0, 9;
    CMat s = commuting_sqrt(m);
    CMat expect(2, 2);
    expect << 2, 0, 0, 3;
    CHECK(cmax_diff(s, expect) < 1e-12);

    CHECK(cmax_diff(commuting_sqrt(RMat(RMat::Identity(3, 3))),
                    CMat(CMat::Identity(3, 3))) < 1e-12);
}

TEST_CASE("square root of a Jordan block") {
    RMat m(2, 2);
    m << 1, 1, 0, 1;
    CMat s = commuting_sqrt(m);
    CMat expect(2, 2);
    expect << 1, 0.5, 0, 1;
    CHECK(cmax_diff(s, expect) < 1e-12);
}

TEST_CASE("square roots square back and commute with polynomials of the input") {
    auto rng = fixed_rng(14);
    std::uniform_real_distribution<double> coef(-1.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        int n = 2 + trial % 4;
        RMat m = random_shifted(rng, n);
        CMat s = commuting_sqrt(m);
        CHECK(cmax_diff(CMat(s * s), to_complex(m)) < 1e-10 * (1.0 + m.norm()));

        RMat q = RMat(coef(rng) * RMat::Identity(n, n) + coef(rng) * m + coef(rng) * m * m);
        CMat qc = to_complex(q);
        CHECK((s * qc - qc * s).norm() < 1e-10 * (1.0 + s.norm() * qc.norm()));
    }
}

TEST_CASE("square root handles a spectrum on the negative real axis") {
    // Both eigenvalues negative: the principal branch is unavailable, the
    // rotated cut still returns a commuting root.
    RMat m(2, 2);
    m << -4, 0, 0, -9;
    CMat s = commuting_sqrt(m);
    CHECK(cmax_diff(CMat(s * s), to_complex(m)) < 1e-10);

    // Mixed signs around the cut.
    RMat m2(2, 2);
    m2 << -1, 1, 0, 2;
    CMat s2 = commuting_sqrt(m2);
    CHECK(cmax_diff(CMat(s2 * s2), to_complex(m2)) < 1e-10);
}

TEST_CASE("square root rejects singular input") {
    RMat m(2, 2);
    m << 1, 1, 1, 1;
    CHECK_THROWS_AS(commuting_sqrt(m), SingularMatrixError);
    CHECK_THROWS_AS(commuting_sqrt(RMat(RMat::Zero(2, 2))), SingularMatrixError);
}

TEST_CASE("matrix exponential matches closed forms") {
    RMat zero = RMat::Zero(3, 3);
    CHECK(max_diff(expm(zero), RMat::Identity(3, 3)) < 1e-15);

    double th = 1.2;
    RMat rot(2, 2);
    rot << 0, -th, th, 0;
    RMat expect(2, 2);
    expect << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
    CHECK(max_diff(expm(rot), expect) < 1e-14);

    RMat nil(2, 2);
    nil << 0, 1, 0, 0;
    RMat exn(2, 2);
    exn << 1, 1, 0, 1;
    CHECK(max_diff(expm(nil), exn) < 1e-15);
}

TEST_CASE("exponential of opposite matrices are inverses") {
    auto rng = fixed_rng(15);
    for (int trial = 0; trial < 10; ++trial) {
        int n = 2 + trial % 3;
        RMat a = random_matrix(rng, n, 2.0);
        RMat prod = RMat(expm(a) * expm(RMat(-a)));
        CHECK(max_diff(prod, RMat::Identity(n, n)) < 1e-11);
    }
}

TEST_CASE("logarithm closed forms") {
    CMat id = CMat::Identity(2, 2);
    CHECK(commuting_log(CMat(id)).cwiseAbs().maxCoeff() < 1e-12);

    RMat d(2, 2);
    d << std::exp(1.0), 0, 0, std::exp(2.0);
    CMat l = commuting_log(d);
    CMat expect(2, 2);
    expect << 1, 0, 0, 2;
    CHECK(cmax_diff(l, expect) < 1e-12);

    RMat j(2, 2);
    j << 1, 1, 0, 1;
    CMat lj = commuting_log(j);
    CMat exj(2, 2);
    exj << 0, 1, 0, 0;
    CHECK(cmax_diff(lj, exj) < 1e-12);
}

TEST_CASE("exp of log reproduces the input") {
    auto rng = fixed_rng(16);
    for (int trial = 0; trial < 20; ++trial) {
        int n = 2 + trial % 4;
        RMat m = random_shifted(rng, n);
        CMat back = expm(commuting_log(m));
        CHECK(cmax_diff(back, to_complex(m)) < 1e-9 * (1.0 + m.norm()));
    }
}

TEST_CASE("logarithm enforces the principal branch") {
    RMat neg(2, 2);
    neg << -1, 0, 0, 2;
    CHECK_THROWS_AS(commuting_log(neg), BranchCutError);
    RMat sing(2, 2);
    sing << 1, 2, 2, 4;
    CHECK_THROWS_AS(commuting_log(sing), SingularMatrixError);
}

TEST_CASE("block determinant of trivial blocks") {
    RMat id = RMat::Identity(3, 3);
    RMat zero = RMat::Zero(3, 3);
    CHECK(block_det_commuting(id, zero, zero, id) == Catch::Approx(1.0));
}

TEST_CASE("antisymmetric block arrangement factors the determinant") {
    auto rng = fixed_rng(17);
    for (int trial = 0; trial < 10; ++trial) {
        int n = 2 + trial % 3;
        RMat m1 = random_matrix(rng, n, 1.0);
        RMat m2 = RMat(0.3 * RMat::Identity(n, n) + 0.2 * m1);
        double lhs = block_det_commuting(m1, m2, RMat(-m2), RMat(-m1));
        double rhs = determinant(RMat(m1 + m2)) * determinant(RMat(m2 - m1));
        CHECK(lhs == Catch::Approx(rhs).epsilon(1e-10).margin(1e-12));
    }
}

TEST_CASE("block determinant agrees with the assembled matrix") {
    auto rng = fixed_rng(18);
    for (int trial = 0; trial < 100; ++trial) {
        int n = 1 + trial % 5;
        RMat m1 = random_matrix(rng, n, 1.0);
        // m3 = polynomial in m1 so the pair commutes exactly.
        RMat m3 = RMat(0.4 * RMat::Identity(n, n) - 0.6 * m1 + 0.1 * m1 * m1);
        RMat m2 = random_matrix(rng, n, 1.0);
        RMat m4 = random_matrix(rng, n, 1.0);

        RMat full(2 * n, 2 * n);
        full.topLeftCorner(n, n) = m1;
        full.topRightCorner(n, n) = m2;
        full.bottomLeftCorner(n, n) = m3;
        full.bottomRightCorner(n, n) = m4;

        double got = block_det_commuting(m1, m2, m3, m4);
        double want = determinant(full);
        CHECK(got == Catch::Approx(want).epsilon(1e-10).margin(1e-12));
    }
}

TEST_CASE("block determinant rejects non-commuting diagonal blocks") {
    RMat m1(2, 2), m3(2, 2);
    m1 << 0, 1, 0, 0;
    m3 << 0, 0, 1, 0;
    RMat z = RMat::Zero(2, 2);
    CHECK_THROWS_AS(block_det_commuting(m1, z, m3, z), InvalidInputError);
    CHECK_THROWS_AS(block_det_commuting(m1, z, z, RMat(RMat::Zero(3, 3))), InvalidInputError);
}

TEST_CASE("eigenvalues of reference matrices") {
    RMat rot(2, 2);
    rot << 0, -1, 1, 0;
    CVec eigs = eigenvalues(rot);
    std::complex<double> a = eigs[0], b = eigs[1];
    if (a.imag() < b.imag()) std::swap(a, b);
    CHECK(std::abs(a - std::complex<double>(0, 1)) < 1e-12);
    CHECK(std::abs(b - std::complex<double>(0, -1)) < 1e-12);
}
