#include "qms/linalg.hpp"

#include <doctest.h>

#include <cmath>

using namespace qms;

namespace {

CMat pauli_x() {
    CMat m(2, 2);
    m << 0, 1, 1, 0;
    return m;
}

CMat proj(int d, int i) {
    CMat m = CMat::Zero(d, d);
    m(i, i) = 1.0;
    return m;
}

}  // namespace

TEST_CASE("kron identity and basis bookkeeping") {
    const CMat i2 = CMat::Identity(2, 2);
    CHECK((kron(i2, i2) - CMat::Identity(4, 4)).norm() == doctest::Approx(0.0));

    // |0><0| (x) |1><1| = E_11 (zero-based) in the 4x4 space
    const CMat e = kron(proj(2, 0), proj(2, 1));
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            CHECK(e(i, j).real() == doctest::Approx(i == 1 && j == 1 ? 1.0 : 0.0));

    // (sx (x) sx)^2 = I4, cross-checked by direct multiplication
    const CMat xx = kron(pauli_x(), pauli_x());
    CHECK((xx * xx - CMat::Identity(4, 4)).norm() == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("partial trace marginals") {
    // Bell state has maximally mixed marginal
    CVec bell = CVec::Zero(4);
    bell(0) = bell(3) = 1.0 / std::sqrt(2.0);
    const CMat rho = bell * bell.adjoint();
    const CMat red = partial_trace(rho, {2, 2}, {0});
    CHECK((red - CMat::Identity(2, 2) / 2.0).norm() < 1e-12);

    // product state marginal
    Rng rng(7);
    const CMat a = random_density(2, rng);
    const CMat b = random_density(3, rng);
    CHECK((partial_trace(kron(a, b), {2, 3}, {0}) - a).norm() < 1e-12);

    // index-loop oracle on a random 6x6 PSD with dims (3,2), tracing the size-2 factor
    const CMat x = random_psd(6, rng);
    CMat oracle = CMat::Zero(3, 3);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int t = 0; t < 2; ++t) oracle(i, j) += x(2 * i + t, 2 * j + t);
    CHECK((partial_trace(x, {3, 2}, {0}) - oracle).norm() < 1e-12);

    // composing over all factors equals the scalar trace
    const CMat full = partial_trace(x, {3, 2}, {});
    CHECK(std::abs(full(0, 0) - x.trace()) < 1e-12);
}

TEST_CASE("eig_general canonical cases") {
    SUBCASE("nilpotent 2x2") {
        CMat n(2, 2);
        n << 0, 1, 0, 0;
        const auto cl = eig_general(n);
        REQUIRE(cl.size() == 1);
        CHECK(std::abs(cl[0].value) < 1e-9);
        CHECK(cl[0].algebraic == 2);
        CHECK(cl[0].geometric == 1);
    }
    SUBCASE("diagonal") {
        CMat d = CMat::Zero(2, 2);
        d(0, 0) = 1.0;
        d(1, 1) = 0.5;
        const auto cl = eig_general(d);
        REQUIRE(cl.size() == 2);
        CHECK(std::abs(cl[0].value - 1.0) < 1e-12);
        CHECK(std::abs(cl[1].value - 0.5) < 1e-12);
        CHECK(cl[0].algebraic == 1);
        CHECK(cl[0].geometric == 1);
    }
    SUBCASE("amplitude damping superoperator, char-poly oracle") {
        // explicit 4x4 superoperator of AD(gamma = 0.75), column-stacking basis
        const double g = 0.75;
        CMat s = CMat::Zero(4, 4);
        s(0, 0) = 1.0;
        s(0, 3) = g;
        s(1, 1) = std::sqrt(1.0 - g);
        s(2, 2) = std::sqrt(1.0 - g);
        s(3, 3) = 1.0 - g;
        // characteristic polynomial from Newton's identities (trace powers)
        double p[5];  // coefficients of lambda^4 + c3 l^3 + c2 l^2 + c1 l + c0
        {
            double t1 = s.trace().real();
            double t2 = (s * s).trace().real();
            double t3 = (s * s * s).trace().real();
            double t4 = (s * s * s * s).trace().real();
            p[3] = -t1;
            p[2] = (t1 * t1 - t2) / 2.0;
            p[1] = -(t1 * t1 * t1 - 3 * t1 * t2 + 2 * t3) / 6.0;
            p[0] = (t1 * t1 * t1 * t1 - 6 * t1 * t1 * t2 + 3 * t2 * t2 + 8 * t1 * t3 - 6 * t4) / 24.0;
            p[4] = 1.0;
        }
        // expected roots {1, 0.5, 0.5, 0.25}: expand (l-1)(l-.25)(l-.5)^2
        const double e3 = -(1.0 + 0.25 + 0.5 + 0.5);
        const double e2 = 1.0 * 0.25 + 1.0 * 0.5 + 1.0 * 0.5 + 0.25 * 0.5 + 0.25 * 0.5 + 0.5 * 0.5;
        const double e1 = -(1.0 * 0.25 * 0.5 + 1.0 * 0.25 * 0.5 + 1.0 * 0.5 * 0.5 + 0.25 * 0.5 * 0.5);
        const double e0 = 1.0 * 0.25 * 0.5 * 0.5;
        CHECK(p[3] == doctest::Approx(e3).epsilon(1e-12));
        CHECK(p[2] == doctest::Approx(e2).epsilon(1e-12));
        CHECK(p[1] == doctest::Approx(e1).epsilon(1e-12));
        CHECK(p[0] == doctest::Approx(e0).epsilon(1e-12));

        const auto cl = eig_general(s);
        std::vector<double> mags;
        for (const auto& c : cl)
            for (int r = 0; r < c.algebraic; ++r) mags.push_back(std::abs(c.value));
        std::sort(mags.begin(), mags.end());
        REQUIRE(mags.size() == 4);
        CHECK(mags[0] == doctest::Approx(0.25).epsilon(1e-9));
        CHECK(mags[1] == doctest::Approx(0.5).epsilon(1e-9));
        CHECK(mags[2] == doctest::Approx(0.5).epsilon(1e-9));
        CHECK(mags[3] == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("eig_general multiplicity accounting on random matrices") {
    Rng rng(42);
    for (int trial = 0; trial < 20; ++trial) {
        const int d = 3 + static_cast<int>(rng.raw() % 5);
        const CMat x = random_ginibre(d, d, rng);
        const auto cl = eig_general(x);
        int total = 0;
        for (const auto& c : cl) {
            total += c.algebraic;
            CHECK(c.geometric <= c.algebraic);
            CHECK(c.geometric >= 1);
        }
        CHECK(total == d);
    }
}

TEST_CASE("trace norm") {
    CMat d = CMat::Zero(2, 2);
    d(0, 0) = 1.0;
    d(1, 1) = -1.0;
    CHECK(trace_norm(d) == doctest::Approx(2.0));

    Rng rng(3);
    for (int dd : {2, 3, 5}) {
        const CMat u = random_unitary(dd, rng);
        CHECK(trace_norm(u) == doctest::Approx(static_cast<double>(dd)).epsilon(1e-10));
    }

    // Hermitian-eig oracle: sum of sqrt eigenvalues of X^dag X
    const CMat x = random_ginibre(3, 3, rng);
    Eigen::SelfAdjointEigenSolver<CMat> es(CMat(x.adjoint() * x));
    double oracle = 0.0;
    for (int i = 0; i < 3; ++i) oracle += std::sqrt(std::max(0.0, es.eigenvalues()(i)));
    CHECK(trace_norm(x) == doctest::Approx(oracle).epsilon(1e-10));

    // |Tr(x)| <= ||x||_1 on random instances
    for (int trial = 0; trial < 200; ++trial) {
        const int dd = 2 + static_cast<int>(rng.raw() % 4);
        const CMat m = random_ginibre(dd, dd, rng);
        CHECK(trace_norm(m) >= std::abs(m.trace()) - 1e-10);
    }
}

TEST_CASE("psd sqrt") {
    const CMat half = CMat::Identity(2, 2) / 2.0;
    CHECK((psd_sqrt(half) - CMat::Identity(2, 2) / std::sqrt(2.0)).norm() < 1e-12);

    CMat p = CMat::Zero(2, 2);
    p(0, 0) = 1.0;
    CHECK((psd_sqrt(p) - p).norm() < 1e-12);

    CMat diag = CMat::Zero(2, 2);
    diag(0, 0) = 4.0 / 5.0;
    diag(1, 1) = 1.0 / 5.0;
    CMat expect = CMat::Zero(2, 2);
    expect(0, 0) = 2.0 / std::sqrt(5.0);
    expect(1, 1) = 1.0 / std::sqrt(5.0);
    CHECK((psd_sqrt(diag) - expect).norm() < 1e-12);

    Rng rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        const int d = 2 + static_cast<int>(rng.raw() % 4);
        const CMat x = random_psd(d, rng);
        const CMat r = psd_sqrt(x);
        CHECK((r * r - x).cwiseAbs().maxCoeff() < 1e-9);
    }

    CMat neg = CMat::Identity(2, 2);
    neg(1, 1) = -0.5;
    CHECK_THROWS(psd_sqrt(neg));
}

TEST_CASE("density validation") {
    CHECK_THROWS(make_density(CMat::Identity(2, 2)));           // trace 2
    CHECK_NOTHROW(make_density(CMat::Identity(2, 2) / 2.0));
    CMat nh(2, 2);
    nh << 0.5, 0.5, -0.5, 0.5;
    CHECK_THROWS(make_density(nh));
}
