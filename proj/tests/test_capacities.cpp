#include "qms/capacities.hpp"

#include "qms/spectral.hpp"
#include "qms/zoo.hpp"

#include <doctest.h>

#include <cmath>

using namespace qms;

namespace {

PeripheralDecomposition fake_decomp(const std::vector<int>& ds) {
    PeripheralDecomposition d;
    for (int dd : ds) {
        PeripheralBlock b;
        b.d = dd;
        b.m = 1;
        d.blocks.push_back(b);
    }
    return d;
}

constexpr int kQ = static_cast<int>(CapKind::Q);
constexpr int kC = static_cast<int>(CapKind::C);
constexpr int kP = static_cast<int>(CapKind::Cp);
constexpr int kE = static_cast<int>(CapKind::Cea);

}  // namespace

TEST_CASE("lower bounds from block dimensions") {
    const auto b21 = lower_bounds(fake_decomp({2, 1}));
    CHECK(b21[kQ] == doctest::Approx(1.0));
    CHECK(b21[kP] == doctest::Approx(1.0));
    CHECK(b21[kC] == doctest::Approx(std::log2(3.0)));
    CHECK(b21[kE] == doctest::Approx(std::log2(5.0)));

    const auto id2 = lower_bounds(fake_decomp({2}));
    CHECK(id2[kQ] == doctest::Approx(1.0));
    CHECK(id2[kC] == doctest::Approx(1.0));
    CHECK(id2[kE] == doctest::Approx(2.0));

    const auto dep = lower_bounds(fake_decomp({1}));
    for (int i = 0; i < 4; ++i) CHECK(dep[i] == doctest::Approx(0.0));

    CHECK_THROWS(lower_bounds(PeripheralDecomposition{}));
}

TEST_CASE("upper bounds and the validity gate") {
    const auto d = fake_decomp({2, 1});
    SUBCASE("additive penalty") {
        const auto rep = upper_bounds(d, 0.1, 3, 0.05, "sdp");
        const double pen = -std::log2(0.85);
        for (int i = 0; i < 4; ++i) {
            REQUIRE(rep.kinds[i].valid);
            CHECK(*rep.kinds[i].upper - rep.kinds[i].lower == doctest::Approx(pen).epsilon(1e-12));
        }
        CHECK(pen == doctest::Approx(0.23446525364).epsilon(1e-9));
    }
    SUBCASE("bounds pinch at eps = delta = 0") {
        const auto rep = upper_bounds(d, 0.0, 1, 0.0, "sdp");
        for (int i = 0; i < 4; ++i)
            CHECK(*rep.kinds[i].upper == doctest::Approx(rep.kinds[i].lower));
    }
    SUBCASE("undefined when eps + delta >= 1") {
        const auto rep = upper_bounds(d, 0.6, 1, 0.5, "envelope");
        for (int i = 0; i < 4; ++i) {
            CHECK_FALSE(rep.kinds[i].valid);
            CHECK_FALSE(rep.kinds[i].upper.has_value());
        }
    }
    SUBCASE("ordering of lower bounds") {
        for (const auto& ds : {std::vector<int>{2, 1}, std::vector<int>{3, 2, 2},
                               std::vector<int>{1, 1, 1}}) {
            const auto lo = lower_bounds(fake_decomp(ds));
            CHECK(lo[kQ] == doctest::Approx(lo[kP]));
            CHECK(lo[kQ] <= lo[kC] + 1e-12);
            CHECK(lo[kC] <= lo[kE] + 1e-12);
        }
    }
}

TEST_CASE("infinite time intervals") {
    const auto id2 = infinite_time(fake_decomp({2}), 0.0);
    CHECK(id2[kQ].lower == doctest::Approx(1.0));
    CHECK(id2[kQ].upper == doctest::Approx(1.0));

    const auto b21 = infinite_time(fake_decomp({2, 1}), 0.5);
    CHECK(b21[kC].lower == doctest::Approx(std::log2(3.0)));
    CHECK(b21[kC].upper == doctest::Approx(std::log2(3.0) + 1.0));

    const auto triv = infinite_time(fake_decomp({1}), 0.3);
    CHECK(triv[kQ].lower == doctest::Approx(0.0));
    CHECK(triv[kQ].upper == doctest::Approx(-std::log2(0.7)));
}

TEST_CASE("iid bounds") {
    SUBCASE("identity qubit times ten") {
        const auto b = iid_bounds(fake_decomp({2}), 0.0, 0.0, 10, 0.0, 1);
        CHECK(b.total[kQ].lower == doctest::Approx(10.0));
        CHECK(b.per_copy[kQ].lower == doctest::Approx(1.0));
    }
    SUBCASE("envelope arithmetic") {
        const auto b = iid_bounds(fake_decomp({2}), 1.0, 0.5, 8, 0.0, 10);
        CHECK(b.delta_used == doctest::Approx(8.0 * std::pow(2.0, -10.0)).epsilon(1e-12));
        CHECK(b.delta_used == doctest::Approx(0.0078125));
    }
    SUBCASE("per-copy correction") {
        const auto b = iid_bounds(fake_decomp({2}), 0.0, 0.0, 4, 0.5, 1);
        // upper carries (1/m) log2 1/(1-eps)
        CHECK(*b.per_copy[kQ].upper - b.per_copy[kQ].lower ==
              doctest::Approx(1.0 / 4.0).epsilon(1e-12));
    }
    SUBCASE("matches the explicitly formed tensor power") {
        const Channel ad = make_amplitude_damping(0.75);
        const auto a1 = analyze_channel(ad);
        const auto fit = fit_kappa(ad, a1.asym, {1, 2, 3, 4, 5, 6});
        const auto iid = iid_bounds(a1.decomp, fit.kappa, fit.mu, 2, 0.05, 3);

        const auto a2 = analyze_channel(tensor_channel(ad, ad));
        const auto lo2 = lower_bounds(a2.decomp);
        for (int i = 0; i < 4; ++i)
            CHECK(iid.total[i].lower == doctest::Approx(2.0 * lower_bounds(a1.decomp)[i]));
        for (int i = 0; i < 4; ++i) CHECK(iid.total[i].lower == doctest::Approx(lo2[i]));
    }
    SUBCASE("tensor power with nontrivial rates") {
        const Channel pin = make_pinching({2, 1});
        const auto a1 = analyze_channel(pin);
        const auto iid = iid_bounds(a1.decomp, 0.0, 0.0, 2, 0.0, 1);
        const auto a2 = analyze_channel(tensor_channel(pin, pin));
        const auto lo2 = lower_bounds(a2.decomp);
        // blocks {2,1} x {2,1}: Q = 2, C = log2 9, Cea = log2 25
        CHECK(iid.total[kQ].lower == doctest::Approx(2.0).epsilon(1e-12));
        for (int i = 0; i < 4; ++i)
            CHECK(iid.total[i].lower == doctest::Approx(lo2[i]).epsilon(1e-12));
    }
}

TEST_CASE("convergence time") {
    CHECK(convergence_time(2.0, 0.5, 0.1) == 5);
    CHECK(convergence_time(0.05, 0.5, 0.1) == 1);   // kappa already below the target
    CHECK_THROWS(convergence_time(1.0, 1.0, 0.1));
    CHECK_THROWS(convergence_time(1.0, 0.0, 0.1));

    // consistency with the measured Delta_n sequence for amplitude damping
    const Channel ad = make_amplitude_damping(0.75);
    const auto a = analyze_channel(ad);
    std::vector<long> ns;
    for (long n = 1; n <= 12; ++n) ns.push_back(n);
    const auto fit = fit_kappa(ad, a.asym, ns);
    const double target = 1e-2;
    const long nstar = convergence_time(fit.kappa, fit.mu, target);
    long first = -1;
    for (const auto& [n, dn] : fit.deltas)
        if (dn <= target) {
            first = n;
            break;
        }
    REQUIRE(first > 0);
    CHECK(std::abs(nstar - first) <= 1);
}

TEST_CASE("upper bounds approach the infinite-time values as delta vanishes") {
    const auto d = fake_decomp({2, 1});
    const double eps = 0.1;
    const auto inf = infinite_time(d, eps);
    double prev_upper = 1e300;
    for (double delta : {0.5, 0.1, 1e-3, 1e-8}) {
        const auto rep = upper_bounds(d, eps, 1, delta, "sdp");
        REQUIRE(rep.kinds[kC].valid);
        CHECK(*rep.kinds[kC].upper <= prev_upper + 1e-12);   // nonincreasing in delta
        prev_upper = *rep.kinds[kC].upper;
    }
    const auto rep = upper_bounds(d, eps, 1, 1e-8, "sdp");
    for (int i = 0; i < 4; ++i)
        CHECK(*rep.kinds[i].upper == doctest::Approx(inf[i].upper).epsilon(1e-6));
}
