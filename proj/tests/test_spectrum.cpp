#include <doctest.h>

#include <cmath>
#include <numbers>

#include "heatctrl/error.hpp"
#include "heatctrl/quadrature.hpp"
#include "heatctrl/spectrum.hpp"

using namespace heatctrl;

namespace {

// tests/oracles/mpmath_values.py
constexpr double kRho1Alpha1 = 0.86033358901937976;
constexpr double kRho2Alpha1 = 3.4256184594817281;
constexpr double kN1Alpha1 = 0.78732760816821629;
constexpr double kRho1Alpha05 = 0.6532711870944031;
constexpr double kRho1Alpha5 = 1.3138377164928983;
constexpr double kTailN1Gap1 = 1.0344637240763893e-4;

constexpr double kPi = std::numbers::pi;

}  // namespace

TEST_CASE("alpha = 0 gives the closed form with the constant mode") {
    const auto b = compute_eigenvalues(0.0, 3);
    REQUIRE(b.count() == 3);
    CHECK(b.rhos[0] == 0.0);
    CHECK(b.rhos[1] == doctest::Approx(kPi).epsilon(1e-15));
    CHECK(b.rhos[2] == doctest::Approx(2 * kPi).epsilon(1e-15));
    CHECK(b.normalizers[0] == 1.0);
    CHECK(b.normalizers[1] == 0.5);
    CHECK(b.normalizers[2] == 0.5);
}

TEST_CASE("first roots match the high-precision reference") {
    const auto b = compute_eigenvalues(1.0, 2);
    CHECK(std::abs(b.rhos[0] - kRho1Alpha1) <= 1e-14);
    CHECK(std::abs(b.rhos[1] - kRho2Alpha1) <= 1e-14);
    CHECK(root_residual(b, 0) <= 1e-12L);
    CHECK(std::abs(b.normalizers[0] - kN1Alpha1) <= 1e-14);
    CHECK(std::abs(static_cast<double>(normalizer_from_alpha(b.rhos_ext[0], 1.0)) - kN1Alpha1) <= 1e-14);
    CHECK(std::abs(static_cast<double>(normalizer_from_double_angle(b.rhos_ext[0])) - kN1Alpha1) <= 1e-14);

    CHECK(std::abs(compute_eigenvalues(0.5, 1).rhos[0] - kRho1Alpha05) <= 1e-14);
    CHECK(std::abs(compute_eigenvalues(5.0, 1).rhos[0] - kRho1Alpha5) <= 1e-14);
}

TEST_CASE("basis invariants hold for 64 modes") {
    for (double alpha : {0.5, 1.0, 5.0}) {
        CAPTURE(alpha);
        const auto b = compute_eigenvalues(alpha, 64);
        double prev_offset = 1e300;
        for (int n = 0; n < b.count(); ++n) {
            CAPTURE(n);
            const double lo = n * kPi, hi = n * kPi + kPi / 2;
            CHECK(b.rhos[n] > lo);
            CHECK(b.rhos[n] < hi);
            if (n > 0) CHECK(b.rhos[n] > b.rhos[n - 1]);
            CHECK(root_residual(b, n) <= static_cast<long double>(b.residual_tol));
            const long double n1 = normalizer_from_double_angle(b.rhos_ext[n]);
            const long double n2 = normalizer_from_alpha(b.rhos_ext[n], alpha);
            CHECK(std::abs(static_cast<double>(n1 - n2)) <= 10 * b.residual_tol);
            CHECK(b.normalizers[n] > 0.5);
            const double offset = b.rhos[n] - lo;
            CHECK(offset < prev_offset);
            prev_offset = offset;
        }
    }
}

TEST_CASE("eigenfunctions are numerically orthogonal") {
    const auto b = compute_eigenvalues(1.0, 8);
    for (int n = 0; n < 8; ++n) {
        for (int m = 0; m <= n; ++m) {
            const auto est = quadrature::integrate(
                [&](double x) { return std::cos(b.rhos[n] * x) * std::cos(b.rhos[m] * x); }, 0.0, 1.0, 1e-14);
            if (n == m) {
                CHECK(std::abs(est.value - b.normalizers[n]) <= 1e-10);
            } else {
                CHECK(std::abs(est.value) <= 1e-10);
            }
        }
    }
}

TEST_CASE("root finding reports its failures") {
    CHECK_THROWS_AS(compute_eigenvalues(-1.0, 3), DomainError);
    CHECK_THROWS_AS(compute_eigenvalues(1.0, 0), DomainError);
    CHECK_THROWS_AS(compute_eigenvalues(1.0, 3, 0.0), DomainError);
    try {
        compute_eigenvalues(1.0, 3, 1e-40);
        FAIL("expected ConvergenceError");
    } catch (const ConvergenceError& e) {
        CHECK(e.index() >= 1);
        CHECK(e.index() <= 3);
    }
}

TEST_CASE("tail bound") {
    const auto b1 = compute_eigenvalues(1.0, 1);
    CHECK(tail_bound(b1, 1.0) == doctest::Approx(kTailN1Gap1).epsilon(1e-12));
    CHECK(tail_bound(b1, 1.0) <= 2 * std::exp(-kPi * kPi) * (1 + 1e-6));

    const auto b64 = compute_eigenvalues(1.0, 64);
    // Leading dropped term 2e^{−(64π)²·0.01} = 2e^{−404.3} ≈ 5.4e−176.
    const double lead = 2 * std::exp(-std::pow(64 * kPi, 2) * 0.01);
    CHECK(tail_bound(b64, 0.01) == doctest::Approx(lead).epsilon(1e-12));
    CHECK(tail_bound(b64, 0.01) < 1e-175);

    const auto b8 = compute_eigenvalues(1.0, 8);
    const auto b16 = compute_eigenvalues(1.0, 16);
    for (double gap : {1e-4, 1e-3, 1e-2, 0.1}) {
        CHECK(tail_bound(b8, gap) >= tail_bound(b16, gap));
        CHECK(tail_bound(b8, gap) >= tail_bound(b8, 2 * gap));
    }
    CHECK_THROWS_AS(tail_bound(b8, 0.0), DomainError);
    CHECK_THROWS_AS(tail_bound(b8, -1.0), DomainError);
}
