#include <doctest.h>

#include <cmath>
#include <random>

#include "heatctrl/error.hpp"
#include "heatctrl/oracle.hpp"
#include "heatctrl/solver.hpp"
#include "support.hpp"

using namespace heatctrl;
using namespace heatctrl::oracle;

namespace {

double richardson_slope(double coarse, double mid, double fine) {
    return std::log2(std::abs(coarse - mid) / std::abs(mid - fine));
}

}  // namespace

TEST_CASE("grid validation") {
    CHECK_THROWS_AS(FDGrid({2, 10}).validate(), DomainError);
    CHECK_THROWS_AS(FDGrid({5, 1}).validate(), DomainError);
    CHECK_NOTHROW(FDGrid({3, 2}).validate());
    const auto p = testing::generic_problem(4);
    CHECK_THROWS_AS(cn_forward(p, Control::constant(1.0, 4, -1, 1, 0.0), FDGrid{2, 10}), DomainError);
    CHECK_THROWS_AS(cn_adjoint(p, std::vector<double>(7, 0.0), FDGrid{9, 10}), DomainError);

    const FDGrid g{5, 4};
    const auto w = trapezoid_weights(g);
    CHECK(w == std::vector<double>{0.125, 0.25, 0.25, 0.25, 0.125});
    CHECK(space_nodes(g).back() == 1.0);
    CHECK(l2_norm(g, std::vector<double>(5, 2.0)) == doctest::Approx(2.0));
}

TEST_CASE("zero data gives zero solutions") {
    const auto p = testing::generic_problem(4);
    const FDGrid grid{65, 128};
    for (double v : cn_forward(p, Control::constant(1.0, 4, -1, 1, 0.0), grid)) CHECK(v == 0.0);
    const auto adj = cn_adjoint(p, std::vector<double>(65, 0.0), grid);
    CHECK(adj.times.size() == 129);
    for (double v : adj.trace) CHECK(v == 0.0);
}

TEST_CASE("Crank-Nicolson converges at second order") {
    auto p = testing::generic_problem(1);
    const auto u = Control::constant(1.0, 1, -1, 1, 1.0);
    std::vector<double> end_trace, mid_profile;
    for (int level = 0; level < 3; ++level) {
        const FDGrid grid{33 * (1 << level) - (1 << level) + 1, 64 << level};
        const auto y = cn_forward(p, u, grid);
        end_trace.push_back(y.back());
        mid_profile.push_back(y[(grid.space_points - 1) / 2]);
    }
    const double s1 = richardson_slope(end_trace[0], end_trace[1], end_trace[2]);
    const double s2 = richardson_slope(mid_profile[0], mid_profile[1], mid_profile[2]);
    CHECK(s1 >= 1.7);
    CHECK(s1 <= 2.3);
    CHECK(s2 >= 1.7);
    CHECK(s2 <= 2.3);
}

TEST_CASE("terminal profile agrees with the eigen-expansion") {
    auto p = testing::generic_problem(16);
    // 512 modes: the 64-mode reconstruction of a boundary-controlled state has a
    // truncation tail of about 1.6e−4·|u(T)|.
    p.modes = 512;
    const Discretization disc(p);
    std::mt19937_64 rng(37);
    const FDGrid grid;
    const auto x = space_nodes(grid);
    for (int trial = 0; trial < 3; ++trial) {
        const auto u = testing::random_control(p, 16, rng);
        const auto y = cn_forward(p, u, grid);
        const auto g = disc.state(u.values);
        std::vector<double> diff(x.size());
        for (std::size_t j = 0; j < x.size(); ++j) diff[j] = y[j] - reconstruct(disc.basis(), g, x[j]);
        CHECK(l2_norm(grid, diff) <= 1e-4);
    }
}

TEST_CASE("single eigenfunction decays exponentially in the adjoint") {
    const auto p = testing::generic_problem(4);
    const double rho = compute_eigenvalues(1.0, 1).rhos[0];
    const FDGrid grid;
    std::vector<double> profile;
    for (double x : space_nodes(grid)) profile.push_back(std::cos(rho * x));
    const auto adj = cn_adjoint(p, profile, grid);
    double worst = 0.0;
    for (std::size_t n = 0; n < adj.times.size(); ++n) {
        worst = std::max(worst, std::abs(adj.trace[n] - std::cos(rho) * std::exp(-rho * rho * (1 - adj.times[n]))));
    }
    CHECK(worst <= 1e-4);
}

TEST_CASE("discrete duality") {
    std::mt19937_64 rng(41);
    std::normal_distribution<double> normal(0.0, 1.0);
    const FDGrid grid{129, 256};
    for (bool distributed : {false, true}) {
        auto p = testing::generic_problem(8);
        if (distributed) {
            p.shape = ShapeKind::distributed;
            p.shape_profile = Profile::polynomial({1.0, -0.5, 0.25});
        }
        for (int trial = 0; trial < 5; ++trial) {
            const auto u = testing::random_control(p, 8, rng);
            std::vector<double> q(grid.space_points);
            for (double& v : q) v = normal(rng);
            CHECK(duality_defect(p, u, q, grid) <= 1e-6);
        }
    }
}

TEST_CASE("finite-difference gradient") {
    auto p = testing::generic_problem(8);
    std::mt19937_64 rng(43);
    const auto u = testing::random_control(p, 8, rng);
    // The smooth part is quadratic, so central differences are exact up to roundoff.
    CHECK(fd_gradient_check(p, u, 1e-4).max_relative_error <= 1e-9);
    CHECK(fd_gradient_check(p, u, 1e-2).max_relative_error <= 1e-9);

    p.nu = 0.3;
    const auto with_nu = fd_gradient_check(p, u, 1e-4);
    CHECK(with_nu.max_relative_error <= 1e-6);
    p.nu = 0.0;
    const auto without = fd_gradient_check(p, u, 1e-4);
    for (int k = 0; k < 8; ++k) {
        CHECK(with_nu.analytic[k] - without.analytic[k] == doctest::Approx(0.3 * u.values[k] / 8).epsilon(1e-12));
    }

    CHECK_THROWS_AS(fd_gradient_check(p, u, 0.0), DomainError);
    auto big = testing::generic_problem(17);
    CHECK_THROWS_AS(fd_gradient_check(big, Control::constant(1.0, 17, -1, 1, 0.0), 1e-4), DomainError);
}

TEST_CASE("brute-force enumeration") {
    auto p = testing::generic_problem(4);
    p.target = Profile::constant(0.0);
    const auto zero = brute_force_best(p);
    CHECK(zero.objective == 0.0);
    for (double v : zero.control.values) CHECK(v == 0.0);
    CHECK(zero.candidates == 81);

    auto one = testing::generic_problem(1);
    const auto best = brute_force_best(one);
    CHECK(best.candidates == 3);
    double direct = 1e300;
    for (double v : {one.lower, 0.0, one.upper}) {
        direct = std::min(direct, objective(one, Control::constant(1.0, 1, one.lower, one.upper, v)).total());
    }
    CHECK(best.objective == doctest::Approx(direct).epsilon(1e-14));

    CHECK_THROWS_AS(brute_force_best(testing::generic_problem(9)), DomainError);
}
