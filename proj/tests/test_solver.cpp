#include <doctest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <random>

#include "heatctrl/error.hpp"
#include "heatctrl/optimality.hpp"
#include "heatctrl/oracle.hpp"
#include "heatctrl/solver.hpp"
#include "support.hpp"

using namespace heatctrl;

namespace {

// tests/oracles/mpmath_values.py: single mode, α = 1, M = 1, T = 1.
constexpr double kSingleModeNormSq = 0.26969324775198834;

double dense_norm_sq(const Discretization& disc) {
    const auto& f = disc.forward();
    Eigen::MatrixXd m(f.modes, f.cells);
    for (int n = 0; n < f.modes; ++n)
        for (int k = 0; k < f.cells; ++k) m(n, k) = f(n, k);
    Eigen::VectorXd inv_norm(f.modes);
    for (int n = 0; n < f.modes; ++n) inv_norm(n) = 1.0 / disc.basis().normalizers[n];
    const Eigen::MatrixXd gram = m.transpose() * inv_norm.asDiagonal() * m / disc.cell_width();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
    return eig.eigenvalues().maxCoeff();
}

SolveOptions quiet(double tol = 1e-10, int iters = 200000) {
    SolveOptions o;
    o.tol = tol;
    o.max_iters = iters;
    return o;
}

}  // namespace

TEST_CASE("operator norm against a dense eigensolver") {
    for (int cells : {1, 2, 5, 16}) {
        for (double alpha : {0.0, 1.0, 5.0}) {
            auto p = testing::generic_problem(cells);
            p.alpha = alpha;
            const Discretization disc(p);
            CHECK(operator_norm_sq(disc) == doctest::Approx(dense_norm_sq(disc)).epsilon(1e-7));
        }
    }

    auto p = testing::generic_problem(1);
    p.modes = 1;
    CHECK(operator_norm_sq(Discretization(p)) == doctest::Approx(kSingleModeNormSq).epsilon(1e-12));
}

TEST_CASE("operator norm of empty, zero and scaled operators") {
    kernels::ModeCellMatrix empty{0, 4, {}};
    CHECK(operator_norm_sq(empty, {}, 0.25) == 0.0);
    kernels::ModeCellMatrix zero{3, 4, std::vector<double>(12, 0.0)};
    const std::vector<double> norms{0.5, 0.5, 0.5};
    CHECK(operator_norm_sq(zero, norms, 0.25) == 0.0);

    const Discretization disc(testing::generic_problem(8));
    auto doubled = disc.forward();
    for (double& v : doubled.data) v *= 2;
    CHECK(operator_norm_sq(doubled, disc.basis().normalizers, disc.cell_width()) ==
          doctest::Approx(4 * operator_norm_sq(disc)).epsilon(1e-7));
}

TEST_CASE("objective examples and convexity") {
    auto p = testing::generic_problem(8);
    p.target = Profile::constant(0.0);
    p.nu = 0.1;
    const auto zero = objective(p, Control::constant(1.0, 8, -1, 1, 0.0));
    CHECK(zero.tracking == 0.0);
    CHECK(zero.tikhonov == 0.0);
    CHECK(zero.sparse == 0.0);

    p.target = Profile::constant(0.5);
    const auto shifted = objective(p, Control::constant(1.0, 8, -1, 1, 0.0));
    // ½‖0.5‖² on 64 modes; the truncation misses a tail of order 1/N.
    CHECK(shifted.tracking == doctest::Approx(0.125).epsilon(2e-3));
    CHECK(shifted.tracking <= 0.125);
    CHECK(shifted.tikhonov == 0.0);
    CHECK(shifted.sparse == 0.0);

    const auto ones = objective(p, Control::constant(1.0, 8, -1, 1, 0.5));
    CHECK(ones.tikhonov == doctest::Approx(0.05 * 0.25).epsilon(1e-14));
    CHECK(ones.sparse == doctest::Approx(0.02 * 0.5).epsilon(1e-14));

    std::mt19937_64 rng(23);
    const Discretization disc(p);
    for (int i = 0; i < 50; ++i) {
        const auto u = testing::random_control(p, 8, rng), v = testing::random_control(p, 8, rng);
        std::vector<double> mid(8);
        for (int k = 0; k < 8; ++k) mid[k] = 0.5 * (u.values[k] + v.values[k]);
        const double fu = objective(disc, u.values).total(), fv = objective(disc, v.values).total();
        CHECK(objective(disc, mid).total() <= 0.5 * (fu + fv) + 1e-14);
        const auto t = objective(disc, u.values);
        CHECK(t.tracking >= 0.0);
        CHECK(t.tikhonov >= 0.0);
        CHECK(t.sparse >= 0.0);
    }
}

TEST_CASE("soft clamp") {
    CHECK(soft_clamp(0.3, 0.1, -1, 1) == doctest::Approx(0.2));
    CHECK(soft_clamp(-0.05, 0.1, -1, 1) == 0.0);
    CHECK(soft_clamp(3.0, 0.1, -1, 1) == 1.0);
    CHECK(soft_clamp(-3.0, 0.1, -0.5, 1) == -0.5);
}

TEST_CASE("large sparsity weight gives the zero control") {
    for (double nu : {0.0, 0.1}) {
        auto p = testing::generic_problem(16);
        p.nu = nu;
        const Discretization probe(p);
        const auto phi = probe.cell_averages(probe.trace(std::vector<double>(16, 0.0)));
        double sup = 0.0;
        for (double v : phi) sup = std::max(sup, std::abs(v));
        p.mu = 1.01 * sup;
        SolveOptions o = quiet();
        o.warm_start = std::vector<double>(16, 0.7);
        const auto r = solve(p, o);
        CHECK(r.converged);
        for (double v : r.control.values) CHECK(v == 0.0);
    }
}

TEST_CASE("plain proximal gradient decreases the objective monotonically") {
    for (double nu : {0.0, 0.05}) {
        for (StepRule rule : {StepRule::fixed, StepRule::backtracking}) {
            auto p = testing::generic_problem(16);
            p.nu = nu;
            SolveOptions o = quiet(1e-9, 3000);
            o.acceleration = false;
            o.step_rule = rule;
            bool admissible = true;
            const auto r = solve(p, o);
            for (std::size_t i = 1; i < r.objective_history.size(); ++i) {
                CHECK(r.objective_history[i] <= r.objective_history[i - 1] + 1e-12);
            }
            for (double v : r.control.values) admissible = admissible && v >= p.lower && v <= p.upper;
            CHECK(admissible);
        }
    }
}

TEST_CASE("tight bounds and the iteration callback") {
    auto p = testing::generic_problem(32);
    p.lower = -0.3;
    p.upper = 0.2;
    const Discretization disc(p);
    SolveOptions o = quiet(1e-10, 2000);
    int checked = 0;
    o.on_iteration = [&](int, double f, double) {
        CHECK(std::isfinite(f));
        ++checked;
    };
    const auto r = solve(disc, o);
    CHECK(checked == r.iterations);
    for (double v : r.control.values) {
        CHECK(v >= p.lower);
        CHECK(v <= p.upper);
    }
}

TEST_CASE("converged controls satisfy the discrete optimality system") {
    for (double nu : {0.0, 1e-3, 0.1}) {
        for (StepRule rule : {StepRule::fixed, StepRule::backtracking}) {
            auto p = testing::generic_problem(32);
            p.nu = nu;
            const Discretization disc(p);
            SolveOptions o = quiet(1e-9);
            o.step_rule = rule;
            const auto r = solve(disc, o);
            REQUIRE(r.converged);
            CHECK(r.residual <= 1e-9);
            const auto phi = disc.cell_averages(disc.trace(r.control.values));
            CHECK(variational_gap(r.control.values, phi, p) <= 1e-9 * (p.upper - p.lower));
            if (nu > 0) {
                for (int k = 0; k < 32; ++k) {
                    CHECK(std::abs(r.control.values[k] - prox_map(phi[k], nu, p.mu, p.lower, p.upper)) <= 1e-9);
                }
            }
        }
    }
}

TEST_CASE("unique optimum from different warm starts") {
    auto p = testing::generic_problem(24);
    p.nu = 0.01;
    const double tol = 1e-10;
    SolveOptions a = quiet(tol), b = quiet(tol);
    a.warm_start = std::vector<double>(24, p.lower);
    b.warm_start = std::vector<double>(24, p.upper);
    const auto ra = solve(p, a), rb = solve(p, b);
    REQUIRE(ra.converged);
    REQUIRE(rb.converged);
    for (int k = 0; k < 24; ++k) CHECK(std::abs(ra.control.values[k] - rb.control.values[k]) <= 10 * tol);
}

TEST_CASE("tracking a reachable target") {
    auto p = testing::generic_problem(16);
    std::mt19937_64 rng(29);
    const auto reachable = testing::random_control(p, 16, rng);
    const Discretization probe(p);
    const auto g = probe.state(reachable.values);
    // A table target reproducing y_û(·,T) on a fine grid.
    std::vector<double> xs(401), ys(401);
    for (int j = 0; j <= 400; ++j) {
        xs[j] = j / 400.0;
        ys[j] = reconstruct(probe.basis(), g, xs[j]);
    }
    p.target = Profile::table(xs, ys);
    p.nu = 1e-4;
    p.mu = 1e-4;
    const Discretization disc(p);
    const auto r = solve(disc, quiet(1e-9));
    // Optimality bounds the tracking term by F(û), which is almost all regularization.
    const auto at_target = objective(disc, reachable.values);
    CHECK(at_target.tracking <= 1e-10);
    CHECK(r.objective.total() <= at_target.total() + 1e-14);
    CHECK(r.objective.tracking <= at_target.total());
}

TEST_CASE("nu = 0 solution beats every three-level control on a small grid") {
    auto p = testing::generic_problem(6);
    const auto r = solve(p, quiet(1e-11));
    const auto best = oracle::brute_force_best(p);
    CHECK(best.candidates == 729);
    CHECK(r.objective.total() <= best.objective + 1e-12);
}

TEST_CASE("non-convergence returns the best iterate") {
    const auto r = solve(testing::generic_problem(32), quiet(1e-14, 3));
    CHECK_FALSE(r.converged);
    CHECK(r.iterations == 3);
    CHECK(r.residual == *std::min_element(r.residual_history.begin(), r.residual_history.end()));
}

TEST_CASE("invalid inputs") {
    auto p = testing::generic_problem(8);
    p.mu = 0.0;
    CHECK_THROWS_AS(solve(p), DomainError);
    SolveOptions o;
    o.tol = 0.0;
    CHECK_THROWS(solve(testing::generic_problem(8), o));
    o = SolveOptions{};
    o.max_iters = 0;
    CHECK_THROWS(solve(testing::generic_problem(8), o));
    o = SolveOptions{};
    o.warm_start = std::vector<double>(3, 0.0);
    CHECK_THROWS(solve(testing::generic_problem(8), o));
}
