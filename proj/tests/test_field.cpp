#include <doctest.h>

#include <cmath>
#include <random>

#include "heatctrl/error.hpp"
#include "heatctrl/field.hpp"
#include "heatctrl/oracle.hpp"
#include "heatctrl/quadrature.hpp"
#include "heatctrl/solver.hpp"
#include "support.hpp"

using namespace heatctrl;

namespace {

// tests/oracles/mpmath_values.py
constexpr double kG1 = 0.46080032518618208;  // u ≡ 1, T = 1, α = 1
constexpr double kW1 = 0.88112352740234218;  // y_Ω ≡ 1, α = 1
constexpr double kY1 = 0.65182314833833059;  // y(1,1) for u ≡ 1, α = 1

double norm_sq(const EigenBasis& b, const std::vector<double>& g) {
    double acc = 0.0;
    for (int n = 0; n < b.count(); ++n) acc += g[n] * g[n] / b.normalizers[n];
    return acc;
}

}  // namespace

TEST_CASE("terminal coefficients") {
    const auto basis = compute_eigenvalues(1.0, 64);
    const auto shape = boundary_shape(basis);

    const auto zero = terminal_coefficients(basis, Control::constant(1.0, 16, -1, 1, 0.0), shape);
    for (double g : zero) CHECK(g == 0.0);

    const auto one = terminal_coefficients(basis, Control::constant(1.0, 16, -1, 1, 1.0), shape);
    CHECK(std::abs(one[0] - kG1) <= 1e-14);

    std::mt19937_64 rng(3);
    const auto p = testing::generic_problem();
    const auto u1 = testing::random_control(p, 16, rng);
    const auto u2 = testing::random_control(p, 16, rng);
    Control mix = u1;
    for (int k = 0; k < 16; ++k) mix.values[k] = 0.3 * u1.values[k] - 0.7 * u2.values[k];
    const auto g1 = terminal_coefficients(basis, u1, shape);
    const auto g2 = terminal_coefficients(basis, u2, shape);
    const auto gm = terminal_coefficients(basis, mix, shape);
    for (int n = 0; n < 64; ++n) CHECK(std::abs(gm[n] - (0.3 * g1[n] - 0.7 * g2[n])) <= 1e-15);
}

TEST_CASE("target coefficients") {
    const auto basis = compute_eigenvalues(1.0, 16);
    for (double w : target_coefficients(basis, Profile::constant(0.0))) CHECK(w == 0.0);

    const auto mode = target_coefficients(basis, Profile::mode(1, 1.0, basis.rhos[0]));
    CHECK(std::abs(mode[0] - basis.normalizers[0]) <= 1e-10);
    for (int n = 1; n < 16; ++n) CHECK(std::abs(mode[n]) <= 1e-10);

    const auto ones = target_coefficients(basis, Profile::constant(1.0));
    CHECK(std::abs(ones[0] - kW1) <= 1e-12);
    for (int n = 0; n < 16; ++n) CHECK(std::abs(ones[n] - std::sin(basis.rhos[n]) / basis.rhos[n]) <= 1e-12);

    // Kinks in a table are split out, so the piecewise-linear hat is integrated exactly.
    const auto hat = Profile::table({0.0, 0.5, 1.0}, {0.0, 1.0, 0.0});
    const auto w = target_coefficients(basis, hat);
    const double r = basis.rhos[2];
    const double exact = 2 * (2 * std::cos(r / 2) - 1 - std::cos(r)) / (r * r);
    CHECK(std::abs(w[2] - exact) <= 1e-12);
}

TEST_CASE("distributed shape needs nonvanishing coefficients") {
    const auto basis = compute_eigenvalues(1.0, 8);
    const auto uniform = distributed_shape(basis, Profile::constant(1.0));
    for (int n = 0; n < 8; ++n) CHECK(std::abs(uniform.factors[n] - std::sin(basis.rhos[n]) / basis.rhos[n]) <= 1e-12);
    // cos(ρ₂x) is orthogonal to the first eigenfunction.
    CHECK_THROWS_AS(distributed_shape(basis, Profile::mode(2, 1.0, basis.rhos[1])), DomainError);
}

TEST_CASE("adjoint trace of simple defects") {
    const auto basis = compute_eigenvalues(1.0, 8);
    const auto shape = boundary_shape(basis);
    const std::vector<double> zeros(8, 0.0);

    const auto flat = adjoint_trace(basis, make_defect(basis, zeros, zeros), shape, 1.0);
    for (double t : {0.0, 0.3, 0.9, 1.0}) CHECK(trace_eval(flat, t) == 0.0);
    CHECK(trace_eval(flat, 0.5, 3) == 0.0);

    std::vector<double> g = zeros;
    g[0] = 1.0;
    const auto single = adjoint_trace(basis, make_defect(basis, g, zeros), shape, 1.0);
    const double rho = basis.rhos[0];
    const double c = std::cos(rho) / basis.normalizers[0];
    double prev = -1e300;
    for (int i = 0; i <= 100; ++i) {
        const double t = i / 100.0;
        const double v = trace_eval(single, t);
        CHECK(v == doctest::Approx(c * std::exp(-rho * rho * (1 - t))).epsilon(1e-14));
        CHECK(v > prev);
        prev = v;
    }
}

TEST_CASE("trace derivatives") {
    const double rho = 0.86033358901937976;
    const auto tr = testing::single_mode_trace(0.7, rho);
    for (double t : {0.0, 0.5, 0.9}) {
        const double v0 = trace_eval(tr, t, 0);
        const double v1 = trace_eval(tr, t, 1);
        CHECK(v1 == doctest::Approx(rho * rho * 0.7 * std::exp(-rho * rho * (1 - t))).epsilon(1e-15));
        CHECK(v1 / v0 == doctest::Approx(rho * rho).epsilon(1e-15));
        CHECK(trace_eval(tr, t, 2) / v1 == doctest::Approx(rho * rho).epsilon(1e-15));
    }

    const auto basis = compute_eigenvalues(1.0, 64);
    std::vector<double> g(64), w(64, 0.0);
    for (int n = 0; n < 64; ++n) g[n] = std::pow(-1.0, n) / (1.0 + n * n);
    const auto trace = adjoint_trace(basis, make_defect(basis, g, w), boundary_shape(basis), 1.0);
    const double t = 0.9, step = 1e-5;
    const double fd = (trace_eval(trace, t + step) - trace_eval(trace, t - step)) / (2 * step);
    CHECK(std::abs(fd - trace_eval(trace, t, 1)) <= 1e-7 * std::abs(trace_eval(trace, t, 1)));

    CHECK_THROWS_AS(trace_eval(trace, 1.0, 1), DomainError);
    CHECK_THROWS_AS(trace_eval(trace, 1.0 - 1e-7, 1), DomainError);
    CHECK_NOTHROW(trace_eval(trace, 1.0 - 1e-6, 1));
    CHECK_THROWS_AS(trace_eval(trace, -0.1), DomainError);
    CHECK_THROWS_AS(trace_eval(trace, 1.1), DomainError);
}

TEST_CASE("cell gradient of trivial traces") {
    const auto basis = compute_eigenvalues(1.0, 8);
    const std::vector<double> zeros(8, 0.0);
    const auto flat = adjoint_trace(basis, make_defect(basis, zeros, zeros), boundary_shape(basis), 1.0);
    for (double v : cell_gradient(basis, Control::constant(1.0, 8, -1, 1, 0.0), flat, 0.0)) CHECK(v == 0.0);
    for (double v : cell_gradient(basis, Control::constant(1.0, 8, -1, 1, 0.0), flat, 0.3)) CHECK(v == 0.0);
    const auto grad = cell_gradient(basis, Control::constant(1.0, 8, -1, 1, 0.5), flat, 0.3);
    for (double v : grad) CHECK(v == doctest::Approx(0.3 * 0.5 / 8).epsilon(1e-15));
}

TEST_CASE("discrete duality between trace integrals and terminal states") {
    std::mt19937_64 rng(5);
    for (int cells : {4, 16, 32}) {
        auto p = testing::generic_problem(cells);
        p.target = Profile::constant(0.0);
        const Discretization disc(p);
        const auto u = testing::random_control(p, cells, rng);
        const auto v = testing::random_control(p, cells, rng);
        const auto w = testing::random_control(p, cells, rng);
        const auto gu = disc.state(u.values), gv = disc.state(v.values), gw = disc.state(w.values);
        std::vector<double> diff(gu.size());
        for (std::size_t n = 0; n < gu.size(); ++n) diff[n] = gu[n] - gv[n];
        const auto trace = disc.trace(make_defect(disc.basis(), diff, std::vector<double>(gu.size(), 0.0)));
        const auto integrals = disc.cell_integrals(trace);
        double lhs = 0.0, rhs = 0.0;
        for (int k = 0; k < cells; ++k) lhs += integrals[k] * w.values[k];
        for (std::size_t n = 0; n < gu.size(); ++n) rhs += diff[n] * gw[n] / disc.basis().normalizers[n];
        CHECK(std::abs(lhs - rhs) <= 1e-8);
    }
}

TEST_CASE("forward map is bounded by the operator norm") {
    std::mt19937_64 rng(9);
    const auto p = testing::generic_problem(16);
    const Discretization disc(p);
    const double c = std::sqrt(operator_norm_sq(disc));
    for (int trial = 0; trial < 20; ++trial) {
        const auto u = testing::random_control(p, 16, rng);
        std::vector<double> g(disc.basis().rhos.size());
        kernels::apply(disc.forward(), u.values, g);
        double usq = 0.0;
        for (double v : u.values) usq += v * v * disc.cell_width();
        CHECK(std::sqrt(norm_sq(disc.basis(), g)) <= (c + 1e-8) * std::sqrt(usq));
    }
}

TEST_CASE("nonnegative controls give nonnegative terminal states") {
    std::mt19937_64 rng(13);
    auto p = testing::generic_problem(32);
    p.lower = -1.0;
    const Discretization disc(p);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    oracle::FDGrid grid{129, 512};
    for (int trial = 0; trial < 5; ++trial) {
        Control u = Control::constant(1.0, 32, p.lower, p.upper);
        for (double& v : u.values) v = unit(rng);
        const auto g = disc.state(u.values);
        const auto y = oracle::cn_forward(p, u, grid);
        const auto x = oracle::space_nodes(grid);
        for (std::size_t j = 0; j < x.size(); ++j) {
            // 64-mode truncation error is below 5e−3 for |u| ≤ 1.
            CHECK(reconstruct(disc.basis(), g, x[j]) >= -5e-3);
            CHECK(y[j] >= -1e-12);
        }
    }
}

TEST_CASE("pointwise terminal trace value") {
    auto p = testing::generic_problem(32);
    p.target = Profile::constant(0.0);
    const Discretization disc(p);
    const std::vector<double> ones(32, 1.0);
    const auto tv = disc.terminal_trace_value(ones);
    CHECK(std::abs(tv.value - kY1) <= 1e-12);

    p.target = Profile::constant(0.25);
    const Discretization shifted(p);
    CHECK(std::abs(shifted.terminal_trace_value(ones).value - (kY1 - 0.25)) <= 1e-12);

    // α = 0 uses the 1/3 stationary sum and the linear growth of the constant mode.
    auto q = p;
    q.alpha = 0.0;
    q.target = Profile::constant(0.0);
    const Discretization neumann(q);
    const auto ext = compute_eigenvalues(0.0, 200);
    double series = 1.0;  // constant mode: ∫₀¹ 1 ds
    for (int n = 1; n < ext.count(); ++n) {
        const double r2 = ext.rhos[n] * ext.rhos[n];
        series += std::cos(ext.rhos[n]) * -std::expm1(-r2) / (r2 * ext.normalizers[n]) * std::cos(ext.rhos[n]);
    }
    // The series converges like 1/N; 200 modes leave about 1e−3.
    CHECK(std::abs(neumann.terminal_trace_value(ones).value - series) <= 2e-3);

    // Distributed control: Σ g_n e_n / N_n − ∫ y_Ω e, checked with a finer basis.
    auto d = testing::generic_problem(8);
    d.shape = ShapeKind::distributed;
    d.shape_profile = Profile::polynomial({1.0, 0.5});
    const Discretization dist(d);
    std::mt19937_64 rng(21);
    const auto u = testing::random_control(d, 8, rng);
    auto fine_spec = d;
    fine_spec.modes = 256;
    const Discretization fine(fine_spec);
    const auto g = fine.state(u.values);
    const auto e = quadrature::integrate_unit(
        [&](double x) { return (reconstruct(fine.basis(), g, x) - 0.5) * (1.0 + 0.5 * x); }, {}, 1e-13);
    CHECK(std::abs(dist.terminal_trace_value(u.values).value - e.value) <= 1e-7);
}

TEST_CASE("initial state enters through the free response") {
    auto p = testing::generic_problem(8);
    const auto basis = compute_eigenvalues(p.alpha, p.modes);
    p.initial = Profile::mode(1, 1.0, basis.rhos[0]);
    const Discretization disc(p);
    const auto g = disc.state(std::vector<double>(8, 0.0));
    const double rho = basis.rhos[0];
    CHECK(std::abs(g[0] - basis.normalizers[0] * std::exp(-rho * rho)) <= 1e-12);
    for (int n = 1; n < basis.count(); ++n) CHECK(std::abs(g[n]) <= 1e-12);
}
