#include <doctest.h>

#include <cmath>

#include "heatctrl/error.hpp"
#include "heatctrl/sweep.hpp"
#include "support.hpp"

using namespace heatctrl;

TEST_CASE("nu list validation") {
    CHECK_NOTHROW(validate_nu_list({1e-2, 1e-3, 1e-4}));
    CHECK_NOTHROW(validate_nu_list({1e-2, 1e-3, 0.0}));
    CHECK_THROWS_AS(validate_nu_list({}), DomainError);
    CHECK_THROWS_AS(validate_nu_list({1e-3, 1e-2}), DomainError);
    CHECK_THROWS_AS(validate_nu_list({1e-3, 1e-3}), DomainError);
    CHECK_THROWS_AS(validate_nu_list({1e-3, -1e-4}), DomainError);
    CHECK_THROWS_AS(validate_nu_list({0.0, 1e-3}), DomainError);
}

TEST_CASE("slope fitting") {
    const std::vector<double> nus{1e-2, 3e-3, 1e-3, 3e-4, 1e-4, 3e-5, 1e-5};
    std::vector<double> half(nus.size()), mixed(nus.size());
    for (std::size_t i = 0; i < nus.size(); ++i) {
        half[i] = 2.5 * std::sqrt(nus[i]);
        mixed[i] = i < 3 ? 1.0 : 7.0 * nus[i];  // power law only on the small end
    }
    const auto f = fit_slope("half", nus, half);
    CHECK(f.valid);
    CHECK(f.slope == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(f.nus.size() == 4);  // the decade 1e−5..1e−4 has 3 points, widened to 4
    CHECK(fit_slope("mixed", nus, mixed).slope == doctest::Approx(1.0).epsilon(1e-12));

    std::vector<double> zeros(nus.size(), 0.0);
    CHECK_FALSE(fit_slope("zero", nus, zeros).valid);
    CHECK_FALSE(fit_slope("one", {1e-3}, {2.0}).valid);
}

TEST_CASE("interior zero optimum is stable in nu") {
    auto p = testing::generic_problem(16);
    p.target = Profile::constant(0.01);
    const Discretization probe(p);
    double sup = 0.0;
    for (double v : probe.cell_averages(probe.trace(std::vector<double>(16, 0.0)))) sup = std::max(sup, std::abs(v));
    p.mu = 2 * sup;
    SweepOptions o;
    o.solve.tol = 1e-10;
    const auto r = run_sweep(p, {1e-2, 1e-3, 1e-4}, o);
    for (double v : r.reference.control.values) CHECK(v == 0.0);
    CHECK(r.reference_report.points.empty());
    REQUIRE(r.records.size() == 3);
    for (const auto& rec : r.records) {
        CHECK(rec.ok);
        CHECK(rec.l1_control_error == 0.0);
        CHECK(rec.l2_control_error == 0.0);
        CHECK(rec.terminal_error == 0.0);
        CHECK(rec.trace_sup_difference == 0.0);
        CHECK(rec.switching_distance == 0.0);
    }
}

TEST_CASE("sweep errors shrink with nu and do not depend on the worker count") {
    const auto p = testing::generic_problem(32);
    SweepOptions o;
    o.solve.tol = 1e-10;
    o.solve.max_iters = 200000;
    // Large ν moves roots out of the pairing window, so the list starts at 3e−4.
    const std::vector<double> nus{3e-4, 1e-4, 3e-5};
    const auto one = run_sweep(p, nus, o);
    o.workers = 3;
    const auto three = run_sweep(p, nus, o);
    REQUIRE(one.records.size() == 3);
    CHECK(one.max_multiplicity == 1);
    CHECK(one.reference_terminal_margin > 1e-3);
    for (std::size_t i = 0; i < 3; ++i) {
        const auto& a = one.records[i];
        const auto& b = three.records[i];
        CHECK(a.ok);
        CHECK(a.all_matched);
        CHECK(a.control == b.control);
        CHECK(a.l1_control_error == b.l1_control_error);
        CHECK(a.switching_distance == b.switching_distance);
        CHECK(a.l1_control_error >= 0.0);
        CHECK(a.terminal_error >= 0.0);
        if (i > 0) {
            CHECK(a.l1_control_error < one.records[i - 1].l1_control_error);
            CHECK(a.trace_sup_difference < one.records[i - 1].trace_sup_difference);
        }
    }
    CHECK_THROWS_AS(run_sweep(p, {1e-3, 1e-2}, o), DomainError);
}
