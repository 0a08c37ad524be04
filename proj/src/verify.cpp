#include "heatctrl/verify.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "heatctrl/switching.hpp"

namespace heatctrl {

bool VerifyReport::passed() const noexcept {
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.skipped || c.passed; });
}

double terminal_profile_difference(const ProblemSpec& problem, const Control& control, int modes,
                                   const oracle::FDGrid& grid, const oracle::FDOptions& fd) {
    ProblemSpec p = problem;
    p.modes = modes;
    p.cells = control.cells();
    const Discretization disc(p);
    const auto g = disc.state(control.values);
    const auto y = oracle::cn_forward(problem, control, grid, fd);
    const auto x = oracle::space_nodes(grid);
    std::vector<double> diff(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) diff[j] = y[j] - reconstruct(disc.basis(), g, x[j]);
    return oracle::l2_norm(grid, diff);
}

double adjoint_trace_difference(const ProblemSpec& problem, const Control& control, const oracle::FDGrid& grid,
                                double eps_fraction, const oracle::FDOptions& fd) {
    ProblemSpec p = problem;
    p.cells = control.cells();
    const Discretization disc(p);
    const auto trace = disc.trace(control.values);

    const auto y = oracle::cn_forward(problem, control, grid, fd);
    const auto x = oracle::space_nodes(grid);
    std::vector<double> defect(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) defect[j] = y[j] - problem.target(x[j]);
    const auto adj = oracle::cn_adjoint(problem, defect, grid, fd);

    const double end = problem.horizon * (1.0 - eps_fraction);
    double worst = 0.0;
    for (std::size_t n = 0; n < adj.times.size() && adj.times[n] <= end; ++n) {
        worst = std::max(worst, std::abs(adj.trace[n] - trace_eval(trace, adj.times[n])));
    }
    return worst;
}

namespace {

CheckResult bounded(std::string name, double measured, double tolerance, std::string detail = {}) {
    return {std::move(name), measured <= tolerance, false, measured, tolerance, std::move(detail)};
}

CheckResult skipped(std::string name, std::string why) { return {std::move(name), false, true, 0.0, 0.0, std::move(why)}; }

}  // namespace

VerifyReport run_verify(const ProblemSpec& problem, const VerifyOptions& options) {
    VerifyReport report;
    const Discretization disc(problem);
    report.solution = solve(disc, options.solve);
    const Control& u = report.solution.control;
    report.checks.push_back(bounded("solver_stationarity", report.solution.residual, options.solve.tol,
                                    report.solution.converged ? "converged" : "not converged"));

    report.checks.push_back(bounded(
        "terminal_profile_vs_cn",
        terminal_profile_difference(problem, u, std::max(problem.modes, options.spectral_modes), options.grid,
                                    options.fd),
        options.profile_tol));
    report.checks.push_back(bounded("adjoint_trace_vs_cn",
                                    adjoint_trace_difference(problem, u, options.grid, options.eps_fraction, options.fd),
                                    options.trace_tol));

    {
        std::mt19937_64 rng(static_cast<std::uint64_t>(options.duality_seed));
        std::uniform_real_distribution<double> unit(-1.0, 1.0);
        Control c = Control::constant(problem.horizon, options.gradient_cells, problem.lower, problem.upper);
        for (double& v : c.values) v = std::clamp(unit(rng), problem.lower, problem.upper);
        const auto check = oracle::fd_gradient_check(problem, c, options.gradient_step);
        report.checks.push_back(bounded("fd_gradient", check.max_relative_error, options.gradient_tol));

        std::vector<double> p(static_cast<std::size_t>(options.grid.space_points));
        for (double& v : p) v = unit(rng);
        ProblemSpec plain = problem;
        plain.initial.reset();
        report.checks.push_back(bounded("fd_duality", oracle::duality_defect(plain, u, p, options.grid),
                                        options.duality_tol));
    }

    if (!options.brute_force) {
        report.checks.push_back(skipped("brute_force", "skipped: not requested"));
    } else if (problem.cells > 8) {
        report.checks.push_back(skipped("brute_force", "skipped: M too large"));
    } else if (problem.nu != 0.0) {
        report.checks.push_back(skipped("brute_force", "skipped: requires nu = 0"));
    } else {
        const auto best = oracle::brute_force_best(problem);
        const double excess = report.solution.objective.total() - best.objective;
        report.checks.push_back(bounded("brute_force", excess, options.brute_force_slack,
                                        "solver objective minus best of " + std::to_string(best.candidates) +
                                            " three-level controls"));
    }

    if (problem.nu != 0.0) {
        report.checks.push_back(skipped("switching_structure", "skipped: requires nu = 0"));
    } else {
        ScanOptions scan;
        scan.terminal_value = disc.terminal_trace_value(u.values).value;
        const auto sw = find_switching_points(disc.trace(u.values), problem, options.eps_fraction * problem.horizon,
                                              scan);
        const auto v = validate_structure(u, sw, problem, options.structure_delta);
        std::string detail = std::to_string(sw.points.size()) + " switching points";
        for (const auto& f : v.findings) detail += "; " + f;
        CheckResult c{"switching_structure", v.passed(), false, v.fraction_near_levels, v.fraction_bound, detail};
        report.checks.push_back(c);
    }
    return report;
}

}  // namespace heatctrl
