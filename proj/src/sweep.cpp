#include "heatctrl/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "heatctrl/error.hpp"

namespace heatctrl {

void validate_nu_list(const std::vector<double>& nus) {
    if (nus.empty()) throw DomainError("nu list is empty");
    for (std::size_t i = 0; i < nus.size(); ++i) {
        const bool last = i + 1 == nus.size();
        if (!(nus[i] > 0.0) && !(last && nus[i] == 0.0)) {
            throw DomainError("nu list entries must be > 0 (only the last may be 0)");
        }
        if (i > 0 && !(nus[i] < nus[i - 1])) throw DomainError("nu list must be strictly decreasing");
    }
}

SlopeFit fit_slope(const std::string& series, const std::vector<double>& nus, const std::vector<double>& values,
                   int min_points) {
    SlopeFit fit{series, {}, std::numeric_limits<double>::quiet_NaN(), false};
    std::vector<std::size_t> order;
    for (std::size_t i = 0; i < nus.size(); ++i) {
        if (nus[i] > 0.0 && std::isfinite(values[i])) order.push_back(i);
    }
    std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return nus[x] < nus[y]; });
    if (order.empty()) return fit;
    const double top = 10.0 * nus[order.front()] * (1.0 + 1e-12);
    std::size_t count = 0;
    while (count < order.size() && nus[order[count]] <= top) ++count;
    count = std::min(order.size(), std::max<std::size_t>(count, static_cast<std::size_t>(min_points)));
    order.resize(count);

    std::vector<double> lx, ly;
    for (std::size_t i : order) {
        fit.nus.push_back(nus[i]);
        if (!(values[i] > 0.0)) return fit;
        lx.push_back(std::log(nus[i]));
        ly.push_back(std::log(values[i]));
    }
    if (lx.size() < 2) return fit;
    const double n = static_cast<double>(lx.size());
    const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / n;
    const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sxy += (lx[i] - mx) * (ly[i] - my);
        sxx += (lx[i] - mx) * (lx[i] - mx);
    }
    if (sxx == 0.0) return fit;
    fit.slope = sxy / sxx;
    fit.valid = true;
    return fit;
}

namespace {

SweepRecord run_member(const ProblemSpec& base, double nu, const SweepResult& ref, const Discretization& ref_disc,
                       const SweepOptions& options) {
    SweepRecord rec;
    rec.nu = nu;
    ProblemSpec p = base;
    p.nu = nu;
    const Discretization disc(p);
    SolveOptions so = options.solve;
    so.warm_start = ref.reference.control.values;
    so.record_history = false;
    so.on_iteration = nullptr;
    const SolveResult res = solve(disc, so);
    rec.converged = res.converged;
    rec.iterations = res.iterations;
    rec.control = res.control.values;
    if (!res.converged) {
        rec.failure = "solver did not converge (residual " + std::to_string(res.residual) + ")";
        return rec;
    }

    const double h = disc.cell_width();
    const auto& u0 = ref.reference.control.values;
    double l1 = 0.0, l2 = 0.0;
    for (std::size_t k = 0; k < u0.size(); ++k) {
        const double d = res.control.values[k] - u0[k];
        l1 += h * std::abs(d);
        l2 += h * d * d;
    }
    rec.l1_control_error = l1;
    rec.l2_control_error = std::sqrt(l2);

    const auto g = disc.state(res.control.values);
    const auto g0 = ref_disc.state(u0);
    double term = 0.0;
    for (std::size_t n = 0; n < g.size(); ++n) term += (g[n] - g0[n]) * (g[n] - g0[n]) / disc.basis().normalizers[n];
    rec.terminal_error = std::sqrt(term);

    const auto trace = disc.trace(res.control.values);
    const auto trace0 = ref_disc.trace(u0);
    const double end = p.horizon * (1.0 - options.eps_fraction);
    std::vector<double> times(static_cast<std::size_t>(options.trace_samples) + 1);
    for (std::size_t i = 0; i < times.size(); ++i) times[i] = end * static_cast<double>(i) / options.trace_samples;
    std::vector<double> a(times.size()), b(times.size());
    trace_sample(trace, times, 0, a);
    trace_sample(trace0, times, 0, b);
    for (std::size_t i = 0; i < times.size(); ++i) {
        rec.trace_sup_difference = std::max(rec.trace_sup_difference, std::abs(a[i] - b[i]));
    }

    const auto report = find_switching_points(trace, p, options.eps_fraction * p.horizon);
    const auto pairing = pair_switching_points(report, ref.reference_report, ref.tau);
    for (const auto& pair : pairing.pairs) {
        rec.switching_distances.push_back(pair.matches.empty() ? std::numeric_limits<double>::quiet_NaN()
                                                               : pair.max_distance);
    }
    rec.all_matched = pairing.all_matched();
    rec.unmatched = static_cast<int>(pairing.unmatched.size());
    rec.switching_distance = rec.all_matched ? pairing.max_distance() : std::numeric_limits<double>::quiet_NaN();
    rec.ok = true;
    return rec;
}

}  // namespace

SweepResult run_sweep(const ProblemSpec& problem, const std::vector<double>& nus, const SweepOptions& options) {
    validate_nu_list(nus);
    if (options.workers < 1) throw DomainError("workers must be >= 1");
    if (!(options.eps_fraction > 0.0 && options.eps_fraction < 1.0)) throw DomainError("eps must lie in (0, 1)");

    SweepResult out;
    ProblemSpec ref_problem = problem;
    ref_problem.nu = 0.0;
    const Discretization ref_disc(ref_problem);
    out.reference = solve(ref_disc, options.solve);
    if (!out.reference.converged) {
        throw ConvergenceError("reference solve at nu = 0 did not converge (residual " +
                               std::to_string(out.reference.residual) + ")");
    }
    out.reference_terminal_trace = ref_disc.terminal_trace_value(out.reference.control.values).value;
    out.reference_terminal_margin = std::abs(std::abs(out.reference_terminal_trace) - problem.mu);
    ScanOptions scan;
    scan.terminal_value = out.reference_terminal_trace;
    out.reference_report = find_switching_points(ref_disc.trace(out.reference.control.values), ref_problem,
                                                 options.eps_fraction * problem.horizon, scan);
    for (const auto& pt : out.reference_report.points) {
        out.multiplicities.push_back(pt.multiplicity);
        out.max_multiplicity = std::max(out.max_multiplicity, pt.multiplicity);
    }

    double tau = 0.1 * problem.horizon;
    const auto& pts = out.reference_report.points;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) tau = std::min(tau, 0.45 * (pts[i + 1].t - pts[i].t));
    out.tau = options.tau.value_or(tau);

    std::vector<double> members;
    for (double nu : nus) {
        if (nu > 0.0) members.push_back(nu);
    }
    out.records.resize(members.size());
    const int count = static_cast<int>(members.size());
#pragma omp parallel for schedule(dynamic) num_threads(options.workers)
    for (int i = 0; i < count; ++i) {
        try {
            out.records[i] = run_member(problem, members[i], out, ref_disc, options);
        } catch (const std::exception& e) {
            out.records[i].nu = members[i];
            out.records[i].ok = false;
            out.records[i].failure = e.what();
        }
    }

    std::vector<double> fit_nus, l1, l2, terminal, trace, dist;
    for (const auto& r : out.records) {
        const double nan = std::numeric_limits<double>::quiet_NaN();
        fit_nus.push_back(r.nu);
        l1.push_back(r.ok ? r.l1_control_error : nan);
        l2.push_back(r.ok ? r.l2_control_error : nan);
        terminal.push_back(r.ok ? r.terminal_error : nan);
        trace.push_back(r.ok ? r.trace_sup_difference : nan);
        dist.push_back(r.ok ? r.switching_distance : nan);
    }
    out.slopes.push_back(fit_slope("switching_distance", fit_nus, dist));
    out.slopes.push_back(fit_slope("l1_control_error", fit_nus, l1));
    out.slopes.push_back(fit_slope("l2_control_error", fit_nus, l2));
    out.slopes.push_back(fit_slope("terminal_error", fit_nus, terminal));
    out.slopes.push_back(fit_slope("trace_sup_difference", fit_nus, trace));
    return out;
}

}  // namespace heatctrl
