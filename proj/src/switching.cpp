#include "heatctrl/switching.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "heatctrl/error.hpp"
#include "heatctrl/optimality.hpp"

namespace heatctrl {

const char* to_string(SwitchEquation eq) {
    switch (eq) {
        case SwitchEquation::minus_mu_minus_nu_b: return "phi=-mu-nu*b";
        case SwitchEquation::minus_mu: return "phi=-mu";
        case SwitchEquation::plus_mu: return "phi=+mu";
        case SwitchEquation::plus_mu_minus_nu_a: return "phi=mu-nu*a";
    }
    return "unknown";
}

const char* to_string(SegmentLevel level) {
    switch (level) {
        case SegmentLevel::lower: return "a";
        case SegmentLevel::zero: return "0";
        case SegmentLevel::upper: return "b";
        case SegmentLevel::ramp: return "ramp";
    }
    return "unknown";
}

double level_value(SwitchEquation eq, const ProblemSpec& problem) {
    switch (eq) {
        case SwitchEquation::minus_mu_minus_nu_b: return -problem.mu - problem.nu * problem.upper;
        case SwitchEquation::minus_mu: return -problem.mu;
        case SwitchEquation::plus_mu: return problem.mu;
        case SwitchEquation::plus_mu_minus_nu_a: return problem.mu - problem.nu * problem.lower;
    }
    return 0.0;
}

std::vector<SwitchEquation> relevant_equations(double nu) {
    if (nu > 0.0) {
        return {SwitchEquation::minus_mu_minus_nu_b, SwitchEquation::minus_mu, SwitchEquation::plus_mu,
                SwitchEquation::plus_mu_minus_nu_a};
    }
    return {SwitchEquation::minus_mu, SwitchEquation::plus_mu};
}

int multiplicity(const AdjointTrace& trace, double t_root, int max_order, double threshold) {
    if (max_order < 1 || max_order > 6) throw DomainError("multiplicity: max_order must lie in [1, 6]");
    if (t_root < 0.0 || t_root > trace.horizon - trace.eps_guard()) {
        throw DomainError("multiplicity: root too close to T for derivatives");
    }
    for (int n = 1; n <= max_order; ++n) {
        double scale = 0.0;
        for (std::size_t k = 0; k < trace.coeffs.size(); ++k) {
            scale += std::abs(trace.coeffs[k]) * std::pow(trace.rho_sq[k], n) *
                     std::exp(-trace.rho_sq[k] * (trace.horizon - t_root));
        }
        const double value = trace_eval(trace, t_root, n);
        if (scale > 0.0 && std::abs(value) > threshold * scale) return n;
    }
    throw ConvergenceError("degenerate root beyond max_order");
}

namespace {

int sign_of(double v) { return (v > 0.0) - (v < 0.0); }

std::vector<double> scan_grid(double horizon, double eps, const ScanOptions& options) {
    const double end = horizon - eps;
    std::vector<double> times;
    times.reserve(static_cast<std::size_t>(options.samples) * 2 + 2);
    for (int i = 0; i <= options.samples; ++i) times.push_back(end * i / options.samples);
    const double refine_start = std::max(0.0, horizon - 10.0 * eps);
    const int fine = options.samples * options.refine_factor;
    const double fine_step = end / fine;
    for (double t = refine_start; t < end; t += fine_step) times.push_back(t);
    std::sort(times.begin(), times.end());
    times.erase(std::unique(times.begin(), times.end(),
                            [&](double x, double y) { return std::abs(x - y) <= 1e-14 * horizon; }),
                times.end());
    times.back() = end;
    return times;
}

struct RootFinder {
    const AdjointTrace& trace;
    double level;
    double derivative_limit;  // derivatives are only evaluated up to here

    double f(double t) const { return trace_eval(trace, t, 0) - level; }
    double df(double t) const { return trace_eval(trace, t, 1); }

    // f(lo) and f(hi) have opposite signs (or one is zero).
    double bisect(double lo, double hi, double width) const {
        double flo = f(lo);
        if (flo == 0.0) return lo;
        if (f(hi) == 0.0) return hi;
        for (int i = 0; i < 200 && hi - lo > width; ++i) {
            const double mid = 0.5 * (lo + hi);
            const double fm = f(mid);
            if (fm == 0.0) return mid;
            if (sign_of(fm) == sign_of(flo)) {
                lo = mid;
                flo = fm;
            } else {
                hi = mid;
            }
        }
        double t = 0.5 * (lo + hi);
        if (t > derivative_limit) return t;
        // Newton polish, kept only while it stays in the bracket and improves.
        double ft = f(t);
        for (int i = 0; i < 3 && ft != 0.0; ++i) {
            const double d = df(t);
            if (d == 0.0) break;
            const double next = t - ft / d;
            if (next < lo || next > hi) break;
            const double fn = f(next);
            if (std::abs(fn) >= std::abs(ft)) break;
            t = next;
            ft = fn;
        }
        return t;
    }

    // Extremum of f on [lo, hi] from a sign change of f'; nullopt if none.
    std::optional<double> extremum(double lo, double hi) const {
        if (hi > derivative_limit) return std::nullopt;
        double dlo = df(lo);
        const double dhi = df(hi);
        if (sign_of(dlo) * sign_of(dhi) >= 0) return std::nullopt;
        for (int i = 0; i < 200 && hi - lo > 1e-14 * trace.horizon; ++i) {
            const double mid = 0.5 * (lo + hi);
            const double dm = df(mid);
            if (sign_of(dm) == sign_of(dlo)) {
                lo = mid;
                dlo = dm;
            } else {
                hi = mid;
            }
        }
        return 0.5 * (lo + hi);
    }
};

SegmentLevel segment_level(double phi, const ProblemSpec& p) {
    switch (classify(phi, p.nu, p.mu, p.lower, p.upper)) {
        case RegionLabel::Plus: return SegmentLevel::lower;
        case RegionLabel::Minus: return SegmentLevel::upper;
        case RegionLabel::Zero: return SegmentLevel::zero;
        default: return SegmentLevel::ramp;
    }
}

}  // namespace

SwitchingReport find_switching_points(const AdjointTrace& trace, const ProblemSpec& problem, double eps,
                                      const ScanOptions& options) {
    const double horizon = trace.horizon;
    if (!(eps > 0.0 && eps < horizon)) throw DomainError("find_switching_points: eps must lie in (0, T)");
    if (options.samples < 2 || options.refine_factor < 1) throw DomainError("find_switching_points: bad scan options");

    SwitchingReport report;
    report.nu = problem.nu;
    report.eps = eps;
    report.scan_end = horizon - eps;
    report.terminal_value = options.terminal_value;

    const auto times = scan_grid(horizon, eps, options);
    std::vector<double> phi(times.size());
    trace_sample(trace, times, 0, phi);
    const double width = 1e-12 * horizon;
    const double derivative_limit = horizon - trace.eps_guard();

    auto add_point = [&](double t, SwitchEquation eq, const RootFinder& rf) {
        // Direction from the level function just outside the refined root.
        const double step = std::max(10.0 * width, 1e-9 * horizon);
        const double before = rf.f(std::max(0.0, t - step));
        const double after = rf.f(std::min(report.scan_end, t + step));
        SwitchingPoint pt{t, eq, sign_of(after - before), 0};
        if (t <= derivative_limit) {
            try {
                pt.multiplicity = multiplicity(trace, t, options.max_order, options.deriv_threshold);
            } catch (const ConvergenceError&) {
                report.anomalies.push_back({"degenerate_root", t, to_string(eq)});
            }
        }
        report.points.push_back(pt);
    };

    for (SwitchEquation eq : relevant_equations(problem.nu)) {
        const double level = level_value(eq, problem);
        const RootFinder rf{trace, level, derivative_limit};
        const double tol_touch = 1e-9 * (std::abs(level) + 1.0);
        std::vector<double> f(phi.size());
        for (std::size_t i = 0; i < phi.size(); ++i) f[i] = phi[i] - level;

        std::size_t last = f.size();  // index of the last nonzero sample
        for (std::size_t i = 0; i < f.size(); ++i) {
            if (f[i] == 0.0) continue;
            if (last < f.size() && sign_of(f[i]) != sign_of(f[last])) {
                add_point(rf.bisect(times[last], times[i], width), eq, rf);
            }
            last = i;
        }

        // Local approaches of |f| towards zero without a sign change at the samples:
        // either a double crossing between samples or a tangential touch.
        for (std::size_t i = 1; i + 1 < f.size(); ++i) {
            const int s = sign_of(f[i]);
            if (s == 0 || sign_of(f[i - 1]) != s || sign_of(f[i + 1]) != s) continue;
            if (!(std::abs(f[i]) <= std::abs(f[i - 1]) && std::abs(f[i]) < std::abs(f[i + 1]))) continue;
            const auto te = rf.extremum(times[i - 1], times[i + 1]);
            if (!te) continue;
            const double fe = rf.f(*te);
            if (sign_of(fe) == -s) {
                add_point(rf.bisect(times[i - 1], *te, width), eq, rf);
                add_point(rf.bisect(*te, times[i + 1], width), eq, rf);
            } else if (std::abs(fe) <= tol_touch) {
                report.anomalies.push_back({"tangential_touch", *te, to_string(eq)});
            }
        }
    }

    std::sort(report.points.begin(), report.points.end(),
              [](const SwitchingPoint& x, const SwitchingPoint& y) { return x.t < y.t; });

    std::vector<double> bounds{0.0};
    for (const auto& pt : report.points) bounds.push_back(pt.t);
    bounds.push_back(report.scan_end);
    for (std::size_t i = 0; i + 1 < bounds.size(); ++i) {
        if (bounds[i + 1] <= bounds[i]) continue;
        const double mid = 0.5 * (bounds[i] + bounds[i + 1]);
        const SegmentLevel level = segment_level(trace_eval(trace, mid, 0), problem);
        if (!report.structure.empty() && report.structure.back().level == level) {
            report.structure.back().end = bounds[i + 1];
        } else {
            report.structure.push_back({bounds[i], bounds[i + 1], level});
        }
    }

    const double refine_start = std::max(0.0, horizon - 10.0 * eps);
    const auto near_end = std::count_if(report.points.begin(), report.points.end(),
                                        [&](const SwitchingPoint& pt) { return pt.t >= refine_start; });
    if (near_end >= 3) {
        report.anomalies.push_back({"accumulation_suspected", refine_start,
                                    std::to_string(near_end) + " switching points in [T-10eps, T-eps]"});
    }
    if (options.terminal_value) {
        const double margin = std::abs(std::abs(*options.terminal_value) - problem.mu);
        if (margin <= 1e-3) {
            report.anomalies.push_back({"terminal_ambiguous", horizon, "|phi(1,T)| is within 1e-3 of mu"});
        }
    }
    std::sort(report.anomalies.begin(), report.anomalies.end(),
              [](const Anomaly& x, const Anomaly& y) { return x.t < y.t; });
    return report;
}

StructureValidation validate_structure(const Control& control, const SwitchingReport& report,
                                       const ProblemSpec& problem, double delta) {
    StructureValidation out;
    const int m = control.cells();
    const double h = control.cell_width();
    const double a = problem.lower, b = problem.upper;

    auto level_number = [&](SegmentLevel level) {
        return level == SegmentLevel::lower ? a : level == SegmentLevel::upper ? b : 0.0;
    };
    auto near = [&](double v, double target) { return std::abs(v - target) <= delta; };
    auto near_any = [&](double v) { return near(v, a) || near(v, 0.0) || near(v, b); };

    int within = 0;
    for (int k = 0; k < m; ++k) {
        const double v = control.values[k];
        if (near_any(v)) ++within;
        const double lo = k * h, hi = (k + 1) * h;
        const bool straddles = std::any_of(report.points.begin(), report.points.end(),
                                           [&](const SwitchingPoint& pt) { return pt.t >= lo && pt.t <= hi; });
        if (straddles) continue;
        bool ok = false;
        if (hi > report.scan_end) {
            ok = near_any(v);  // partly inside the unresolved end interval
        } else {
            const double mid = 0.5 * (lo + hi);
            const auto seg = std::find_if(report.structure.begin(), report.structure.end(),
                                          [&](const Segment& s) { return mid >= s.start && mid <= s.end; });
            ok = seg != report.structure.end() && seg->level != SegmentLevel::ramp && near(v, level_number(seg->level));
        }
        if (!ok) out.off_level_cells.push_back(k);
    }
    out.levels_ok = out.off_level_cells.empty();
    if (!out.levels_ok) {
        out.findings.push_back("cell " + std::to_string(out.off_level_cells.front()) +
                               " is not at the level of its segment");
    }

    for (int k = 0; k + 1 < m; ++k) {
        const double x = control.values[k], y = control.values[k + 1];
        if ((near(x, a) && near(y, b)) || (near(x, b) && near(y, a))) out.adjacency_cells.push_back(k);
    }
    for (std::size_t i = 0; i + 1 < report.structure.size(); ++i) {
        const auto p = report.structure[i].level, q = report.structure[i + 1].level;
        if ((p == SegmentLevel::lower && q == SegmentLevel::upper) ||
            (p == SegmentLevel::upper && q == SegmentLevel::lower)) {
            out.findings.push_back("segments jump between a and b at t=" + std::to_string(report.structure[i].end));
            out.adjacency_ok = false;
        }
    }
    if (!out.adjacency_cells.empty()) {
        out.adjacency_ok = false;
        out.findings.push_back("cells " + std::to_string(out.adjacency_cells.front()) + " and " +
                               std::to_string(out.adjacency_cells.front() + 1) + " jump between a and b");
    }

    if (report.terminal_value && !report.structure.empty()) {
        const double phi_t = *report.terminal_value;
        if (std::abs(phi_t - problem.mu) > delta && std::abs(phi_t + problem.mu) > delta) {
            out.terminal_checked = true;
            const SegmentLevel expected = phi_t > problem.mu    ? SegmentLevel::lower
                                          : phi_t < -problem.mu ? SegmentLevel::upper
                                                                : SegmentLevel::zero;
            out.terminal_ok = report.structure.back().level == expected;
            if (!out.terminal_ok) {
                out.findings.push_back(std::string("final segment is at ") + to_string(report.structure.back().level) +
                                       " but phi(1,T) implies " + to_string(expected));
            }
        }
    }

    out.accumulation_flagged = std::any_of(report.anomalies.begin(), report.anomalies.end(),
                                           [](const Anomaly& an) { return an.kind == "accumulation_suspected"; });
    out.fraction_near_levels = m > 0 ? static_cast<double>(within) / m : 1.0;
    out.fraction_bound = 1.0 - 2.0 * static_cast<double>(report.points.size()) / std::max(m, 1);
    if (out.fraction_near_levels < out.fraction_bound) {
        out.findings.push_back("too many intermediate cells");
    }
    return out;
}

bool Pairing::all_matched() const noexcept {
    return std::all_of(pairs.begin(), pairs.end(), [](const SwitchingPair& p) { return !p.matches.empty(); });
}

double Pairing::max_distance() const noexcept {
    double d = 0.0;
    for (const auto& p : pairs) d = std::max(d, p.max_distance);
    return d;
}

Pairing pair_switching_points(const SwitchingReport& report_nu, const SwitchingReport& report_zero, double tau) {
    if (!(tau > 0.0)) throw DomainError("pair_switching_points: tau must be > 0");
    const auto& refs = report_zero.points;
    for (std::size_t i = 0; i + 1 < refs.size(); ++i) {
        if (refs[i + 1].t - refs[i].t < 2.0 * tau) throw DomainError("tau too large for point separation");
    }
    auto compatible = [](SwitchEquation ref, SwitchEquation eq) {
        if (ref == SwitchEquation::plus_mu) {
            return eq == SwitchEquation::plus_mu || eq == SwitchEquation::plus_mu_minus_nu_a;
        }
        return eq == SwitchEquation::minus_mu || eq == SwitchEquation::minus_mu_minus_nu_b;
    };

    Pairing out;
    std::vector<bool> used(report_nu.points.size(), false);
    for (const auto& ref : refs) {
        SwitchingPair pair{ref, {}, 0.0};
        for (std::size_t i = 0; i < report_nu.points.size(); ++i) {
            const auto& pt = report_nu.points[i];
            if (std::abs(pt.t - ref.t) < tau && compatible(ref.equation, pt.equation)) {
                pair.matches.push_back(pt);
                pair.max_distance = std::max(pair.max_distance, std::abs(pt.t - ref.t));
                used[i] = true;
            }
        }
        out.pairs.push_back(std::move(pair));
    }
    for (std::size_t i = 0; i < used.size(); ++i) {
        if (!used[i]) out.unmatched.push_back(report_nu.points[i]);
    }
    return out;
}

}  // namespace heatctrl
