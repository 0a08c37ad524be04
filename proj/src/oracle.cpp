#include "heatctrl/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "heatctrl/error.hpp"
#include "heatctrl/kernels.hpp"
#include "heatctrl/solver.hpp"

namespace heatctrl::oracle {

void FDGrid::validate() const {
    if (space_points < 3) throw DomainError("FDGrid: space_points must be >= 3");
    if (time_steps < 2) throw DomainError("FDGrid: time_steps must be >= 2");
    if (smoothing_steps < 0) throw DomainError("FDGrid: smoothing_steps must be >= 0");
    if (substeps < 1) throw DomainError("FDGrid: substeps must be >= 1");
}

std::vector<double> space_nodes(const FDGrid& grid) {
    std::vector<double> x(static_cast<std::size_t>(grid.space_points));
    const double dx = grid.dx();
    for (std::size_t j = 0; j < x.size(); ++j) x[j] = static_cast<double>(j) * dx;
    x.back() = 1.0;
    return x;
}

std::vector<double> trapezoid_weights(const FDGrid& grid) {
    std::vector<double> w(static_cast<std::size_t>(grid.space_points), grid.dx());
    w.front() *= 0.5;
    w.back() *= 0.5;
    return w;
}

double weighted_dot(const FDGrid& grid, std::span<const double> x, std::span<const double> y) {
    const auto w = trapezoid_weights(grid);
    double acc = 0.0;
    for (std::size_t j = 0; j < w.size(); ++j) acc += w[j] * x[j] * y[j];
    return acc;
}

double l2_norm(const FDGrid& grid, std::span<const double> x) { return std::sqrt(weighted_dot(grid, x, x)); }

namespace {

// y' = A y + B ū on the node values, with
//   A = D2 with ghost rows 2(y₁ − y₀)/dx² and 2(y_{J−1} − (1 + α dx) y_J)/dx²,
//   B = (2/dx) e_J for boundary control, e(x_j) for a distributed source.
// With trapezoid weights W the matrix W A is symmetric, so L = I − (dt/2) A
// and R = I + (dt/2) A are self-adjoint in ⟨·,·⟩_W.
class Scheme {
public:
    Scheme(const ProblemSpec& problem, const FDGrid& grid, const FDOptions& options)
        : grid_(grid), weights_(trapezoid_weights(grid)), boundary_(problem.shape == ShapeKind::boundary) {
        grid.validate();
        const int mx = grid.space_points;
        const double dx = grid.dx();
        dt_ = problem.horizon / grid.time_steps;
        const double inv = 1.0 / (dx * dx);
        const double alpha = options.flip_robin_sign ? -problem.alpha : problem.alpha;
        lower_.assign(mx, inv);
        diag_.assign(mx, -2.0 * inv);
        upper_.assign(mx, inv);
        lower_[0] = 0.0;
        upper_[0] = 2.0 * inv;
        lower_[mx - 1] = 2.0 * inv;
        upper_[mx - 1] = 0.0;
        diag_[mx - 1] = -2.0 * (1.0 + alpha * dx) * inv;

        source_.assign(mx, 0.0);
        if (boundary_) {
            source_[mx - 1] = 2.0 / dx;
        } else {
            const auto x = space_nodes(grid);
            for (int j = 0; j < mx; ++j) source_[j] = problem.shape_profile(x[j]);
        }
        main_ = factorize(0.5 * dt_);
        fine_ = factorize(0.5 * dt_ / grid.substeps);
    }

    double dt() const noexcept { return dt_; }
    int size() const noexcept { return grid_.space_points; }
    const std::vector<double>& source() const noexcept { return source_; }

    // x ← L⁻¹ x, or (I − (dt/2K) A)⁻¹ x for the K-fold substeps
    void solve(std::vector<double>& x, bool fine = false) const {
        const Factors& f = fine ? fine_ : main_;
        const int n = size();
        for (int j = 1; j < n; ++j) x[j] -= f.sub[j] * x[j - 1];
        x[n - 1] /= f.pivot[n - 1];
        for (int j = n - 2; j >= 0; --j) x[j] = (x[j] - f.sup[j] * x[j + 1]) / f.pivot[j];
    }

    // R x
    std::vector<double> explicit_half(const std::vector<double>& x) const {
        const int n = size();
        const double c = 0.5 * dt_;
        std::vector<double> out(x.size());
        for (int j = 0; j < n; ++j) {
            double ax = diag_[j] * x[j];
            if (j > 0) ax += lower_[j] * x[j - 1];
            if (j + 1 < n) ax += upper_[j] * x[j + 1];
            out[j] = x[j] + c * ax;
        }
        return out;
    }

    // ⟨B, z⟩_W
    double source_dot(const std::vector<double>& z) const {
        if (boundary_) return z.back();
        double acc = 0.0;
        for (std::size_t j = 0; j < z.size(); ++j) acc += weights_[j] * source_[j] * z[j];
        return acc;
    }

private:
    struct Factors {
        std::vector<double> pivot, sub, sup;
    };

    // Thomas factorization of I − c A.
    Factors factorize(double c) const {
        const int n = size();
        Factors f{std::vector<double>(n), std::vector<double>(n, 0.0), std::vector<double>(n)};
        f.pivot[0] = 1.0 - c * diag_[0];
        for (int j = 0; j < n; ++j) f.sup[j] = -c * upper_[j];
        for (int j = 1; j < n; ++j) {
            f.sub[j] = -c * lower_[j] / f.pivot[j - 1];
            f.pivot[j] = 1.0 - c * diag_[j] - f.sub[j] * f.sup[j - 1];
        }
        return f;
    }

    FDGrid grid_;
    std::vector<double> weights_;
    bool boundary_;
    double dt_ = 0.0;
    std::vector<double> lower_, diag_, upper_, source_;
    Factors main_, fine_;
};

std::vector<double> step_averages(const Control& control, const FDGrid& grid, double horizon) {
    const int mt = grid.time_steps;
    const int m = control.cells();
    std::vector<double> avg(static_cast<std::size_t>(mt), 0.0);
    if (m == 0) return avg;
    if (mt % m == 0) {
        const int per = mt / m;
        for (int n = 0; n < mt; ++n) avg[n] = control.values[n / per];
        return avg;
    }
    const double dt = horizon / mt;
    const double h = horizon / m;
    for (int n = 0; n < mt; ++n) {
        const double lo = n * dt, hi = (n + 1) * dt;
        int k = std::clamp(static_cast<int>(lo / h), 0, m - 1);
        double acc = 0.0;
        for (; k < m && k * h < hi; ++k) {
            const double overlap = std::min(hi, (k + 1) * h) - std::max(lo, k * h);
            if (overlap > 0.0) acc += overlap * control.values[k];
        }
        avg[n] = acc / dt;
    }
    return avg;
}

// Steps that use two implicit Euler half steps instead of Crank–Nicolson.
std::vector<char> smoothing_schedule(std::span<const double> ubar, const FDGrid& grid) {
    const int mt = grid.time_steps;
    const int s = grid.smoothing_steps;
    std::vector<char> be(static_cast<std::size_t>(mt), 0);
    if (s == 0) return be;
    auto mark = [&](int from) {
        for (int n = from; n < std::min(mt, from + s); ++n) be[n] = 1;
    };
    mark(0);
    mark(std::max(0, mt - s));
    for (int n = 1; n < static_cast<int>(ubar.size()); ++n) {
        if (std::abs(ubar[n] - ubar[n - 1]) > 1e-12 * (1.0 + std::abs(ubar[n]))) mark(n);
    }
    return be;
}

template <class Observer>
std::vector<double> march_forward(const ProblemSpec& problem, const Control& control, const FDGrid& grid,
                                  const FDOptions& options, Observer&& observe) {
    problem.validate();
    const Scheme scheme(problem, grid, options);
    if (std::abs(control.horizon - problem.horizon) > 1e-14 * problem.horizon) {
        throw DomainError("cn_forward: control horizon differs from T");
    }
    const auto ubar = step_averages(control, grid, problem.horizon);
    const auto be = smoothing_schedule(ubar, grid);
    const auto& b = scheme.source();
    const double dt = scheme.dt();

    std::vector<double> y(static_cast<std::size_t>(scheme.size()), 0.0);
    if (problem.initial) {
        const auto x = space_nodes(grid);
        for (std::size_t j = 0; j < y.size(); ++j) y[j] = (*problem.initial)(x[j]);
    }
    observe(0, y);
    for (int n = 0; n < grid.time_steps; ++n) {
        if (be[n]) {
            const double c = 0.5 * dt / grid.substeps;
            for (int half = 0; half < 2 * grid.substeps; ++half) {
                for (std::size_t j = 0; j < y.size(); ++j) y[j] += c * ubar[n] * b[j];
                scheme.solve(y, true);
            }
        } else {
            y = scheme.explicit_half(y);
            for (std::size_t j = 0; j < y.size(); ++j) y[j] += dt * ubar[n] * b[j];
            scheme.solve(y);
        }
        observe(n + 1, y);
    }
    return y;
}

AdjointSamples march_backward(const ProblemSpec& problem, std::span<const double> ubar,
                              std::span<const double> terminal_profile, const FDGrid& grid,
                              const FDOptions& options) {
    problem.validate();
    const Scheme scheme(problem, grid, options);
    if (static_cast<int>(terminal_profile.size()) != grid.space_points) {
        throw DomainError("cn_adjoint: terminal profile does not match the space grid");
    }
    const auto be = smoothing_schedule(ubar, grid);
    const int mt = grid.time_steps;
    const double dt = scheme.dt();
    const auto weights = trapezoid_weights(grid);
    const bool boundary = problem.shape == ShapeKind::boundary;
    auto trace_of = [&](const std::vector<double>& q) {
        if (boundary) return q.back();
        double acc = 0.0;
        for (std::size_t j = 0; j < q.size(); ++j) acc += weights[j] * scheme.source()[j] * q[j];
        return acc;
    };

    AdjointSamples out;
    out.times.resize(static_cast<std::size_t>(mt) + 1);
    out.trace.resize(static_cast<std::size_t>(mt) + 1);
    out.step_trace.resize(static_cast<std::size_t>(mt));
    for (int n = 0; n <= mt; ++n) out.times[n] = n * dt;
    out.times.back() = problem.horizon;

    std::vector<double> q(terminal_profile.begin(), terminal_profile.end());
    out.trace[mt] = trace_of(q);
    for (int n = mt - 1; n >= 0; --n) {
        if (be[n]) {
            double acc = 0.0;
            for (int half = 0; half < 2 * grid.substeps; ++half) {
                scheme.solve(q, true);
                acc += scheme.source_dot(q);
            }
            out.step_trace[n] = acc / (2 * grid.substeps);
        } else {
            scheme.solve(q);
            out.step_trace[n] = scheme.source_dot(q);
            q = scheme.explicit_half(q);
        }
        out.trace[n] = trace_of(q);
    }
    return out;
}

}  // namespace

std::vector<double> cn_forward(const ProblemSpec& problem, const Control& control, const FDGrid& grid,
                               const FDOptions& options) {
    return march_forward(problem, control, grid, options, [](int, const std::vector<double>&) {});
}

std::vector<double> cn_forward_trace(const ProblemSpec& problem, const Control& control, const FDGrid& grid,
                                     const FDOptions& options) {
    std::vector<double> trace(static_cast<std::size_t>(grid.time_steps) + 1);
    march_forward(problem, control, grid, options,
                  [&](int n, const std::vector<double>& y) { trace[n] = y.back(); });
    return trace;
}

AdjointSamples cn_adjoint(const ProblemSpec& problem, std::span<const double> terminal_profile, const FDGrid& grid,
                          const FDOptions& options) {
    return march_backward(problem, {}, terminal_profile, grid, options);
}

AdjointSamples cn_adjoint(const ProblemSpec& problem, const Control& control, std::span<const double> terminal_profile,
                          const FDGrid& grid, const FDOptions& options) {
    grid.validate();
    const auto ubar = step_averages(control, grid, problem.horizon);
    return march_backward(problem, ubar, terminal_profile, grid, options);
}

double duality_defect(const ProblemSpec& problem, const Control& control, std::span<const double> p,
                      const FDGrid& grid) {
    ProblemSpec homogeneous = problem;
    homogeneous.initial.reset();
    const auto y = cn_forward(homogeneous, control, grid);
    const double lhs = weighted_dot(grid, y, p);
    const auto adj = cn_adjoint(homogeneous, control, p, grid);
    const auto ubar = step_averages(control, grid, problem.horizon);
    const double dt = problem.horizon / grid.time_steps;
    double rhs = 0.0;
    for (std::size_t n = 0; n < ubar.size(); ++n) rhs += dt * ubar[n] * adj.step_trace[n];
    return std::abs(lhs - rhs) / std::max(std::abs(lhs), std::numeric_limits<double>::min());
}

GradientCheck fd_gradient_check(const ProblemSpec& problem, const Control& control, double step) {
    if (!(step > 0.0)) throw DomainError("fd_gradient_check: step must be > 0");
    if (control.cells() > 16) throw DomainError("fd_gradient_check: at most 16 cells");
    ProblemSpec p = problem;
    p.cells = control.cells();
    const Discretization disc(p);
    const double h = disc.cell_width();
    auto smooth = [&](std::span<const double> u) {
        double sq = 0.0;
        for (double v : u) sq += v * v;
        return 0.5 * disc.defect(u).defect_norm_sq + 0.5 * p.nu * h * sq;
    };

    GradientCheck out;
    out.analytic = cell_gradient(disc.basis(), control, disc.trace(control.values), p.nu);
    out.finite_difference.resize(out.analytic.size());
    std::vector<double> u = control.values;
    for (std::size_t k = 0; k < u.size(); ++k) {
        const double base = u[k];
        u[k] = base + step;
        const double fp = smooth(u);
        u[k] = base - step;
        const double fm = smooth(u);
        u[k] = base;
        out.finite_difference[k] = (fp - fm) / (2.0 * step);
    }
    double diff = 0.0, scale = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) {
        diff = std::max(diff, std::abs(out.finite_difference[k] - out.analytic[k]));
        scale = std::max(scale, std::abs(out.analytic[k]));
    }
    out.max_relative_error = scale > 0.0 ? diff / scale : diff;
    return out;
}

BruteForceResult brute_force_best(const ProblemSpec& problem) {
    if (problem.cells > 8) throw DomainError("brute_force_best: at most 8 cells (3^8 candidates)");
    const Discretization disc(problem);
    kernels::ThreeLevelProblem tl;
    tl.forward = &disc.forward();
    tl.offset = disc.free_response();
    tl.target = disc.target();
    tl.normalizers = disc.basis().normalizers;
    tl.lower = problem.lower;
    tl.upper = problem.upper;
    tl.cell_width = disc.cell_width();
    tl.nu = problem.nu;
    tl.mu = problem.mu;
    const auto best = kernels::three_level_search(tl);

    BruteForceResult out;
    out.control = Control{problem.horizon, problem.lower, problem.upper,
                          kernels::decode_three_level(best.index, problem.cells, problem.lower, problem.upper)};
    out.objective = objective(disc, out.control.values).total();
    out.candidates = 1;
    for (int k = 0; k < problem.cells; ++k) out.candidates *= 3;
    return out;
}

}  // namespace heatctrl::oracle
