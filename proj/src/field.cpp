#include "heatctrl/field.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "heatctrl/error.hpp"
#include "heatctrl/quadrature.hpp"

namespace heatctrl {

namespace {

constexpr double kCoefficientTol = 1e-12;
constexpr double kVanishingFactor = 1e-14;

void require_same_size(std::size_t a, std::size_t b, const char* what) {
    if (a != b) throw DomainError(std::string(what) + ": size mismatch with the eigen-basis");
}

double cosine_moment(const Profile& profile, double rho, int mode) {
    const auto breaks = profile.breakpoints();
    const auto est = quadrature::integrate_unit([&](double x) { return profile(x) * std::cos(rho * x); }, breaks,
                                                kCoefficientTol);
    if (!est.converged) {
        throw ConvergenceError("cosine moment of mode " + std::to_string(mode + 1) +
                                   " did not converge (last change " + std::to_string(est.change) + ")",
                               mode + 1);
    }
    return est.value;
}

}  // namespace

Control Control::constant(double horizon, int cells, double lower, double upper, double value) {
    return Control{horizon, lower, upper, std::vector<double>(static_cast<std::size_t>(cells), value)};
}

bool Control::admissible() const noexcept {
    return std::all_of(values.begin(), values.end(), [this](double v) { return v >= lower && v <= upper; });
}

ControlShape boundary_shape(const EigenBasis& basis) {
    ControlShape shape{ShapeKind::boundary, {}};
    shape.factors.reserve(basis.rhos.size());
    for (double rho : basis.rhos) shape.factors.push_back(std::cos(rho));
    return shape;
}

ControlShape distributed_shape(const EigenBasis& basis, const Profile& shape_profile) {
    ControlShape shape{ShapeKind::distributed, std::vector<double>(basis.rhos.size())};
    for (int n = 0; n < basis.count(); ++n) {
        shape.factors[n] = cosine_moment(shape_profile, basis.rhos[n], n);
        if (std::abs(shape.factors[n]) < kVanishingFactor) {
            throw DomainError("distributed control shape has a vanishing Fourier coefficient e_" + std::to_string(n + 1));
        }
    }
    return shape;
}

TerminalDefect make_defect(const EigenBasis& basis, std::vector<double> g, std::vector<double> w) {
    require_same_size(g.size(), basis.rhos.size(), "make_defect");
    require_same_size(w.size(), basis.rhos.size(), "make_defect");
    TerminalDefect out{std::move(g), std::move(w), {}, 0.0};
    out.d.resize(out.g.size());
    for (std::size_t n = 0; n < out.g.size(); ++n) {
        out.d[n] = out.g[n] - out.w[n];
        out.defect_norm_sq += out.d[n] * out.d[n] / basis.normalizers[n];
    }
    return out;
}

std::vector<double> terminal_coefficients(const EigenBasis& basis, const Control& control, const ControlShape& shape) {
    require_same_size(shape.factors.size(), basis.rhos.size(), "terminal_coefficients");
    const auto exps = kernels::cell_exponentials(basis.rho_squared(), control.horizon, control.cells());
    std::vector<double> g(basis.rhos.size());
    kernels::apply(exps, control.values, g);
    for (std::size_t n = 0; n < g.size(); ++n) g[n] *= shape.factors[n];
    return g;
}

std::vector<double> target_coefficients(const EigenBasis& basis, const Profile& target) {
    std::vector<double> w(basis.rhos.size(), 0.0);
    if (target.is_zero()) return w;
    for (int n = 0; n < basis.count(); ++n) w[n] = cosine_moment(target, basis.rhos[n], n);
    return w;
}

std::vector<double> free_response_coefficients(const EigenBasis& basis, const Profile& initial, double horizon) {
    auto out = target_coefficients(basis, initial);
    for (int n = 0; n < basis.count(); ++n) out[n] *= std::exp(-basis.rhos[n] * basis.rhos[n] * horizon);
    return out;
}

AdjointTrace adjoint_trace(const EigenBasis& basis, const TerminalDefect& defect, const ControlShape& shape,
                           double horizon) {
    require_same_size(defect.d.size(), basis.rhos.size(), "adjoint_trace");
    require_same_size(shape.factors.size(), basis.rhos.size(), "adjoint_trace");
    AdjointTrace trace{{}, basis.rho_squared(), horizon};
    trace.coeffs.resize(defect.d.size());
    for (std::size_t n = 0; n < defect.d.size(); ++n) {
        trace.coeffs[n] = shape.factors[n] * defect.d[n] / basis.normalizers[n];
    }
    return trace;
}

double trace_eval(const AdjointTrace& trace, double t, int order) {
    if (order < 0) throw DomainError("trace_eval: order must be >= 0");
    if (t < 0.0 || t > trace.horizon) throw DomainError("trace_eval: t outside [0, T]");
    if (order >= 1 && t > trace.horizon - trace.eps_guard()) {
        throw DomainError("trace_eval: derivatives need t <= T - eps_guard");
    }
    double out = 0.0;
    kernels::serial::sample_series(trace.coeffs, trace.rho_sq, trace.horizon, std::span<const double>(&t, 1), order,
                                   std::span<double>(&out, 1));
    return out;
}

void trace_sample(const AdjointTrace& trace, std::span<const double> times, int order, std::span<double> out) {
    if (times.size() != out.size()) throw DomainError("trace_sample: output size mismatch");
    for (double t : times) {
        if (t < 0.0 || t > trace.horizon) throw DomainError("trace_sample: t outside [0, T]");
        if (order >= 1 && t > trace.horizon - trace.eps_guard()) {
            throw DomainError("trace_sample: derivatives need t <= T - eps_guard");
        }
    }
    kernels::sample_series(trace.coeffs, trace.rho_sq, trace.horizon, times, order, out);
}

std::vector<double> trace_cell_integrals(const AdjointTrace& trace, int cells) {
    const auto exps = kernels::cell_exponentials(trace.rho_sq, trace.horizon, cells);
    std::vector<double> out(static_cast<std::size_t>(cells));
    kernels::apply_transpose(exps, trace.coeffs, out);
    return out;
}

std::vector<double> cell_gradient(const EigenBasis& basis, const Control& control, const AdjointTrace& trace,
                                  double nu) {
    require_same_size(trace.coeffs.size(), basis.rhos.size(), "cell_gradient");
    auto grad = trace_cell_integrals(trace, control.cells());
    const double h = control.cell_width();
    for (int k = 0; k < control.cells(); ++k) grad[k] += nu * control.values[k] * h;
    return grad;
}

double reconstruct(const EigenBasis& basis, std::span<const double> coeffs, double x) {
    double acc = 0.0;
    for (int n = 0; n < basis.count(); ++n) acc += coeffs[n] * std::cos(basis.rhos[n] * x) / basis.normalizers[n];
    return acc;
}

// --- Discretization ---------------------------------------------------------

Discretization::Discretization(ProblemSpec problem) : problem_(std::move(problem)) {
    problem_.validate();
    basis_ = compute_eigenvalues(problem_.alpha, problem_.modes);
    shape_ = problem_.shape == ShapeKind::boundary ? boundary_shape(basis_)
                                                    : distributed_shape(basis_, problem_.shape_profile);
    target_ = target_coefficients(basis_, problem_.target);
    free_ = problem_.initial ? free_response_coefficients(basis_, *problem_.initial, problem_.horizon)
                             : std::vector<double>(basis_.rhos.size(), 0.0);
    exponentials_ = kernels::cell_exponentials(basis_.rho_squared(), problem_.horizon, problem_.cells);
    forward_ = exponentials_;
    for (int n = 0; n < forward_.modes; ++n) {
        for (int k = 0; k < forward_.cells; ++k) forward_(n, k) *= shape_.factors[n];
    }
}

Control Discretization::zero_control() const {
    return Control::constant(problem_.horizon, problem_.cells, problem_.lower, problem_.upper);
}

std::vector<double> Discretization::state(std::span<const double> u) const {
    if (static_cast<int>(u.size()) != cells()) throw DomainError("state: control has the wrong number of cells");
    std::vector<double> g(basis_.rhos.size());
    kernels::apply(forward_, u, g);
    for (std::size_t n = 0; n < g.size(); ++n) g[n] += free_[n];
    return g;
}

TerminalDefect Discretization::defect(std::span<const double> u) const { return make_defect(basis_, state(u), target_); }

AdjointTrace Discretization::trace(const TerminalDefect& defect) const {
    return adjoint_trace(basis_, defect, shape_, problem_.horizon);
}

std::vector<double> Discretization::cell_integrals(const AdjointTrace& trace) const {
    std::vector<double> out(static_cast<std::size_t>(cells()));
    kernels::apply_transpose(exponentials_, trace.coeffs, out);
    return out;
}

std::vector<double> Discretization::cell_averages(const AdjointTrace& trace) const {
    auto out = cell_integrals(trace);
    const double h = cell_width();
    for (double& v : out) v /= h;
    return out;
}

Discretization::TerminalValue Discretization::terminal_trace_value(std::span<const double> u) const {
    const int m = cells();
    const double h = cell_width();
    TerminalValue out;

    if (problem_.shape == ShapeKind::distributed) {
        // ∫ y(x,T) e(x) dx = Σ g_n e_n / N_n converges like Σ ρ⁻⁴; the target part
        // is integrated directly so it carries no truncation error.
        const auto g = state(u);
        double acc = 0.0;
        double last = 0.0;
        for (int n = 0; n < basis_.count(); ++n) {
            last = g[n] * shape_.factors[n] / basis_.normalizers[n];
            acc += last;
        }
        const auto breaks = problem_.target.breakpoints();
        const auto target_part = quadrature::integrate_unit(
            [&](double x) { return problem_.target(x) * problem_.shape_profile(x); }, breaks, kCoefficientTol);
        out.value = acc - target_part.value;
        out.tail_estimate = std::abs(last) * basis_.count() / 3.0;
        return out;
    }

    // Boundary control: y(1,T) = Σ_k u_k ∫_cell G(1,1,T−s) ds with
    // Q(τ) = ∫₀^τ G(1,1,s) ds = [α=0]·τ + S∞ − Σ_{ρ_n>0} cos²ρ_n/(N_n ρ_n²) e^{−ρ_n² τ},
    // S∞ = Σ_{ρ_n>0} cos²ρ_n/(N_n ρ_n²) = 1/α (α > 0) or 1/3 (α = 0).
    // Enough modes are taken that e^{−ρ² h} has underflowed below roundoff.
    const int needed = static_cast<int>(std::ceil(std::sqrt(40.0 / h) / std::numbers::pi)) + 2;
    const EigenBasis ext = needed > basis_.count() ? compute_eigenvalues(problem_.alpha, needed) : basis_;
    const double s_inf = problem_.alpha > 0.0 ? 1.0 / problem_.alpha : 1.0 / 3.0;
    auto q = [&](double tau) {
        if (tau <= 0.0) return 0.0;
        double acc = problem_.alpha == 0.0 ? tau : 0.0;
        double partial = 0.0;
        for (int n = 0; n < ext.count(); ++n) {
            const double rho = ext.rhos[n];
            if (rho == 0.0) continue;
            const double c = std::cos(rho);
            const double weight = c * c / (ext.normalizers[n] * rho * rho);
            partial += weight;
            acc += weight * -std::expm1(-rho * rho * tau);
        }
        return acc + (s_inf - partial);
    };
    double y1 = 0.0;
    for (int k = 0; k < m; ++k) {
        if (u[k] == 0.0) continue;
        const double tau_lo = (m - 1 - k) * h;
        y1 += u[k] * (q(tau_lo + h) - q(tau_lo));
    }
    for (int n = 0; n < basis_.count(); ++n) y1 += free_[n] * std::cos(basis_.rhos[n]) / basis_.normalizers[n];
    out.value = y1 - problem_.target(1.0);
    const double umax = std::max(std::abs(problem_.lower), std::abs(problem_.upper));
    const double kpi = ext.count() * std::numbers::pi;
    out.tail_estimate = umax * tail_bound(ext, h) / (kpi * kpi);
    return out;
}

}  // namespace heatctrl
