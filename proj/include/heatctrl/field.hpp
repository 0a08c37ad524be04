#pragma once

#include <span>
#include <vector>

#include "heatctrl/kernels.hpp"
#include "heatctrl/problem.hpp"
#include "heatctrl/profile.hpp"
#include "heatctrl/spectrum.hpp"

namespace heatctrl {

/// Piecewise-constant control on a uniform grid of [0, T] with box bounds.
struct Control {
    double horizon = 1.0;
    double lower = -1.0;
    double upper = 1.0;
    std::vector<double> values;

    static Control constant(double horizon, int cells, double lower, double upper, double value = 0.0);

    int cells() const noexcept { return static_cast<int>(values.size()); }
    double cell_width() const noexcept { return horizon / static_cast<double>(values.size()); }
    double cell_start(int k) const noexcept { return k * cell_width(); }
    double cell_mid(int k) const noexcept { return (k + 0.5) * cell_width(); }
    bool admissible() const noexcept;
};

/// How the control enters the state equation: per-mode factor cos(ρ_n) for
/// boundary control, e_n = ∫₀¹ cos(ρ_n ξ) e(ξ) dξ for a distributed source e(x)u(t).
struct ControlShape {
    ShapeKind kind = ShapeKind::boundary;
    std::vector<double> factors;
};

ControlShape boundary_shape(const EigenBasis& basis);
/// Throws DomainError if some |e_n| < 1e-14 (switching analysis needs e_n ≠ 0).
ControlShape distributed_shape(const EigenBasis& basis, const Profile& shape_profile);

struct TerminalDefect {
    std::vector<double> g;  // ∫ y(ξ,T) cos(ρ_n ξ) dξ
    std::vector<double> w;  // ∫ y_Ω(ξ) cos(ρ_n ξ) dξ
    std::vector<double> d;  // g − w
    double defect_norm_sq = 0.0;  // Σ d_n² / N_n
};

TerminalDefect make_defect(const EigenBasis& basis, std::vector<double> g, std::vector<double> w);

/// t ↦ φ(1,t) = Σ c_n exp(−ρ_n²(T−t)), c_n = factor_n d_n / N_n. For distributed
/// control this is t ↦ ∫ φ(x,t) e(x) dx, the quantity the optimality system uses.
struct AdjointTrace {
    std::vector<double> coeffs;
    std::vector<double> rho_sq;
    double horizon = 1.0;

    /// Derivatives are only evaluated on [0, T − eps_guard].
    double eps_guard() const noexcept { return 1e-6 * horizon; }
};

/// g_n = factor_n ∫₀ᵀ exp(−ρ_n²(T−s)) u(s) ds, integrated exactly per cell.
std::vector<double> terminal_coefficients(const EigenBasis& basis, const Control& control, const ControlShape& shape);

/// w_n = ∫₀¹ y_Ω(ξ) cos(ρ_n ξ) dξ by adaptive composite Gauss–Legendre.
/// Throws ConvergenceError (index = mode) if panel doubling stalls at the cap.
std::vector<double> target_coefficients(const EigenBasis& basis, const Profile& target);

/// Coefficients of the homogeneous solution started from y₀: e^{−ρ_n² T} ∫ y₀ cos(ρ_n ξ) dξ.
std::vector<double> free_response_coefficients(const EigenBasis& basis, const Profile& initial, double horizon);

AdjointTrace adjoint_trace(const EigenBasis& basis, const TerminalDefect& defect, const ControlShape& shape,
                           double horizon);

/// k-th time derivative Σ c_n ρ_n^{2k} exp(−ρ_n²(T−t)). For k ≥ 1 requires
/// t ≤ T − eps_guard; at t = T and k = 0 returns the conditionally convergent Σ c_n.
double trace_eval(const AdjointTrace& trace, double t, int order = 0);
void trace_sample(const AdjointTrace& trace, std::span<const double> times, int order, std::span<double> out);

/// Exact ∫ over each cell of t ↦ φ(1,t).
std::vector<double> trace_cell_integrals(const AdjointTrace& trace, int cells);

/// ∂/∂u_k of ½‖y(T) − y_Ω‖² + (ν/2)‖u‖²: ∫_cell φ(1,t) dt + ν u_k h.
std::vector<double> cell_gradient(const EigenBasis& basis, const Control& control, const AdjointTrace& trace,
                                  double nu);

/// Σ coeffs_n cos(ρ_n x) / N_n.
double reconstruct(const EigenBasis& basis, std::span<const double> coeffs, double x);

/// Everything that depends only on the problem and the grid, built once per solve.
class Discretization {
public:
    explicit Discretization(ProblemSpec problem);

    const ProblemSpec& problem() const noexcept { return problem_; }
    const EigenBasis& basis() const noexcept { return basis_; }
    const ControlShape& shape() const noexcept { return shape_; }
    const std::vector<double>& target() const noexcept { return target_; }
    const std::vector<double>& free_response() const noexcept { return free_; }
    /// forward(n,k) = factor_n ∫_{cell k} exp(−ρ_n²(T−s)) ds
    const kernels::ModeCellMatrix& forward() const noexcept { return forward_; }
    const kernels::ModeCellMatrix& cell_exponentials() const noexcept { return exponentials_; }

    int cells() const noexcept { return problem_.cells; }
    double cell_width() const noexcept { return problem_.horizon / problem_.cells; }
    Control zero_control() const;

    /// Terminal-state coefficients, including the free response of y₀.
    std::vector<double> state(std::span<const double> u) const;
    TerminalDefect defect(std::span<const double> u) const;
    AdjointTrace trace(const TerminalDefect& defect) const;
    AdjointTrace trace(std::span<const double> u) const { return trace(defect(u)); }
    std::vector<double> cell_integrals(const AdjointTrace& trace) const;
    /// Cell averages of the trace: (1/h) ∫_cell φ(1,t) dt.
    std::vector<double> cell_averages(const AdjointTrace& trace) const;

    struct TerminalValue {
        double value = 0.0;
        double tail_estimate = 0.0;
    };
    /// φ(1,T) = y(1,T) − y_Ω(1) (boundary control) evaluated pointwise, without
    /// the trace series. For distributed control it is ∫ (y(x,T) − y_Ω(x)) e(x) dx.
    TerminalValue terminal_trace_value(std::span<const double> u) const;

private:
    ProblemSpec problem_;
    EigenBasis basis_;
    ControlShape shape_;
    std::vector<double> target_;
    std::vector<double> free_;
    kernels::ModeCellMatrix exponentials_;
    kernels::ModeCellMatrix forward_;
};

}  // namespace heatctrl
