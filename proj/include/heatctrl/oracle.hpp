#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "heatctrl/field.hpp"
#include "heatctrl/problem.hpp"

// Finite-difference reference solutions. Nothing here uses the eigen-expansion:
// the Crank–Nicolson solver works on a uniform space grid with ghost points for
// the Neumann condition at x = 0 and the Robin condition at x = 1.

namespace heatctrl::oracle {

struct FDGrid {
    int space_points = 513;  // Mx, dx = 1/(Mx − 1)
    int time_steps = 2048;   // Mt, dt = T/Mt
    /// Steps replaced by two implicit Euler half steps after every data
    /// discontinuity (t = 0, control jumps, and the terminal time for the
    /// adjoint). 0 gives pure Crank–Nicolson.
    int smoothing_steps = 8;
    /// Each smoothing step is taken as 2·substeps implicit Euler steps of dt/(2·substeps).
    int substeps = 64;

    double dx() const noexcept { return 1.0 / (space_points - 1); }
    void validate() const;  // Mx ≥ 3, Mt ≥ 2, smoothing ≥ 0
};

struct FDOptions {
    bool flip_robin_sign = false;  // test hook: solves with y_x − αy = u at x = 1
};

std::vector<double> space_nodes(const FDGrid& grid);
/// Trapezoid weights dx/2, dx, …, dx, dx/2.
std::vector<double> trapezoid_weights(const FDGrid& grid);
double weighted_dot(const FDGrid& grid, std::span<const double> x, std::span<const double> y);
double l2_norm(const FDGrid& grid, std::span<const double> x);

/// Terminal profile y(·,T) on the space grid. The control is averaged over
/// each time step; y₀ and the distributed shape are sampled at the nodes.
std::vector<double> cn_forward(const ProblemSpec& problem, const Control& control, const FDGrid& grid,
                               const FDOptions& options = {});

/// Boundary trace y(1, t_n) at every time node t_n = n·dt, n = 0..Mt.
std::vector<double> cn_forward_trace(const ProblemSpec& problem, const Control& control, const FDGrid& grid,
                                     const FDOptions& options = {});

struct AdjointSamples {
    std::vector<double> times;  // t_n, n = 0..Mt
    /// φ(1, t_n) for boundary control, ∫ φ(x, t_n) e(x) dx for distributed control.
    std::vector<double> trace;
    /// Per-step sensitivities: ∂⟨y(T), p⟩/∂ū_n = dt · step_trace[n].
    std::vector<double> step_trace;
};

/// Backward scheme for φ_t = −φ_xx with the same boundary treatment and
/// φ(·,T) = terminal_profile. It is the exact transpose of cn_forward, so
/// ⟨y(T), p⟩ = Σ_n dt ū_n step_trace[n] to roundoff when y₀ = 0.
AdjointSamples cn_adjoint(const ProblemSpec& problem, std::span<const double> terminal_profile, const FDGrid& grid,
                          const FDOptions& options = {});

/// Same, using the smoothing schedule of a forward solve with `control`.
AdjointSamples cn_adjoint(const ProblemSpec& problem, const Control& control, std::span<const double> terminal_profile,
                          const FDGrid& grid, const FDOptions& options = {});

/// Relative difference |⟨S u, p⟩ − ⟨u, S* p⟩| / max(|⟨S u, p⟩|, tiny) with y₀ ignored.
double duality_defect(const ProblemSpec& problem, const Control& control, std::span<const double> p,
                      const FDGrid& grid);

struct GradientCheck {
    double max_relative_error = 0.0;  // ‖g_fd − g‖_∞ / ‖g‖_∞
    std::vector<double> analytic;
    std::vector<double> finite_difference;
};

/// Central differences of ½‖y(T) − y_Ω‖² + (ν/2)‖u‖² per cell against
/// cell_gradient. Throws DomainError for step ≤ 0 or more than 16 cells.
GradientCheck fd_gradient_check(const ProblemSpec& problem, const Control& control, double step);

struct BruteForceResult {
    Control control;
    double objective = 0.0;
    std::uint64_t candidates = 0;
};

/// Exhaustive minimum over controls with cell values in {a, 0, b}.
/// Throws DomainError for more than 8 cells.
BruteForceResult brute_force_best(const ProblemSpec& problem);

}  // namespace heatctrl::oracle
