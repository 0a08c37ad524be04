#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "heatctrl/field.hpp"
#include "heatctrl/problem.hpp"

namespace heatctrl {

enum class StepRule { fixed, backtracking };

struct SolveOptions {
    int max_iters = 50000;
    double tol = 1e-8;
    bool acceleration = true;  // FISTA with function-value restart
    StepRule step_rule = StepRule::fixed;
    std::optional<std::vector<double>> warm_start;
    double safety = 0.95;  // fixed step is safety / (‖S‖² + ν)
    bool record_history = true;
    /// Called after every iteration with (iteration, objective, residual).
    std::function<void(int, double, double)> on_iteration;

    void validate() const;
};

struct ObjectiveTerms {
    double tracking = 0.0;  // ½‖y(·,T) − y_Ω‖² on the retained modes
    double tikhonov = 0.0;  // (ν/2)‖u‖²
    double sparse = 0.0;    // μ‖u‖₁

    double total() const noexcept { return tracking + tikhonov + sparse; }
};

struct SolveResult {
    Control control;
    ObjectiveTerms objective;
    std::vector<double> residual_history;
    std::vector<double> objective_history;
    int iterations = 0;
    bool converged = false;
    double residual = 0.0;
    double variational_gap = 0.0;
    double step = 0.0;
    double operator_norm_sq = 0.0;
};

/// ‖S‖² for the discrete control-to-terminal-state map S, with L²(0,T) on the
/// control side: λ_max(Fᵀ diag(1/N) F) / h for the mode × cell matrix F.
/// Power iteration to relative tolerance 1e-8; 0 for an empty or zero operator.
/// Throws ConvergenceError if the iteration cap is reached.
double operator_norm_sq(const kernels::ModeCellMatrix& forward, std::span<const double> normalizers, double cell_width);
double operator_norm_sq(const Discretization& disc);

ObjectiveTerms objective(const Discretization& disc, std::span<const double> u);
ObjectiveTerms objective(const ProblemSpec& problem, const Control& control);

/// Proximal gradient on the cell values:
///   u⁺ = clamp(soft(u − s(φ̄ + νu), sμ), a, b),
/// stopping once the stationarity residual is ≤ tol (for ν > 0 the variational
/// gap must also be ≤ tol·(b − a)). Without convergence the iterate with the
/// smallest residual is returned and `converged` is false.
SolveResult solve(const Discretization& disc, const SolveOptions& options = {});
SolveResult solve(const ProblemSpec& problem, const SolveOptions& options = {});

/// clamp(soft(v, threshold), a, b)
double soft_clamp(double v, double threshold, double a, double b);

}  // namespace heatctrl
