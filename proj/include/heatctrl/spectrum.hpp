#pragma once

#include <vector>

namespace heatctrl {

/// Truncated eigen-system of ∂²/∂x² on (0,1) with y'(0) = 0 and y'(1) + α y(1) = 0.
///
/// Eigenfunctions are cos(ρ_n x), n = 1..N, with ρ tan ρ = α and
/// N_n = ∫₀¹ cos²(ρ_n x) dx. For α = 0 the roots are (n−1)π, including the
/// constant mode ρ₁ = 0 with N₁ = 1.
///
/// Roots are found in extended precision; `rhos_ext` keeps them, `rhos` holds
/// the rounded values used by the double-precision kernels.
struct EigenBasis {
    double alpha = 0.0;
    std::vector<double> rhos;
    std::vector<long double> rhos_ext;
    std::vector<double> normalizers;
    double residual_tol = 0.0;

    int count() const noexcept { return static_cast<int>(rhos.size()); }
    std::vector<double> rho_squared() const;
};

/// Smallest tolerance reliably reachable for `count` roots in 80-bit arithmetic.
double recommended_tolerance(int count);

/// Solves ρ tan ρ = α on each branch ((n−1)π, (n−1)π + π/2): bisection from the
/// branch midpoint, then safeguarded Newton until |ρ tan ρ − α| ≤ tol.
///
/// Throws DomainError for alpha < 0, count < 1 or tol ≤ 0, and
/// ConvergenceError (index = branch, 1-based) if a branch fails to converge.
EigenBasis compute_eigenvalues(double alpha, int count, double tol);
inline EigenBasis compute_eigenvalues(double alpha, int count) {
    return compute_eigenvalues(alpha, count, recommended_tolerance(count));
}

/// |ρ_n tan ρ_n − α| evaluated on the extended-precision root (0-based n).
long double root_residual(const EigenBasis& basis, int n);

/// The two closed forms of N_n: 1/2 + sin(2ρ)/(4ρ) and 1/2 + sin²ρ/(2α) (α > 0).
long double normalizer_from_double_angle(long double rho);
long double normalizer_from_alpha(long double rho, double alpha);

/// Majorant of |Σ_{n>N} e^{−ρ_n² gap} / N_n| using ρ_n ≥ (n−1)π and N_n > 1/2.
/// Throws DomainError for time_gap ≤ 0.
double tail_bound(const EigenBasis& basis, double time_gap);

}  // namespace heatctrl
