#pragma once

#include <span>
#include <vector>

#include "heatctrl/field.hpp"
#include "heatctrl/problem.hpp"

namespace heatctrl {

/// Pointwise region of the adjoint trace value φ = φ(1,t).
///
/// With ν > 0 the φ-axis splits at −μ−νb < −μ < μ < μ−νa into
///   Minus (u = b) | RampUp (0 < u < b) | Zero | RampDown (a < u < 0) | Plus (u = a).
/// With ν = 0 only Minus (φ < −μ), Zero (|φ| < μ) and Plus (φ > μ) occur.
/// Exact hits of an edge where the control is not determined are BoundaryAmbiguous.
enum class RegionLabel { Plus, Zero, Minus, RampUp, RampDown, BoundaryAmbiguous };

const char* to_string(RegionLabel label);

struct ProxValue {
    double value = 0.0;
    bool ambiguous = false;  // ν = 0 and |φ| = μ: every value between 0 and the bound is optimal
};

/// Minimizer over v ∈ [a, b] of φ v + (ν/2) v² + μ|v|.
///
/// ν > 0: b, −(φ+μ)/ν, 0, −(φ−μ)/ν, a on the five bands (continuous in φ).
/// ν = 0: b if φ < −μ, 0 if |φ| < μ, a if φ > μ; a tie |φ| = μ returns 0 flagged ambiguous.
/// Throws DomainError for μ ≤ 0.
ProxValue prox(double phi, double nu, double mu, double a, double b);
inline double prox_map(double phi, double nu, double mu, double a, double b) { return prox(phi, nu, mu, a, b).value; }

/// Subgradient selector clamp(−φ/μ, −1, 1).
double lambda_of_phi(double phi, double mu);

RegionLabel classify(double phi, double nu, double mu, double a, double b);

/// Labels of φ(1,t) at each sample time.
std::vector<RegionLabel> classify_regions(const AdjointTrace& trace, const ProblemSpec& problem,
                                          std::span<const double> sample_times);

/// Violation of the pointwise optimality system by a cell-wise control, given
/// the cell averages φ̄_k of its own adjoint trace.
///
/// ν > 0: max_k |u_k − prox(φ̄_k)|.
/// ν = 0: max_k gap_k / (b − a), gap_k = max_{v∈[a,b]} [φ̄_k (u_k − v) + μ(|u_k| − |v|)].
/// The prox form is undefined at ties for ν = 0, which a discrete optimum
/// always has in the cells containing switching points; the gap is zero exactly
/// at optimal cells.
double stationarity_residual(std::span<const double> u, std::span<const double> phi_avg, const ProblemSpec& problem);
double stationarity_residual(const Control& control, const AdjointTrace& trace, const ProblemSpec& problem);

/// max_k max_{v∈[a,b]} −[(φ̄_k + ν u_k)(v − u_k) + μ(|v| − |u_k|)]; ≤ 0 means the
/// discrete variational inequality holds.
double variational_gap(std::span<const double> u, std::span<const double> phi_avg, const ProblemSpec& problem);

}  // namespace heatctrl
