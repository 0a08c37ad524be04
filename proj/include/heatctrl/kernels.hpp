#pragma once

#include <cstdint>
#include <span>
#include <vector>

// Data-parallel inner loops of the solver. Every kernel exists twice: a plain
// serial reference (namespace `serial`) and an OpenMP version (namespace `omp`)
// that must agree with it to roundoff. Library code calls the unqualified
// names, which resolve to the OpenMP kernels when built with OpenMP.

namespace heatctrl::kernels {

/// Dense modes × cells matrix, row-major.
struct ModeCellMatrix {
    int modes = 0;
    int cells = 0;
    std::vector<double> data;

    double operator()(int n, int k) const { return data[static_cast<std::size_t>(n) * cells + k]; }
    double& operator()(int n, int k) { return data[static_cast<std::size_t>(n) * cells + k]; }
};

struct ThreeLevelBest {
    std::uint64_t index = 0;  // base-3 digits, least significant = cell 0; digit 0→a, 1→0, 2→b
    double objective = 0.0;
};

/// Inputs of the exhaustive three-level search. The state coefficient of mode n
/// for control u is Σ_k forward(n,k) u_k + offset[n]; the tracking term is
/// ½ Σ_n (state_n − target[n])² / normalizers[n].
struct ThreeLevelProblem {
    const ModeCellMatrix* forward = nullptr;
    std::span<const double> offset;
    std::span<const double> target;
    std::span<const double> normalizers;
    double lower = -1.0;
    double upper = 1.0;
    double cell_width = 1.0;
    double nu = 0.0;
    double mu = 0.0;
};

namespace serial {

/// K(n,k) = ∫_{t_k}^{t_{k+1}} exp(−ρ_n²(T−s)) ds on a uniform grid of `cells` cells.
ModeCellMatrix cell_exponentials(std::span<const double> rho_sq, double horizon, int cells);
/// out_n = Σ_k m(n,k) u_k
void apply(const ModeCellMatrix& m, std::span<const double> u, std::span<double> out);
/// out_k = Σ_n m(n,k) c_n
void apply_transpose(const ModeCellMatrix& m, std::span<const double> c, std::span<double> out);
/// out_i = Σ_n c_n ρ_n^{2·order} exp(−ρ_n²(T − t_i))
void sample_series(std::span<const double> coeffs, std::span<const double> rho_sq, double horizon,
                   std::span<const double> times, int order, std::span<double> out);
/// Minimum over all 3^cells controls with values in {a, 0, b}; ties resolve to the lowest index.
ThreeLevelBest three_level_search(const ThreeLevelProblem& problem);

}  // namespace serial

namespace omp {

ModeCellMatrix cell_exponentials(std::span<const double> rho_sq, double horizon, int cells);
void apply(const ModeCellMatrix& m, std::span<const double> u, std::span<double> out);
void apply_transpose(const ModeCellMatrix& m, std::span<const double> c, std::span<double> out);
void sample_series(std::span<const double> coeffs, std::span<const double> rho_sq, double horizon,
                   std::span<const double> times, int order, std::span<double> out);
ThreeLevelBest three_level_search(const ThreeLevelProblem& problem);

}  // namespace omp

#ifdef HEATCTRL_HAS_OPENMP
using omp::apply;
using omp::apply_transpose;
using omp::cell_exponentials;
using omp::sample_series;
using omp::three_level_search;
#else
using serial::apply;
using serial::apply_transpose;
using serial::cell_exponentials;
using serial::sample_series;
using serial::three_level_search;
#endif

/// Decodes a three-level index into cell values.
std::vector<double> decode_three_level(std::uint64_t index, int cells, double lower, double upper);

}  // namespace heatctrl::kernels
