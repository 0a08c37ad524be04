#include <cmath>
#include <cstdint>

#include "heatctrl/kernels.hpp"
#include "kernel_detail.hpp"

// Without OpenMP the pragmas are ignored and these reduce to the serial loops.

namespace heatctrl::kernels::omp {

namespace {
// Below this many multiply-adds the fork/join overhead dominates.
constexpr long kParallelWork = 1L << 15;
}  // namespace

ModeCellMatrix cell_exponentials(std::span<const double> rho_sq, double horizon, int cells) {
    ModeCellMatrix m{static_cast<int>(rho_sq.size()), cells, {}};
    m.data.resize(rho_sq.size() * static_cast<std::size_t>(cells));
    const long work = static_cast<long>(m.modes) * cells;
#pragma omp parallel for if (work > kParallelWork) schedule(static)
    for (int n = 0; n < m.modes; ++n) {
        for (int k = 0; k < cells; ++k) m(n, k) = detail::cell_exponential(rho_sq[n], horizon, cells, k);
    }
    return m;
}

void apply(const ModeCellMatrix& m, std::span<const double> u, std::span<double> out) {
    const long work = static_cast<long>(m.modes) * m.cells;
#pragma omp parallel for if (work > kParallelWork) schedule(static)
    for (int n = 0; n < m.modes; ++n) {
        double acc = 0.0;
#pragma omp simd reduction(+ : acc)
        for (int k = 0; k < m.cells; ++k) acc += m(n, k) * u[k];
        out[n] = acc;
    }
}

void apply_transpose(const ModeCellMatrix& m, std::span<const double> c, std::span<double> out) {
    const long work = static_cast<long>(m.modes) * m.cells;
#pragma omp parallel for if (work > kParallelWork) schedule(static)
    for (int k = 0; k < m.cells; ++k) {
        double acc = 0.0;
        for (int n = 0; n < m.modes; ++n) acc += m(n, k) * c[n];
        out[k] = acc;
    }
}

void sample_series(std::span<const double> coeffs, std::span<const double> rho_sq, double horizon,
                   std::span<const double> times, int order, std::span<double> out) {
    const long count = static_cast<long>(times.size());
    const long work = count * static_cast<long>(coeffs.size());
#pragma omp parallel for if (work > kParallelWork) schedule(static)
    for (long i = 0; i < count; ++i) {
        const double lag = horizon - times[i];
        double acc = 0.0;
        for (std::size_t n = 0; n < coeffs.size(); ++n) {
            double term = coeffs[n] * std::exp(-rho_sq[n] * lag);
            for (int p = 0; p < order; ++p) term *= rho_sq[n];
            acc += term;
        }
        out[i] = acc;
    }
}

ThreeLevelBest three_level_search(const ThreeLevelProblem& problem) {
    const std::uint64_t total = detail::three_level_count(problem.forward->cells);
    std::vector<double> first(problem.forward->modes);
    ThreeLevelBest best{0, detail::three_level_objective(problem, 0, first)};
#pragma omp parallel
    {
        std::vector<double> state(problem.forward->modes);
        ThreeLevelBest local = best;
#pragma omp for schedule(static) nowait
        for (std::uint64_t idx = 1; idx < total; ++idx) {
            const double obj = detail::three_level_objective(problem, idx, state);
            if (obj < local.objective) local = {idx, obj};
        }
#pragma omp critical(heatctrl_three_level)
        {
            if (local.objective < best.objective || (local.objective == best.objective && local.index < best.index)) {
                best = local;
            }
        }
    }
    return best;
}

}  // namespace heatctrl::kernels::omp
