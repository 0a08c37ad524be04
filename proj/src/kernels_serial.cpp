#include <cmath>

#include "heatctrl/kernels.hpp"
#include "kernel_detail.hpp"

namespace heatctrl::kernels {

std::vector<double> decode_three_level(std::uint64_t index, int cells, double lower, double upper) {
    std::vector<double> values(cells);
    for (int k = 0; k < cells; ++k) {
        values[k] = detail::level_value(static_cast<int>(index % 3), lower, upper);
        index /= 3;
    }
    return values;
}

namespace serial {

ModeCellMatrix cell_exponentials(std::span<const double> rho_sq, double horizon, int cells) {
    ModeCellMatrix m{static_cast<int>(rho_sq.size()), cells, {}};
    m.data.resize(rho_sq.size() * static_cast<std::size_t>(cells));
    for (int n = 0; n < m.modes; ++n) {
        for (int k = 0; k < cells; ++k) m(n, k) = detail::cell_exponential(rho_sq[n], horizon, cells, k);
    }
    return m;
}

void apply(const ModeCellMatrix& m, std::span<const double> u, std::span<double> out) {
    for (int n = 0; n < m.modes; ++n) {
        double acc = 0.0;
        for (int k = 0; k < m.cells; ++k) acc += m(n, k) * u[k];
        out[n] = acc;
    }
}

void apply_transpose(const ModeCellMatrix& m, std::span<const double> c, std::span<double> out) {
    for (int k = 0; k < m.cells; ++k) {
        double acc = 0.0;
        for (int n = 0; n < m.modes; ++n) acc += m(n, k) * c[n];
        out[k] = acc;
    }
}

void sample_series(std::span<const double> coeffs, std::span<const double> rho_sq, double horizon,
                   std::span<const double> times, int order, std::span<double> out) {
    for (std::size_t i = 0; i < times.size(); ++i) {
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
    std::vector<double> state(problem.forward->modes);
    ThreeLevelBest best{0, detail::three_level_objective(problem, 0, state)};
    for (std::uint64_t idx = 1; idx < total; ++idx) {
        const double obj = detail::three_level_objective(problem, idx, state);
        if (obj < best.objective) best = {idx, obj};
    }
    return best;
}

}  // namespace serial
}  // namespace heatctrl::kernels
