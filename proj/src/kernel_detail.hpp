#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "heatctrl/kernels.hpp"

namespace heatctrl::kernels::detail {

inline double cell_exponential(double rho_sq, double horizon, int cells, int k) {
    const double h = horizon / cells;
    if (rho_sq == 0.0) return h;
    const double lag = (cells - 1 - k) * h;  // T − t_{k+1}
    return std::exp(-rho_sq * lag) * (-std::expm1(-rho_sq * h)) / rho_sq;
}

inline double level_value(int digit, double lower, double upper) {
    return digit == 0 ? lower : (digit == 1 ? 0.0 : upper);
}

/// Objective of one three-level control; `state` is scratch of length modes.
inline double three_level_objective(const ThreeLevelProblem& p, std::uint64_t index, std::vector<double>& state) {
    const ModeCellMatrix& f = *p.forward;
    double penalty = 0.0;
    for (int n = 0; n < f.modes; ++n) state[n] = p.offset[n];
    std::uint64_t rest = index;
    for (int k = 0; k < f.cells; ++k) {
        const double u = level_value(static_cast<int>(rest % 3), p.lower, p.upper);
        rest /= 3;
        if (u == 0.0) continue;
        penalty += 0.5 * p.nu * p.cell_width * u * u + p.mu * p.cell_width * std::abs(u);
        for (int n = 0; n < f.modes; ++n) state[n] += f(n, k) * u;
    }
    double tracking = 0.0;
    for (int n = 0; n < f.modes; ++n) {
        const double d = state[n] - p.target[n];
        tracking += d * d / p.normalizers[n];
    }
    return 0.5 * tracking + penalty;
}

inline std::uint64_t three_level_count(int cells) {
    std::uint64_t total = 1;
    for (int k = 0; k < cells; ++k) total *= 3;
    return total;
}

}  // namespace heatctrl::kernels::detail
