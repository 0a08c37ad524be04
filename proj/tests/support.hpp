#pragma once

#include <random>
#include <vector>

#include "heatctrl/field.hpp"
#include "heatctrl/problem.hpp"

namespace heatctrl::testing {

/// Boundary control, α = 1, T = 1, y_Ω ≡ 0.5, μ = 0.02. Its ν = 0 optimum has three
/// simple switching points and |φ̄(1,T)| − μ ≈ 0.023.
inline ProblemSpec generic_problem(int cells = 32) {
    ProblemSpec p;
    p.alpha = 1.0;
    p.mu = 0.02;
    p.target = Profile::constant(0.5);
    p.cells = cells;
    return p;
}

inline Control random_control(const ProblemSpec& p, int cells, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unit(p.lower, p.upper);
    Control c = Control::constant(p.horizon, cells, p.lower, p.upper);
    for (double& v : c.values) v = unit(rng);
    return c;
}

inline AdjointTrace single_mode_trace(double coeff, double rho, double horizon = 1.0) {
    return AdjointTrace{{coeff}, {rho * rho}, horizon};
}

}  // namespace heatctrl::testing
