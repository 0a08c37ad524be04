#include "heatctrl/problem.hpp"

#include <cmath>

#include "heatctrl/error.hpp"

namespace heatctrl {

void ProblemSpec::validate() const {
    auto finite = [](double v) { return std::isfinite(v); };
    if (!finite(horizon) || horizon <= 0.0) throw ValidationError("T", "must be > 0");
    if (!finite(alpha) || alpha < 0.0) throw ValidationError("alpha", "must be >= 0");
    if (!finite(nu) || nu < 0.0) throw ValidationError("nu", "must be >= 0");
    if (!finite(mu) || mu <= 0.0) throw ValidationError("mu", "must be > 0");
    if (!finite(lower) || lower >= 0.0) throw ValidationError("a", "must be < 0");
    if (!finite(upper) || upper <= 0.0) throw ValidationError("b", "must be > 0");
    if (modes < 1) throw ValidationError("modes", "must be >= 1");
    if (cells < 1) throw ValidationError("grid_cells", "must be >= 1");
}

}  // namespace heatctrl
