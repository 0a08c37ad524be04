#pragma once

#include <string>
#include <vector>

#include "heatctrl/error.hpp"
#include "heatctrl/problem.hpp"
#include "heatctrl/solver.hpp"
#include "heatctrl/verify.hpp"

namespace heatctrl {

/// Malformed configuration document; `field()` is the JSON path of the entry.
class ConfigError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

inline constexpr int kSchemaVersion = 1;

struct RunConfig {
    ProblemSpec problem;
    SolveOptions solve;
    double eps_fraction = 1e-3;  // switching scan window, fraction of T
    VerifyOptions verify;
    std::vector<double> nus;     // sweep list, may be empty
    int workers = 1;
    int seed = 11;
};

/// Parses and validates a configuration document:
///
///   { "schema_version": 1,
///     "problem": { "T", "alpha", "nu", "mu", "a", "b", "target", "control_shape",
///                  "y0", "modes", "grid_cells" },
///     "solver": { "max_iters", "tol", "acceleration", "step_rule" },
///     "switching": { "eps" },
///     "verify": { "space_points", "time_steps", "brute_force", "sabotage_flip_robin", ... },
///     "sweep": { "nus", "workers" },
///     "seed": 11 }
///
/// Profiles are a number, or {"type": "constant"|"mode"|"polynomial"|"table", ...}.
/// Unknown keys are rejected. Throws ConfigError, or ValidationError from the
/// problem checks (field names T, alpha, nu, mu, a, b, modes, grid_cells).
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

}  // namespace heatctrl
