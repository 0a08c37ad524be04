#pragma once

#include <optional>

#include "heatctrl/profile.hpp"

namespace heatctrl {

enum class ShapeKind { boundary, distributed };

/// Physical and regularization data of the sparse boundary control problem
///
///   min ½‖y(·,T) − y_Ω‖² + (ν/2)‖u‖² + μ‖u‖₁,   a ≤ u ≤ b,
///
/// with y_t = y_xx on (0,1), y_x(0,t) = 0, y_x(1,t) + α y(1,t) = u(t) and
/// y(·,0) = y₀. With `shape == distributed` the control enters as a source
/// e(x)u(t) and the Robin condition is homogeneous.
struct ProblemSpec {
    double horizon = 1.0;  // T
    double alpha = 1.0;
    double nu = 0.0;
    double mu = 0.1;
    double lower = -1.0;  // a
    double upper = 1.0;   // b
    Profile target;
    ShapeKind shape = ShapeKind::boundary;
    Profile shape_profile = Profile::constant(1.0);  // e(x), distributed only
    std::optional<Profile> initial;                  // y₀
    int modes = 64;
    int cells = 32;

    /// Throws ValidationError naming the first invalid field.
    void validate() const;
};

}  // namespace heatctrl
