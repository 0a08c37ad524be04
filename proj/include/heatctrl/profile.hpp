#pragma once

#include <utility>
#include <variant>
#include <vector>

namespace heatctrl {

/// A continuous function on [0, 1]: target state, initial state, or distributed
/// control shape.
class Profile {
public:
    struct Constant {
        double value = 0.0;
    };
    /// amplitude * cos(rho * x); rho is the resolved eigen-root of the mode index.
    struct Mode {
        int index = 1;
        double amplitude = 1.0;
        double rho = 0.0;
    };
    /// sum_k coeffs[k] * x^k
    struct Polynomial {
        std::vector<double> coeffs;
    };
    /// Piecewise-linear interpolation of (x, value) samples, constant extension
    /// outside the sampled range.
    struct Table {
        std::vector<double> xs;
        std::vector<double> values;
    };

    using Variant = std::variant<Constant, Mode, Polynomial, Table>;

    Profile() : repr_(Constant{}) {}
    Profile(Variant repr);  // validates tables

    static Profile constant(double value) { return Profile(Constant{value}); }
    static Profile mode(int index, double amplitude, double rho) { return Profile(Mode{index, amplitude, rho}); }
    static Profile polynomial(std::vector<double> coeffs) { return Profile(Polynomial{std::move(coeffs)}); }
    static Profile table(std::vector<double> xs, std::vector<double> values);

    double operator()(double x) const;

    /// Interior points in (0, 1) where the profile may fail to be smooth.
    std::vector<double> breakpoints() const;

    bool is_zero() const;

    const Variant& repr() const noexcept { return repr_; }

private:
    Variant repr_;
};

}  // namespace heatctrl
