#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace heatctrl {

/// Precondition violated by an argument (negative α, t outside the admissible window, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Invalid problem or configuration field; `field()` names the offending entry.
class ValidationError : public DomainError {
public:
    ValidationError(std::string field, const std::string& message)
        : DomainError(field + ": " + message), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

/// An iterative procedure hit its cap. `index()` identifies the failing item
/// (eigen-branch, quadrature coefficient, ...), or -1 when not applicable.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& message, int index = -1)
        : std::runtime_error(message), index_(index) {}

    int index() const noexcept { return index_; }

private:
    int index_;
};

}  // namespace heatctrl
