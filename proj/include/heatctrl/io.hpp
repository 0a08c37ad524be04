#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "heatctrl/solver.hpp"
#include "heatctrl/sweep.hpp"
#include "heatctrl/switching.hpp"
#include "heatctrl/verify.hpp"

namespace heatctrl::io {

/// Shortest decimal that parses back to the same double.
std::string format_double(double v);

void write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

/// cell_index,t_mid,u
std::string control_csv(const Control& control);
/// Values of the u column, in cell order. Throws DomainError on malformed input.
std::vector<double> parse_control_csv(const std::string& text);

/// t,phi
std::string trace_csv(std::span<const double> times, std::span<const double> values);
/// iteration,objective,residual
std::string convergence_csv(const SolveResult& result);

struct SparsityCertificate {
    double max_abs_phi_at_zero = 0.0;  // max_k |cell average of φ| for u ≡ 0
    double mu = 0.0;
    bool zero_is_optimal = false;      // max ≤ μ certifies u ≡ 0
};
SparsityCertificate sparsity_certificate(const Discretization& disc);

std::string objective_json(const SolveResult& result, const SparsityCertificate& certificate);
std::string switching_json(const SwitchingReport& report, const std::optional<StructureValidation>& validation);
std::string sweep_csv(const SweepResult& result);
std::string sweep_json(const SweepResult& result);
std::string verify_json(const VerifyReport& report);

}  // namespace heatctrl::io
