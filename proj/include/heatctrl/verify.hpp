#pragma once

#include <string>
#include <vector>

#include "heatctrl/oracle.hpp"
#include "heatctrl/solver.hpp"

namespace heatctrl {

struct VerifyOptions {
    oracle::FDGrid grid;
    oracle::FDOptions fd;
    SolveOptions solve;
    int spectral_modes = 512;     // modes for the terminal-profile comparison
    double eps_fraction = 1e-3;   // trace comparison and switching scan stop at T(1 − eps)
    bool brute_force = true;
    int gradient_cells = 8;
    double gradient_step = 1e-4;
    int duality_seed = 11;
    double profile_tol = 1e-4;
    double trace_tol = 1e-4;
    double gradient_tol = 1e-6;
    double duality_tol = 1e-6;
    double brute_force_slack = 1e-10;
    double structure_delta = 1e-3;
};

struct CheckResult {
    std::string name;
    bool passed = false;
    bool skipped = false;
    double measured = 0.0;
    double tolerance = 0.0;
    std::string detail;
};

struct VerifyReport {
    std::vector<CheckResult> checks;
    SolveResult solution;
    bool passed() const noexcept;
};

/// Solves the problem and cross-checks it: spectral vs finite-difference terminal
/// profile and adjoint trace, finite-difference gradient, discrete duality of the
/// finite-difference scheme, brute force (ν = 0 and at most 8 cells) and the
/// switching structure (ν = 0).
VerifyReport run_verify(const ProblemSpec& problem, const VerifyOptions& options = {});

/// Spectral terminal profile of `control` reconstructed with `modes` modes,
/// minus the Crank–Nicolson profile, in the trapezoid L² norm.
double terminal_profile_difference(const ProblemSpec& problem, const Control& control, int modes,
                                   const oracle::FDGrid& grid, const oracle::FDOptions& fd = {});

/// max over time nodes t ≤ T(1 − eps_fraction) of |φ_CN(1,t) − φ_spectral(1,t)|, both
/// driven by their own terminal defect.
double adjoint_trace_difference(const ProblemSpec& problem, const Control& control, const oracle::FDGrid& grid,
                                double eps_fraction, const oracle::FDOptions& fd = {});

}  // namespace heatctrl
