#pragma once

#include <optional>
#include <string>
#include <vector>

#include "heatctrl/solver.hpp"
#include "heatctrl/switching.hpp"

namespace heatctrl {

struct SweepOptions {
    SolveOptions solve;
    int workers = 1;
    double eps_fraction = 1e-3;  // switching scan stops at T(1 − eps_fraction)
    std::optional<double> tau;   // pairing window; default 0.45 × smallest root gap, at most 0.1 T
    int trace_samples = 4096;    // for the sup-difference of the traces
};

struct SweepRecord {
    double nu = 0.0;
    bool ok = false;
    std::string failure;
    bool converged = false;
    int iterations = 0;
    double l1_control_error = 0.0;
    double l2_control_error = 0.0;
    double terminal_error = 0.0;          // ‖y_ν(·,T) − ȳ(·,T)‖ on the retained modes
    double trace_sup_difference = 0.0;    // sup over [0, T − eps] of |φ_ν(1,t) − φ̄(1,t)|
    std::vector<double> switching_distances;  // one per ν = 0 root; NaN if unmatched
    double switching_distance = 0.0;          // max over the pairs
    bool all_matched = false;
    int unmatched = 0;
    std::vector<double> control;
};

struct SlopeFit {
    std::string series;
    std::vector<double> nus;  // fitting window
    double slope = 0.0;
    bool valid = false;       // false if fewer than 2 usable points or a value is not positive
};

struct SweepResult {
    SolveResult reference;
    SwitchingReport reference_report;
    double reference_terminal_trace = 0.0;   // φ̄(1,T)
    double reference_terminal_margin = 0.0;  // ||φ̄(1,T)| − μ|
    double tau = 0.0;
    std::vector<SweepRecord> records;  // in the order of the ν list, ν = 0 excluded
    std::vector<SlopeFit> slopes;
    std::vector<int> multiplicities;   // per ν = 0 root
    int max_multiplicity = 0;
};

/// ν list must be strictly decreasing and positive except an optional trailing 0.
/// Throws DomainError otherwise.
void validate_nu_list(const std::vector<double>& nus);

/// Least-squares slope of log(values) against log(nus) over the smallest decade
/// of ν, widened to the `min_points` smallest ν if the decade is thinner.
SlopeFit fit_slope(const std::string& series, const std::vector<double>& nus, const std::vector<double>& values,
                   int min_points = 4);

/// Solves ν = 0 first, then every ν > 0 warm-started from the ν = 0 solution
/// (members are independent, so any worker count gives the same numbers).
/// A failing member is marked and the sweep continues. Throws ConvergenceError
/// if the reference solve does not converge.
SweepResult run_sweep(const ProblemSpec& problem, const std::vector<double>& nus, const SweepOptions& options = {});

}  // namespace heatctrl
