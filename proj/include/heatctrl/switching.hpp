#pragma once

#include <optional>
#include <string>
#include <vector>

#include "heatctrl/field.hpp"
#include "heatctrl/problem.hpp"

namespace heatctrl {

/// Level crossed by φ(1,t) at a switching point.
enum class SwitchEquation {
    minus_mu_minus_nu_b,  // φ = −μ − νb, u leaves b (ν > 0)
    minus_mu,             // φ = −μ
    plus_mu,              // φ = μ
    plus_mu_minus_nu_a,   // φ = μ − νa, u reaches a (ν > 0)
};

const char* to_string(SwitchEquation eq);
double level_value(SwitchEquation eq, const ProblemSpec& problem);
/// Equations that are distinct for the given ν.
std::vector<SwitchEquation> relevant_equations(double nu);

struct SwitchingPoint {
    double t = 0.0;
    SwitchEquation equation = SwitchEquation::plus_mu;
    int sign_change = 0;   // +1 if φ − level goes from negative to positive
    int multiplicity = 0;  // 0 if not determined (too close to T or degenerate)
};

enum class SegmentLevel { lower, zero, upper, ramp };
const char* to_string(SegmentLevel level);

struct Segment {
    double start = 0.0;
    double end = 0.0;
    SegmentLevel level = SegmentLevel::zero;
};

struct Anomaly {
    std::string kind;  // tangential_touch, accumulation_suspected, degenerate_root, terminal_ambiguous
    double t = 0.0;
    std::string detail;
};

struct SwitchingReport {
    double nu = 0.0;
    double eps = 0.0;
    double scan_end = 0.0;  // T − eps; nothing inside (scan_end, T] is resolved
    std::vector<SwitchingPoint> points;  // increasing in t
    std::vector<Segment> structure;      // covers [0, scan_end]
    std::vector<Anomaly> anomalies;
    std::optional<double> terminal_value;  // φ(1,T) if supplied
};

struct ScanOptions {
    int samples = 4096;
    int refine_factor = 4;  // extra density on [T − 10 eps, T − eps]
    int max_order = 6;
    double deriv_threshold = 1e-6;
    std::optional<double> terminal_value;
};

/// Roots of φ(1,t) − level on [0, T − eps] for every relevant level. Dense scan,
/// bisection to 1e-12·T, Newton polish. Only sign changes are switching points;
/// touches without a sign change are listed as anomalies.
/// Throws DomainError unless 0 < eps < T.
SwitchingReport find_switching_points(const AdjointTrace& trace, const ProblemSpec& problem, double eps,
                                      const ScanOptions& options = {});

/// Smallest n ≤ max_order with |φ^{(n)}(t)| > threshold · Σ_k |c_k| ρ_k^{2n} e^{−ρ_k²(T−t)}.
/// Throws DomainError for t > T − eps_guard or max_order outside [1, 6], and
/// ConvergenceError("degenerate root beyond max_order") if no order qualifies.
int multiplicity(const AdjointTrace& trace, double t_root, int max_order = 6, double threshold = 1e-6);

struct StructureValidation {
    bool levels_ok = true;
    std::vector<int> off_level_cells;
    bool adjacency_ok = true;
    std::vector<int> adjacency_cells;  // k such that cells k and k+1 jump between a and b
    bool terminal_checked = false;
    bool terminal_ok = true;
    bool accumulation_flagged = false;
    double fraction_near_levels = 0.0;
    double fraction_bound = 0.0;  // 1 − 2·(#points)/M
    std::vector<std::string> findings;

    bool passed() const noexcept {
        return levels_ok && adjacency_ok && terminal_ok && fraction_near_levels >= fraction_bound;
    }
};

/// Structural checks for a ν = 0 optimum: cells not straddling a switching point
/// sit within delta of their segment's level, no cell-to-cell a↔b jump, and the
/// final segment agrees with the sign of φ(1,T) ∓ μ when that is decisive.
StructureValidation validate_structure(const Control& control, const SwitchingReport& report,
                                       const ProblemSpec& problem, double delta);

struct SwitchingPair {
    SwitchingPoint reference;             // ν = 0 root
    std::vector<SwitchingPoint> matches;  // ν roots of the corresponding equations inside the window
    double max_distance = 0.0;            // 0 when matches is empty
};

struct Pairing {
    std::vector<SwitchingPair> pairs;
    std::vector<SwitchingPoint> unmatched;  // ν roots outside every window
    bool all_matched() const noexcept;
    double max_distance() const noexcept;
};

/// Matches ν roots to ν = 0 roots within (t_j − tau, t_j + tau). A +μ reference
/// root pairs with the φ = μ and φ = μ − νa roots, a −μ one with φ = −μ and
/// φ = −μ − νb. Throws DomainError("tau too large for point separation") if two
/// reference roots are closer than 2·tau.
Pairing pair_switching_points(const SwitchingReport& report_nu, const SwitchingReport& report_zero, double tau);

}  // namespace heatctrl
