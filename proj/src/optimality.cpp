#include "heatctrl/optimality.hpp"

#include <algorithm>
#include <cmath>

#include "heatctrl/error.hpp"

namespace heatctrl {

const char* to_string(RegionLabel label) {
    switch (label) {
        case RegionLabel::Plus: return "plus";
        case RegionLabel::Zero: return "zero";
        case RegionLabel::Minus: return "minus";
        case RegionLabel::RampUp: return "ramp_up";
        case RegionLabel::RampDown: return "ramp_down";
        case RegionLabel::BoundaryAmbiguous: return "ambiguous";
    }
    return "unknown";
}

ProxValue prox(double phi, double nu, double mu, double a, double b) {
    if (!(mu > 0.0)) throw DomainError("prox: mu must be > 0");
    if (nu > 0.0) {
        if (phi <= -mu - nu * b) return {b, false};
        if (phi < -mu) return {-(phi + mu) / nu, false};
        if (phi <= mu) return {0.0, false};
        if (phi < mu - nu * a) return {-(phi - mu) / nu, false};
        return {a, false};
    }
    if (phi < -mu) return {b, false};
    if (phi > mu) return {a, false};
    return {0.0, std::abs(phi) == mu};
}

double lambda_of_phi(double phi, double mu) {
    if (!(mu > 0.0)) throw DomainError("lambda_of_phi: mu must be > 0");
    return std::clamp(-phi / mu, -1.0, 1.0);
}

RegionLabel classify(double phi, double nu, double mu, double a, double b) {
    if (phi == -mu || phi == mu) return RegionLabel::BoundaryAmbiguous;
    if (std::abs(phi) < mu) return RegionLabel::Zero;
    if (nu > 0.0) {
        if (phi == -mu - nu * b || phi == mu - nu * a) return RegionLabel::BoundaryAmbiguous;
        if (phi < -mu - nu * b) return RegionLabel::Minus;
        if (phi < -mu) return RegionLabel::RampUp;
        if (phi < mu - nu * a) return RegionLabel::RampDown;
        return RegionLabel::Plus;
    }
    return phi < -mu ? RegionLabel::Minus : RegionLabel::Plus;
}

std::vector<RegionLabel> classify_regions(const AdjointTrace& trace, const ProblemSpec& problem,
                                          std::span<const double> sample_times) {
    std::vector<double> phi(sample_times.size());
    trace_sample(trace, sample_times, 0, phi);
    std::vector<RegionLabel> out(phi.size());
    std::transform(phi.begin(), phi.end(), out.begin(), [&](double p) {
        return classify(p, problem.nu, problem.mu, problem.lower, problem.upper);
    });
    return out;
}

namespace {

double cell_gap(double u, double phi, double nu, double mu, double a, double b) {
    const double slope = phi + nu * u;
    double worst = 0.0;
    for (double v : {a, 0.0, b}) {
        worst = std::max(worst, -(slope * (v - u) + mu * (std::abs(v) - std::abs(u))));
    }
    return worst;
}

}  // namespace

double variational_gap(std::span<const double> u, std::span<const double> phi_avg, const ProblemSpec& problem) {
    double worst = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) {
        worst = std::max(worst, cell_gap(u[k], phi_avg[k], problem.nu, problem.mu, problem.lower, problem.upper));
    }
    return worst;
}

double stationarity_residual(std::span<const double> u, std::span<const double> phi_avg, const ProblemSpec& problem) {
    if (u.size() != phi_avg.size()) throw DomainError("stationarity_residual: size mismatch");
    if (problem.nu == 0.0) return variational_gap(u, phi_avg, problem) / (problem.upper - problem.lower);
    double worst = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) {
        const double target = prox_map(phi_avg[k], problem.nu, problem.mu, problem.lower, problem.upper);
        worst = std::max(worst, std::abs(u[k] - target));
    }
    return worst;
}

double stationarity_residual(const Control& control, const AdjointTrace& trace, const ProblemSpec& problem) {
    auto avg = trace_cell_integrals(trace, control.cells());
    const double h = control.cell_width();
    for (double& v : avg) v /= h;
    return stationarity_residual(control.values, avg, problem);
}

}  // namespace heatctrl
