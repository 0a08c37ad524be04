#include "heatctrl/spectrum.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <numbers>
#include <string>

#include "heatctrl/error.hpp"

namespace heatctrl {

namespace {

using ld = long double;
constexpr ld kPi = std::numbers::pi_v<ld>;
constexpr int kMaxIterations = 400;

ld residual(ld rho, ld alpha) { return rho * std::tan(rho) - alpha; }

ld find_branch_root(int branch, ld alpha, ld tol) {
    // Branch n (1-based) lives in ((n−1)π, (n−1)π + π/2); f = ρ tan ρ − α runs
    // from −α up to +∞ across it. Endpoints are pulled in to stay off the pole.
    const ld base = (branch - 1) * kPi;
    const ld shrink = 1e-9L * kPi;
    ld lo = base + shrink;
    ld hi = base + kPi / 2 - shrink;
    if (residual(lo, alpha) >= 0 || residual(hi, alpha) <= 0) {
        throw ConvergenceError("eigen-root not bracketed on branch " + std::to_string(branch), branch);
    }
    ld rho = 0.5L * (lo + hi);
    // A few bisection steps first: Newton from the midpoint can overshoot toward the pole.
    for (int i = 0; i < 8; ++i) {
        (residual(rho, alpha) < 0 ? lo : hi) = rho;
        rho = 0.5L * (lo + hi);
    }
    for (int iter = 0; iter < kMaxIterations; ++iter) {
        const ld f = residual(rho, alpha);
        if (std::abs(f) <= tol) return rho;
        (f < 0 ? lo : hi) = rho;
        const ld c = std::cos(rho);
        const ld slope = std::tan(rho) + rho / (c * c);
        ld next = rho - f / slope;
        if (!(next > lo && next < hi)) next = 0.5L * (lo + hi);
        if (next == rho || hi - lo <= 0) break;
        rho = next;
    }
    if (std::abs(residual(rho, alpha)) <= tol) return rho;
    throw ConvergenceError("eigen-root iteration cap reached on branch " + std::to_string(branch), branch);
}

}  // namespace

std::vector<double> EigenBasis::rho_squared() const {
    std::vector<double> out(rhos.size());
    for (std::size_t i = 0; i < rhos.size(); ++i) out[i] = rhos[i] * rhos[i];
    return out;
}

double recommended_tolerance(int count) {
    const double rho_max = (count - 0.5) * std::numbers::pi;
    return std::max(1e-13, 8.0 * rho_max * rho_max * static_cast<double>(LDBL_EPSILON));
}

long double normalizer_from_double_angle(long double rho) {
    if (rho == 0) return 1.0L;
    return 0.5L + std::sin(2 * rho) / (4 * rho);
}

long double normalizer_from_alpha(long double rho, double alpha) {
    const ld s = std::sin(rho);
    return 0.5L + s * s / (2 * static_cast<ld>(alpha));
}

EigenBasis compute_eigenvalues(double alpha, int count, double tol) {
    if (!(alpha >= 0.0)) throw DomainError("compute_eigenvalues: alpha must be >= 0");
    if (count < 1) throw DomainError("compute_eigenvalues: count must be >= 1");
    if (!(tol > 0.0)) throw DomainError("compute_eigenvalues: tol must be > 0");

    EigenBasis basis;
    basis.alpha = alpha;
    basis.residual_tol = tol;
    basis.rhos.resize(count);
    basis.rhos_ext.resize(count);
    basis.normalizers.resize(count);
    for (int n = 1; n <= count; ++n) {
        ld rho = 0;
        ld norm = 0;
        if (alpha == 0.0) {
            rho = (n - 1) * kPi;
            norm = n == 1 ? 1.0L : 0.5L;
        } else {
            rho = find_branch_root(n, alpha, tol);
            norm = normalizer_from_double_angle(rho);
        }
        basis.rhos_ext[n - 1] = rho;
        basis.rhos[n - 1] = alpha == 0.0 ? (n - 1) * std::numbers::pi : static_cast<double>(rho);
        basis.normalizers[n - 1] = static_cast<double>(norm);
    }
    return basis;
}

long double root_residual(const EigenBasis& basis, int n) {
    return std::abs(residual(basis.rhos_ext.at(n), basis.alpha));
}

double tail_bound(const EigenBasis& basis, double time_gap) {
    if (!(time_gap > 0.0)) throw DomainError("tail_bound: time_gap must be > 0");
    double sum = 0.0;
    for (long n = basis.count() + 1;; ++n) {
        const double r = (n - 1) * std::numbers::pi;
        const double term = std::exp(-r * r * time_gap);
        if (term == 0.0 || term <= sum * DBL_EPSILON) break;
        sum += term;
    }
    return 2.0 * sum;
}

}  // namespace heatctrl
