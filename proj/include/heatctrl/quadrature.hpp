#pragma once

#include <cmath>
#include <span>
#include <vector>

namespace heatctrl::quadrature {

/// Gauss–Legendre rule on [-1, 1].
struct Rule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// Cached rule of the given order (1 ≤ order ≤ 64).
const Rule& gauss_legendre(int order);

struct Estimate {
    double value = 0.0;
    double change = 0.0;  // |I(2p) − I(p)| at termination
    int panels = 0;
    bool converged = false;
};

template <class F>
double composite(F&& f, double lo, double hi, int panels, const Rule& rule) {
    const double width = (hi - lo) / panels;
    double total = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double mid = lo + (p + 0.5) * width;
        double acc = 0.0;
        for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
            acc += rule.weights[q] * f(mid + 0.5 * width * rule.nodes[q]);
        }
        total += 0.5 * width * acc;
    }
    return total;
}

/// Composite Gauss–Legendre with panel doubling until successive results
/// differ by less than `tol`, capped at `max_panels`.
template <class F>
Estimate integrate(F&& f, double lo, double hi, double tol, int max_panels = 1 << 14, int order = 16) {
    const Rule& rule = gauss_legendre(order);
    Estimate est;
    int panels = 1;
    double prev = composite(f, lo, hi, panels, rule);
    while (panels < max_panels) {
        panels *= 2;
        const double next = composite(f, lo, hi, panels, rule);
        est.change = std::abs(next - prev);
        prev = next;
        if (est.change < tol) {
            est.converged = true;
            break;
        }
    }
    est.value = prev;
    est.panels = panels;
    return est;
}

/// Integrates over [0, 1], splitting at `breaks` so that kinks fall on panel
/// edges. The tolerance is shared between pieces in proportion to their length.
template <class F>
Estimate integrate_unit(F&& f, std::span<const double> breaks, double tol, int max_panels = 1 << 14) {
    std::vector<double> edges{0.0};
    for (double b : breaks) {
        if (b > edges.back() && b < 1.0) edges.push_back(b);
    }
    edges.push_back(1.0);
    Estimate total{0.0, 0.0, 0, true};
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
        const double len = edges[i + 1] - edges[i];
        const Estimate piece = integrate(f, edges[i], edges[i + 1], tol * len, max_panels);
        total.value += piece.value;
        total.change += piece.change;
        total.panels += piece.panels;
        total.converged = total.converged && piece.converged;
    }
    return total;
}

}  // namespace heatctrl::quadrature
