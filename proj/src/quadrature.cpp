#include "heatctrl/quadrature.hpp"

#include <array>
#include <mutex>
#include <numbers>

#include "heatctrl/error.hpp"

namespace heatctrl::quadrature {

namespace {

Rule build_rule(int order) {
    Rule rule;
    rule.nodes.resize(order);
    rule.weights.resize(order);
    // Newton on P_order seeded by the Chebyshev-like guess; symmetric pairs.
    for (int i = 0; i < (order + 1) / 2; ++i) {
        long double x = std::cos(std::numbers::pi_v<long double> * (i + 0.75L) / (order + 0.5L));
        long double dp = 0.0L;
        for (int iter = 0; iter < 100; ++iter) {
            long double p0 = 1.0L;
            long double p1 = x;
            for (int k = 2; k <= order; ++k) {
                const long double pk = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = pk;
            }
            dp = order * (x * p1 - p0) / (x * x - 1.0L);
            const long double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-19L) break;
        }
        const long double w = 2.0L / ((1.0L - x * x) * dp * dp);
        rule.nodes[i] = static_cast<double>(-x);
        rule.nodes[order - 1 - i] = static_cast<double>(x);
        rule.weights[i] = static_cast<double>(w);
        rule.weights[order - 1 - i] = static_cast<double>(w);
    }
    return rule;
}

}  // namespace

const Rule& gauss_legendre(int order) {
    if (order < 1 || order > 64) throw DomainError("gauss_legendre: order must be in [1, 64]");
    static std::array<Rule, 65> cache;
    static std::array<std::once_flag, 65> flags;
    std::call_once(flags[order], [order] { cache[order] = build_rule(order); });
    return cache[order];
}

}  // namespace heatctrl::quadrature
