#include "heatctrl/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "heatctrl/error.hpp"
#include "heatctrl/optimality.hpp"

namespace heatctrl {

void SolveOptions::validate() const {
    if (max_iters < 1) throw DomainError("max_iters must be >= 1");
    if (!(tol > 0.0)) throw DomainError("tol must be > 0");
    if (!(safety > 0.0 && safety <= 1.0)) throw DomainError("safety must lie in (0, 1]");
}

double soft_clamp(double v, double threshold, double a, double b) {
    double s = 0.0;
    if (v > threshold) s = v - threshold;
    else if (v < -threshold) s = v + threshold;
    return std::clamp(s, a, b);
}

double operator_norm_sq(const kernels::ModeCellMatrix& forward, std::span<const double> normalizers,
                        double cell_width) {
    if (forward.modes == 0 || forward.cells == 0) return 0.0;
    const auto m = static_cast<std::size_t>(forward.cells);
    std::vector<double> v(m), g(static_cast<std::size_t>(forward.modes)), w(m);
    // Deterministic start with components in every direction.
    for (std::size_t k = 0; k < m; ++k) v[k] = 1.0 + 0.1 * std::sin(1.0 + 3.0 * static_cast<double>(k));
    auto normalize = [](std::vector<double>& x) {
        const double norm = std::sqrt(std::inner_product(x.begin(), x.end(), x.begin(), 0.0));
        if (norm > 0.0) for (double& e : x) e /= norm;
        return norm;
    };
    normalize(v);
    double lambda = 0.0;
    constexpr int kCap = 100000;
    for (int it = 0; it < kCap; ++it) {
        kernels::apply(forward, v, g);
        for (std::size_t n = 0; n < g.size(); ++n) g[n] /= normalizers[n];
        kernels::apply_transpose(forward, g, w);
        const double next = std::inner_product(v.begin(), v.end(), w.begin(), 0.0);
        if (next == 0.0) return 0.0;
        const bool done = it > 0 && std::abs(next - lambda) <= 1e-8 * next;
        lambda = next;
        if (done) return lambda / cell_width;
        v = w;
        normalize(v);
    }
    throw ConvergenceError("power iteration for the operator norm did not converge");
}

double operator_norm_sq(const Discretization& disc) {
    return operator_norm_sq(disc.forward(), disc.basis().normalizers, disc.cell_width());
}

ObjectiveTerms objective(const Discretization& disc, std::span<const double> u) {
    const auto& p = disc.problem();
    const double h = disc.cell_width();
    ObjectiveTerms terms;
    terms.tracking = 0.5 * disc.defect(u).defect_norm_sq;
    double sq = 0.0, abs = 0.0;
    for (double v : u) {
        sq += v * v;
        abs += std::abs(v);
    }
    terms.tikhonov = 0.5 * p.nu * h * sq;
    terms.sparse = p.mu * h * abs;
    return terms;
}

ObjectiveTerms objective(const ProblemSpec& problem, const Control& control) {
    ProblemSpec p = problem;
    p.cells = control.cells();
    return objective(Discretization(p), control.values);
}

namespace {

struct Evaluation {
    std::vector<double> phi_avg;
    double smooth = 0.0;  // tracking + tikhonov
    double total = 0.0;
};

class Evaluator {
public:
    explicit Evaluator(const Discretization& disc) : disc_(disc) {}

    Evaluation at(std::span<const double> u) const {
        Evaluation e;
        const auto defect = disc_.defect(u);
        e.phi_avg = disc_.cell_averages(disc_.trace(defect));
        const auto& p = disc_.problem();
        const double h = disc_.cell_width();
        double sq = 0.0, abs = 0.0;
        for (double v : u) {
            sq += v * v;
            abs += std::abs(v);
        }
        e.smooth = 0.5 * defect.defect_norm_sq + 0.5 * p.nu * h * sq;
        e.total = e.smooth + p.mu * h * abs;
        return e;
    }

private:
    const Discretization& disc_;
};

void prox_step(std::span<const double> y, const Evaluation& ey, double step, const ProblemSpec& p,
               std::vector<double>& out) {
    for (std::size_t k = 0; k < y.size(); ++k) {
        out[k] = soft_clamp(y[k] - step * (ey.phi_avg[k] + p.nu * y[k]), step * p.mu, p.lower, p.upper);
    }
}

// Quadratic upper bound of the smooth part around y, in the L²(0,T) metric.
bool sufficient_decrease(std::span<const double> y, const Evaluation& ey, std::span<const double> u,
                         const Evaluation& eu, double step, const ProblemSpec& p, double h) {
    double lin = 0.0, sq = 0.0;
    for (std::size_t k = 0; k < y.size(); ++k) {
        const double d = u[k] - y[k];
        lin += (ey.phi_avg[k] + p.nu * y[k]) * d;
        sq += d * d;
    }
    const double bound = ey.smooth + h * lin + h * sq / (2.0 * step);
    return eu.smooth <= bound + 1e-14 * std::max(1.0, std::abs(bound));
}

}  // namespace

SolveResult solve(const Discretization& disc, const SolveOptions& options) {
    options.validate();
    const auto& p = disc.problem();
    const int m = disc.cells();
    const double h = disc.cell_width();
    const Evaluator eval(disc);

    SolveResult result;
    result.operator_norm_sq = operator_norm_sq(disc);
    const double lipschitz = result.operator_norm_sq + p.nu;
    // Backtracking starts optimistic and halves on demand.
    const double first = options.step_rule == StepRule::backtracking ? 4.0 : options.safety;
    double step = lipschitz > 0.0 ? first / lipschitz : 1.0;

    std::vector<double> u(static_cast<std::size_t>(m), 0.0);
    if (options.warm_start) {
        if (static_cast<int>(options.warm_start->size()) != m) {
            throw DomainError("warm start has " + std::to_string(options.warm_start->size()) + " cells, expected " +
                              std::to_string(m));
        }
        for (int k = 0; k < m; ++k) u[k] = std::clamp((*options.warm_start)[k], p.lower, p.upper);
    }

    Evaluation eu = eval.at(u);
    std::vector<double> y = u, u_next(u.size()), best = u;
    Evaluation ey = eu;
    double theta = 1.0;
    double best_residual = std::numeric_limits<double>::infinity();
    double best_gap = 0.0;
    const double width = p.upper - p.lower;

    auto measure = [&](const std::vector<double>& x, const Evaluation& ex) {
        const double r = stationarity_residual(x, ex.phi_avg, p);
        const double gap = variational_gap(x, ex.phi_avg, p);
        return std::pair{r, gap};
    };

    auto [residual, gap] = measure(u, eu);
    auto done = [&](double r, double g) { return r <= options.tol && g <= options.tol * width; };
    best_residual = residual;
    best_gap = gap;

    auto advance = [&](const std::vector<double>& from, const Evaluation& ef) {
        prox_step(from, ef, step, p, u_next);
        Evaluation en = eval.at(u_next);
        if (options.step_rule == StepRule::backtracking) {
            while (!sufficient_decrease(from, ef, u_next, en, step, p, h) && step > 1e-300) {
                step *= 0.5;
                prox_step(from, ef, step, p, u_next);
                en = eval.at(u_next);
            }
        }
        return en;
    };

    int it = 0;
    bool converged = done(residual, gap);
    while (!converged && it < options.max_iters) {
        ++it;
        Evaluation en = advance(y, ey);

        if (options.acceleration && en.total > eu.total) {
            // Restart: drop momentum and take a plain step from the current point.
            theta = 1.0;
            y = u;
            ey = eu;
            en = advance(y, ey);
        }

        if (options.acceleration) {
            const double theta_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * theta * theta));
            const double beta = (theta - 1.0) / theta_next;
            for (int k = 0; k < m; ++k) {
                y[k] = std::clamp(u_next[k] + beta * (u_next[k] - u[k]), p.lower, p.upper);
            }
            theta = theta_next;
            u.swap(u_next);
            eu = std::move(en);
            ey = beta == 0.0 ? eu : eval.at(y);
        } else {
            u.swap(u_next);
            eu = std::move(en);
            y = u;
            ey = eu;
        }

        std::tie(residual, gap) = measure(u, eu);
        if (options.record_history) {
            result.residual_history.push_back(residual);
            result.objective_history.push_back(eu.total);
        }
        if (options.on_iteration) options.on_iteration(it, eu.total, residual);
        if (residual < best_residual) {
            best_residual = residual;
            best_gap = gap;
            best = u;
        }
        converged = done(residual, gap);
    }

    result.iterations = it;
    result.converged = converged;
    const auto& final_u = converged ? u : best;
    result.residual = converged ? residual : best_residual;
    result.variational_gap = converged ? gap : best_gap;
    result.step = step;
    result.control = Control{p.horizon, p.lower, p.upper, final_u};
    result.objective = objective(disc, final_u);
    return result;
}

SolveResult solve(const ProblemSpec& problem, const SolveOptions& options) {
    const Discretization disc(problem);
    return solve(disc, options);
}

}  // namespace heatctrl
