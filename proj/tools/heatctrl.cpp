// heatctrl: solve, sweep, switching analysis and verification from a JSON config.

#include <cstdlib>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "heatctrl/config.hpp"
#include "heatctrl/io.hpp"
#include "heatctrl/optimality.hpp"
#include "heatctrl/solver.hpp"
#include "heatctrl/sweep.hpp"
#include "heatctrl/switching.hpp"
#include "heatctrl/verify.hpp"

namespace {

using namespace heatctrl;

constexpr int kExitOk = 0;
constexpr int kExitVerifyFailed = 1;
constexpr int kExitConfig = 2;
constexpr int kExitNotConverged = 3;
constexpr int kTraceIntervals = 1024;

struct Common {
    std::string config;
    std::string out = ".";
    int modes = 0;
    int cells = 0;
    int workers = 0;
    double eps = 0.0;
};

void add_common(CLI::App* cmd, Common& c) {
    cmd->add_option("config", c.config, "JSON configuration file")->required();
    cmd->add_option("--out", c.out, "Output directory");
    cmd->add_option("--modes", c.modes, "Override the number of eigenmodes")->check(CLI::PositiveNumber);
    cmd->add_option("--cells", c.cells, "Override the number of control cells")->check(CLI::PositiveNumber);
    cmd->add_option("--workers", c.workers, "Concurrent sweep members")->check(CLI::PositiveNumber);
    cmd->add_option("--eps", c.eps, "Switching scan stops at T(1 - eps)")->check(CLI::Range(0.0, 1.0));
}

RunConfig load(const Common& c) {
    RunConfig cfg = load_config(c.config);
    if (c.modes > 0) cfg.problem.modes = c.modes;
    if (c.cells > 0) cfg.problem.cells = c.cells;
    if (c.workers > 0) cfg.workers = c.workers;
    if (c.eps > 0.0) {
        if (c.eps >= 1.0) throw ConfigError("--eps", "must lie in (0, 1)");
        cfg.eps_fraction = c.eps;
        cfg.verify.eps_fraction = c.eps;
    }
    cfg.problem.validate();
    std::filesystem::create_directories(c.out);
    return cfg;
}

std::string out_path(const Common& c, const std::string& name) { return (std::filesystem::path(c.out) / name).string(); }

void configure_logging() {
    auto logger = spdlog::stderr_color_mt("heatctrl");
    spdlog::set_default_logger(logger);
    spdlog::set_pattern("[%l] %v");
    const char* env = std::getenv("HEATCTRL_LOG");
    spdlog::set_level(env ? spdlog::level::from_str(env) : spdlog::level::warn);
}

struct Analysis {
    SwitchingReport report;
    std::optional<StructureValidation> validation;
    std::vector<double> times;
    std::vector<double> phi;
};

Analysis analyse(const Discretization& disc, const Control& control, double eps_fraction) {
    const auto& p = disc.problem();
    Analysis a;
    const auto trace = disc.trace(control.values);
    const double terminal = disc.terminal_trace_value(control.values).value;
    for (int i = 0; i < kTraceIntervals; ++i) a.times.push_back(p.horizon * i / kTraceIntervals);
    a.phi.resize(a.times.size());
    trace_sample(trace, a.times, 0, a.phi);
    a.times.push_back(p.horizon);
    a.phi.push_back(terminal);

    ScanOptions scan;
    scan.terminal_value = terminal;
    a.report = find_switching_points(trace, p, eps_fraction * p.horizon, scan);
    if (p.nu == 0.0) a.validation = validate_structure(control, a.report, p, 1e-3);
    return a;
}

SolveOptions logged(SolveOptions options) {
    options.on_iteration = [](int it, double obj, double res) {
        if (it % 1000 == 0) spdlog::debug("iteration {} objective {:.12e} residual {:.3e}", it, obj, res);
    };
    return options;
}

int run_solve(const Common& c, bool switch_only) {
    const RunConfig cfg = load(c);
    const Discretization disc(cfg.problem);
    spdlog::info("solving: nu={} mu={} modes={} cells={}", cfg.problem.nu, cfg.problem.mu, cfg.problem.modes,
                 cfg.problem.cells);
    const SolveResult res = solve(disc, logged(cfg.solve));
    spdlog::info("{} after {} iterations, residual {:.3e}", res.converged ? "converged" : "stopped", res.iterations,
                 res.residual);

    const Analysis a = analyse(disc, res.control, cfg.eps_fraction);
    io::write_file(out_path(c, "switching.json"), io::switching_json(a.report, a.validation));
    io::write_file(out_path(c, "trace.csv"), io::trace_csv(a.times, a.phi));
    if (!switch_only) {
        io::write_file(out_path(c, "control.csv"), io::control_csv(res.control));
        io::write_file(out_path(c, "objective.json"), io::objective_json(res, io::sparsity_certificate(disc)));
        io::write_file(out_path(c, "convergence.csv"), io::convergence_csv(res));
    }
    if (!res.converged) {
        spdlog::error("solver did not converge within {} iterations (residual {:.3e})", cfg.solve.max_iters,
                      res.residual);
        return kExitNotConverged;
    }
    return kExitOk;
}

std::vector<double> parse_nus(const std::string& text) {
    std::vector<double> nus;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        try {
            std::size_t used = 0;
            nus.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw ConfigError("--nus", "not a number: '" + item + "'");
        }
    }
    return nus;
}

int run_sweep_cmd(const Common& c, const std::string& nus_text) {
    const RunConfig cfg = load(c);
    const auto nus = nus_text.empty() ? cfg.nus : parse_nus(nus_text);
    try {
        validate_nu_list(nus);
    } catch (const DomainError& e) {
        throw ConfigError("--nus", e.what());
    }
    SweepOptions options;
    options.solve = cfg.solve;
    options.workers = cfg.workers;
    options.eps_fraction = cfg.eps_fraction;
    SweepResult result;
    try {
        result = run_sweep(cfg.problem, nus, options);
    } catch (const ConvergenceError& e) {
        spdlog::error("{}", e.what());
        return kExitNotConverged;
    }
    for (const auto& r : result.records) {
        if (!r.ok) spdlog::warn("nu={} failed: {}", r.nu, r.failure);
    }
    io::write_file(out_path(c, "sweep.csv"), io::sweep_csv(result));
    io::write_file(out_path(c, "sweep.json"), io::sweep_json(result));
    return kExitOk;
}

int run_verify_cmd(const Common& c, bool sabotage) {
    RunConfig cfg = load(c);
    if (sabotage) cfg.verify.fd.flip_robin_sign = true;
    const VerifyReport report = run_verify(cfg.problem, cfg.verify);
    for (const auto& check : report.checks) {
        spdlog::info("{}: {} (measured {:.3e}, tolerance {:.3e}) {}", check.name,
                     check.skipped ? "skipped" : check.passed ? "pass" : "fail", check.measured, check.tolerance,
                     check.detail);
    }
    io::write_file(out_path(c, "verify.json"), io::verify_json(report));
    return report.passed() ? kExitOk : kExitVerifyFailed;
}

}  // namespace

int main(int argc, char** argv) {
    configure_logging();
    CLI::App app{"Sparse optimal boundary control of the 1D heat equation"};
    app.require_subcommand(1);

    Common solve_args, sweep_args, switch_args, verify_args;
    std::string nus;
    bool sabotage = false;
    auto* solve_cmd = app.add_subcommand("solve", "Solve the control problem");
    add_common(solve_cmd, solve_args);
    auto* sweep_cmd = app.add_subcommand("sweep", "Solve along a list of nu values and fit convergence rates");
    add_common(sweep_cmd, sweep_args);
    sweep_cmd->add_option("--nus", nus, "Comma-separated, strictly decreasing nu values");
    auto* switch_cmd = app.add_subcommand("switchpoints", "Solve and report switching points only");
    add_common(switch_cmd, switch_args);
    auto* verify_cmd = app.add_subcommand("verify", "Cross-check the solution against the reference solvers");
    add_common(verify_cmd, verify_args);
    verify_cmd->add_flag("--sabotage-flip-robin", sabotage, "Test hook: flip the Robin sign in the reference solver");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (*solve_cmd) return run_solve(solve_args, false);
        if (*switch_cmd) return run_solve(switch_args, true);
        if (*sweep_cmd) return run_sweep_cmd(sweep_args, nus);
        if (*verify_cmd) return run_verify_cmd(verify_args, sabotage);
    } catch (const ValidationError& e) {
        spdlog::error("config error in field '{}': {}", e.field(), e.what());
        return kExitConfig;
    } catch (const std::exception& e) {
        spdlog::error("{}", e.what());
        return kExitConfig;
    }
    return kExitOk;
}
