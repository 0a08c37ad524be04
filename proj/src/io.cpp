#include "heatctrl/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "heatctrl/error.hpp"

namespace heatctrl::io {

using nlohmann::ordered_json;

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << content;
    if (!out) throw std::runtime_error("failed writing " + path);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string control_csv(const Control& control) {
    std::string out = "cell_index,t_mid,u\n";
    for (int k = 0; k < control.cells(); ++k) {
        out += std::to_string(k) + "," + format_double(control.cell_mid(k)) + "," + format_double(control.values[k]) +
               "\n";
    }
    return out;
}

std::vector<double> parse_control_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != "cell_index,t_mid,u") throw DomainError("control csv: bad header");
    std::vector<double> values;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto last = line.rfind(',');
        if (last == std::string::npos || std::count(line.begin(), line.end(), ',') != 2) throw DomainError("control csv: bad row '" + line + "'");
        double v = 0.0;
        const char* first = line.data() + last + 1;
        const char* end = line.data() + line.size();
        const auto res = std::from_chars(first, end, v);
        if (res.ec != std::errc() || res.ptr != end) throw DomainError("control csv: bad value '" + line + "'");
        values.push_back(v);
    }
    return values;
}

std::string trace_csv(std::span<const double> times, std::span<const double> values) {
    std::string out = "t,phi\n";
    for (std::size_t i = 0; i < times.size(); ++i) out += format_double(times[i]) + "," + format_double(values[i]) + "\n";
    return out;
}

std::string convergence_csv(const SolveResult& result) {
    std::string out = "iteration,objective,residual\n";
    for (std::size_t i = 0; i < result.residual_history.size(); ++i) {
        out += std::to_string(i + 1) + "," + format_double(result.objective_history[i]) + "," +
               format_double(result.residual_history[i]) + "\n";
    }
    return out;
}

SparsityCertificate sparsity_certificate(const Discretization& disc) {
    const auto zero = disc.zero_control();
    const auto avg = disc.cell_averages(disc.trace(zero.values));
    SparsityCertificate c;
    for (double v : avg) c.max_abs_phi_at_zero = std::max(c.max_abs_phi_at_zero, std::abs(v));
    c.mu = disc.problem().mu;
    c.zero_is_optimal = c.max_abs_phi_at_zero <= c.mu;
    return c;
}

namespace {

// NaN and infinities become null.
ordered_json number(double v) { return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr); }

std::string dump(const ordered_json& j) { return j.dump(2) + "\n"; }

}  // namespace

std::string objective_json(const SolveResult& result, const SparsityCertificate& certificate) {
    ordered_json j;
    j["tracking"] = result.objective.tracking;
    j["tikhonov"] = result.objective.tikhonov;
    j["sparse"] = result.objective.sparse;
    j["total"] = result.objective.total();
    j["converged"] = result.converged;
    j["iterations"] = result.iterations;
    j["residual"] = number(result.residual);
    j["variational_gap"] = number(result.variational_gap);
    j["step"] = result.step;
    j["operator_norm_sq"] = result.operator_norm_sq;
    j["sparsity_certificate"] = {{"max_abs_phi_avg_at_zero", certificate.max_abs_phi_at_zero},
                                 {"mu", certificate.mu},
                                 {"zero_is_optimal", certificate.zero_is_optimal}};
    return dump(j);
}

std::string switching_json(const SwitchingReport& report, const std::optional<StructureValidation>& validation) {
    ordered_json j;
    j["nu"] = report.nu;
    j["eps"] = report.eps;
    j["scan_end"] = report.scan_end;
    j["terminal_value"] = report.terminal_value ? number(*report.terminal_value) : ordered_json(nullptr);
    j["points"] = ordered_json::array();
    for (const auto& p : report.points) {
        j["points"].push_back({{"t", p.t},
                               {"equation", to_string(p.equation)},
                               {"sign_change", p.sign_change},
                               {"multiplicity", p.multiplicity}});
    }
    j["structure"] = ordered_json::array();
    for (const auto& s : report.structure) {
        j["structure"].push_back({{"start", s.start}, {"end", s.end}, {"level", to_string(s.level)}});
    }
    j["anomalies"] = ordered_json::array();
    for (const auto& a : report.anomalies) {
        j["anomalies"].push_back({{"kind", a.kind}, {"t", a.t}, {"detail", a.detail}});
    }
    if (validation) {
        const auto& v = *validation;
        j["validation"] = {{"passed", v.passed()},
                           {"levels_ok", v.levels_ok},
                           {"off_level_cells", v.off_level_cells},
                           {"adjacency_ok", v.adjacency_ok},
                           {"adjacency_cells", v.adjacency_cells},
                           {"terminal_checked", v.terminal_checked},
                           {"terminal_ok", v.terminal_ok},
                           {"accumulation_flagged", v.accumulation_flagged},
                           {"fraction_near_levels", v.fraction_near_levels},
                           {"fraction_bound", v.fraction_bound},
                           {"findings", v.findings}};
    }
    return dump(j);
}

std::string sweep_csv(const SweepResult& result) {
    std::string out =
        "nu,status,iterations,l1_control_error,l2_control_error,terminal_error,trace_sup_difference,"
        "switching_distance,unmatched\n";
    for (const auto& r : result.records) {
        out += format_double(r.nu) + "," + (r.ok ? "ok" : "failed") + "," + std::to_string(r.iterations) + "," +
               format_double(r.l1_control_error) + "," + format_double(r.l2_control_error) + "," +
               format_double(r.terminal_error) + "," + format_double(r.trace_sup_difference) + "," +
               format_double(r.switching_distance) + "," + std::to_string(r.unmatched) + "\n";
    }
    return out;
}

std::string sweep_json(const SweepResult& result) {
    ordered_json j;
    j["reference"] = {{"objective", result.reference.objective.total()},
                      {"iterations", result.reference.iterations},
                      {"residual", result.reference.residual},
                      {"terminal_trace", result.reference_terminal_trace},
                      {"terminal_margin", result.reference_terminal_margin}};
    ordered_json roots = ordered_json::array();
    for (const auto& p : result.reference_report.points) {
        roots.push_back({{"t", p.t}, {"equation", to_string(p.equation)}, {"multiplicity", p.multiplicity}});
    }
    j["reference"]["roots"] = roots;
    j["tau"] = result.tau;
    j["max_multiplicity"] = result.max_multiplicity;
    const int n = std::max(result.max_multiplicity, 1);
    j["expected_rates"] = {{"switching_distance", 1.0 / (2.0 * n)}, {"l1_control_error", 1.0 / n}};
    j["slopes"] = ordered_json::object();
    for (const auto& s : result.slopes) {
        j["slopes"][s.series] = {{"slope", number(s.slope)}, {"valid", s.valid}, {"window", s.nus}};
    }
    j["failed"] = ordered_json::array();
    for (const auto& r : result.records) {
        if (!r.ok) j["failed"].push_back({{"nu", r.nu}, {"reason", r.failure}});
    }
    return dump(j);
}

std::string verify_json(const VerifyReport& report) {
    ordered_json j;
    j["passed"] = report.passed();
    j["checks"] = ordered_json::array();
    for (const auto& c : report.checks) {
        ordered_json e;
        e["name"] = c.name;
        e["status"] = c.skipped ? "skipped" : c.passed ? "pass" : "fail";
        e["measured"] = number(c.measured);
        e["tolerance"] = number(c.tolerance);
        e["detail"] = c.detail;
        j["checks"].push_back(e);
    }
    return dump(j);
}

}  // namespace heatctrl::io
