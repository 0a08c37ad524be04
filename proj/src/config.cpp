#include "heatctrl/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "heatctrl/spectrum.hpp"

namespace heatctrl {

namespace {

using nlohmann::json;

class Reader {
public:
    Reader(const json& node, std::string path) : node_(node), path_(std::move(path)) {
        if (!node_.is_object()) throw ConfigError(path_.empty() ? "(root)" : path_, "must be an object");
    }

    std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
    bool has(const std::string& key) const {
        seen_.insert(key);
        return node_.contains(key);
    }
    const json& at(const std::string& key) const {
        seen_.insert(key);
        return node_.at(key);
    }

    double number(const std::string& key, double fallback) const {
        if (!has(key)) return fallback;
        const auto& v = at(key);
        if (!v.is_number()) throw ConfigError(field(key), "must be a number");
        return v.get<double>();
    }
    int integer(const std::string& key, int fallback) const {
        if (!has(key)) return fallback;
        const auto& v = at(key);
        if (!v.is_number_integer()) throw ConfigError(field(key), "must be an integer");
        return v.get<int>();
    }
    bool boolean(const std::string& key, bool fallback) const {
        if (!has(key)) return fallback;
        const auto& v = at(key);
        if (!v.is_boolean()) throw ConfigError(field(key), "must be true or false");
        return v.get<bool>();
    }
    std::string string(const std::string& key, const std::string& fallback) const {
        if (!has(key)) return fallback;
        const auto& v = at(key);
        if (!v.is_string()) throw ConfigError(field(key), "must be a string");
        return v.get<std::string>();
    }
    std::vector<double> numbers(const std::string& key) const {
        const auto& v = at(key);
        if (!v.is_array()) throw ConfigError(field(key), "must be an array of numbers");
        std::vector<double> out;
        for (const auto& e : v) {
            if (!e.is_number()) throw ConfigError(field(key), "must be an array of numbers");
            out.push_back(e.get<double>());
        }
        return out;
    }

    void reject_unknown() const {
        for (const auto& [key, value] : node_.items()) {
            if (!seen_.count(key)) throw ConfigError(field(key), "unknown key");
        }
    }

private:
    const json& node_;
    std::string path_;
    mutable std::set<std::string> seen_;
};

Profile parse_profile(const json& node, const std::string& path, double alpha) {
    if (node.is_number()) return Profile::constant(node.get<double>());
    const Reader r(node, path);
    const std::string type = r.string("type", "");
    Profile out;
    try {
        if (type == "constant") {
            out = Profile::constant(r.number("value", 0.0));
        } else if (type == "mode") {
            const int k = r.integer("k", 1);
            if (k < 1) throw ConfigError(r.field("k"), "mode index must be >= 1");
            const auto basis = compute_eigenvalues(alpha, k);
            out = Profile::mode(k, r.number("c", 1.0), basis.rhos.back());
        } else if (type == "polynomial") {
            if (!r.has("coeffs")) throw ConfigError(r.field("coeffs"), "required");
            out = Profile::polynomial(r.numbers("coeffs"));
        } else if (type == "table") {
            if (!r.has("x")) throw ConfigError(r.field("x"), "required");
            if (!r.has("values")) throw ConfigError(r.field("values"), "required");
            out = Profile::table(r.numbers("x"), r.numbers("values"));
        } else {
            throw ConfigError(r.field("type"), "must be constant, mode, polynomial or table");
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const DomainError& e) {
        throw ConfigError(path, e.what());
    }
    r.reject_unknown();
    return out;
}

void parse_problem(const json& node, RunConfig& cfg) {
    const Reader r(node, "problem");
    ProblemSpec& p = cfg.problem;
    p.horizon = r.number("T", p.horizon);
    p.alpha = r.number("alpha", p.alpha);
    p.nu = r.number("nu", p.nu);
    p.mu = r.number("mu", p.mu);
    p.lower = r.number("a", p.lower);
    p.upper = r.number("b", p.upper);
    p.modes = r.integer("modes", p.modes);
    p.cells = r.integer("grid_cells", p.cells);
    // Validate scalars first so a bad alpha is reported before profiles that need it.
    p.validate();
    if (!r.has("target")) throw ConfigError("problem.target", "required");
    p.target = parse_profile(r.at("target"), "problem.target", p.alpha);
    if (r.has("y0")) p.initial = parse_profile(r.at("y0"), "problem.y0", p.alpha);
    if (r.has("control_shape")) {
        const auto& shape = r.at("control_shape");
        if (shape.is_string() && shape.get<std::string>() == "boundary") {
            p.shape = ShapeKind::boundary;
        } else if (shape.is_object()) {
            const Reader s(shape, "problem.control_shape");
            if (s.string("type", "") != "distributed") {
                throw ConfigError("problem.control_shape.type", "must be distributed");
            }
            if (!s.has("profile")) throw ConfigError("problem.control_shape.profile", "required");
            p.shape = ShapeKind::distributed;
            p.shape_profile = parse_profile(s.at("profile"), "problem.control_shape.profile", p.alpha);
            s.reject_unknown();
        } else {
            throw ConfigError("problem.control_shape", "must be \"boundary\" or {\"type\": \"distributed\", ...}");
        }
    }
    r.reject_unknown();
}

void parse_solver(const json& node, RunConfig& cfg) {
    const Reader r(node, "solver");
    SolveOptions& s = cfg.solve;
    s.max_iters = r.integer("max_iters", s.max_iters);
    s.tol = r.number("tol", s.tol);
    s.acceleration = r.boolean("acceleration", s.acceleration);
    const std::string rule = r.string("step_rule", "fixed");
    if (rule == "fixed") s.step_rule = StepRule::fixed;
    else if (rule == "backtracking") s.step_rule = StepRule::backtracking;
    else throw ConfigError("solver.step_rule", "must be fixed or backtracking");
    if (s.max_iters < 1) throw ConfigError("solver.max_iters", "must be >= 1");
    if (!(s.tol > 0.0)) throw ConfigError("solver.tol", "must be > 0");
    r.reject_unknown();
}

void parse_verify(const json& node, RunConfig& cfg) {
    const Reader r(node, "verify");
    VerifyOptions& v = cfg.verify;
    v.grid.space_points = r.integer("space_points", v.grid.space_points);
    v.grid.time_steps = r.integer("time_steps", v.grid.time_steps);
    v.grid.smoothing_steps = r.integer("smoothing_steps", v.grid.smoothing_steps);
    v.grid.substeps = r.integer("substeps", v.grid.substeps);
    v.spectral_modes = r.integer("spectral_modes", v.spectral_modes);
    v.brute_force = r.boolean("brute_force", v.brute_force);
    v.fd.flip_robin_sign = r.boolean("sabotage_flip_robin", v.fd.flip_robin_sign);
    try {
        v.grid.validate();
    } catch (const DomainError& e) {
        throw ConfigError("verify", e.what());
    }
    r.reject_unknown();
}

}  // namespace

RunConfig parse_config(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError("(root)", std::string("invalid JSON: ") + e.what());
    }
    const Reader r(doc, "");
    RunConfig cfg;
    if (!r.has("schema_version")) throw ConfigError("schema_version", "required");
    if (r.integer("schema_version", 0) != kSchemaVersion) {
        throw ConfigError("schema_version", "unsupported (expected " + std::to_string(kSchemaVersion) + ")");
    }
    if (!r.has("problem")) throw ConfigError("problem", "required");
    parse_problem(r.at("problem"), cfg);
    if (r.has("solver")) parse_solver(r.at("solver"), cfg);
    if (r.has("switching")) {
        const Reader s(r.at("switching"), "switching");
        cfg.eps_fraction = s.number("eps", cfg.eps_fraction);
        if (!(cfg.eps_fraction > 0.0 && cfg.eps_fraction < 1.0)) throw ConfigError("switching.eps", "must lie in (0, 1)");
        s.reject_unknown();
    }
    if (r.has("verify")) parse_verify(r.at("verify"), cfg);
    if (r.has("sweep")) {
        const Reader s(r.at("sweep"), "sweep");
        if (s.has("nus")) cfg.nus = s.numbers("nus");
        cfg.workers = s.integer("workers", cfg.workers);
        if (cfg.workers < 1) throw ConfigError("sweep.workers", "must be >= 1");
        s.reject_unknown();
    }
    cfg.seed = r.integer("seed", cfg.seed);
    r.reject_unknown();
    cfg.verify.solve = cfg.solve;
    cfg.verify.eps_fraction = cfg.eps_fraction;
    cfg.verify.duality_seed = cfg.seed;
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("(file)", "cannot read " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

}  // namespace heatctrl
