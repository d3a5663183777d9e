#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "geospread/compare.hpp"
#include "geospread/geodesic.hpp"

namespace geospread {

enum class ExperimentKind {
    trajectory,
    tangent_lyapunov,
    jacobi_lyapunov,
    relation_check,
    floquet_oracle,
    spectrum
};

/// Fully validated description of one experiment.
struct ExperimentSpec {
    ExperimentKind kind = ExperimentKind::trajectory;
    SystemSpec system;
    PhaseState initial;
    RunConfig run;
    std::optional<Direction> direction;
    ArcKind arc = ArcKind::jacobi;
    FdScheme scheme = FdScheme::central;
    VariationalKind variational = VariationalKind::jacobi;
    double period = 0.0;
    Window window = Window::none;
    Integrator integrator = Integrator::verlet;
    std::map<std::string, double> thresholds;
    std::filesystem::path output_dir = "out";
    bool emit_svg = false;
};

namespace detail {

using json = nlohmann::json;

inline std::size_t line_of_byte(const std::string& text, std::size_t byte) {
    std::size_t line = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i)
        if (text[i] == '\n') ++line;
    return line;
}

inline void check_keys(const json& obj, std::initializer_list<const char*> allowed,
                       const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool ok = false;
        for (const char* key : allowed)
            if (it.key() == key) {
                ok = true;
                break;
            }
        if (!ok) throw ConfigError("unknown key '" + it.key() + "' in " + where);
    }
}

inline const json& require(const json& obj, const char* key, const std::string& where) {
    auto it = obj.find(key);
    if (it == obj.end()) throw ConfigError("missing required field '" + where + "." + key + "'");
    return *it;
}

inline double as_number(const json& j, const std::string& field) {
    if (!j.is_number()) throw ConfigError("field '" + field + "' must be a number");
    return j.get<double>();
}

inline double number_or(const json& obj, const char* key, const std::string& where,
                        double fallback) {
    auto it = obj.find(key);
    return it == obj.end() ? fallback : as_number(*it, where + "." + key);
}

inline std::size_t index_or(const json& obj, const char* key, const std::string& where,
                            std::size_t fallback) {
    auto it = obj.find(key);
    if (it == obj.end()) return fallback;
    if (!it->is_number_integer() || it->get<long long>() < 0)
        throw ConfigError("field '" + where + "." + key + "' must be a non-negative integer");
    return it->get<std::size_t>();
}

inline std::string string_or(const json& obj, const char* key, const std::string& where,
                             const std::string& fallback) {
    auto it = obj.find(key);
    if (it == obj.end()) return fallback;
    if (!it->is_string()) throw ConfigError("field '" + where + "." + key + "' must be a string");
    return it->get<std::string>();
}

inline Vec as_vector(const json& j, const std::string& field) {
    if (!j.is_array()) throw ConfigError("field '" + field + "' must be an array of numbers");
    Vec v;
    for (const auto& e : j) v.push_back(as_number(e, field));
    return v;
}

inline SystemSpec parse_system(const json& j) {
    if (!j.is_object()) throw ConfigError("field 'system' must be an object");
    check_keys(j, {"potential", "omegas", "curvature", "n_dof", "k2", "k4", "masses"}, "system");
    const std::string pot = require(j, "potential", "system").get<std::string>();
    SystemSpec spec;
    if (pot == "harmonic") {
        check_keys(j, {"potential", "omegas", "masses"}, "system (harmonic)");
        Vec omegas = as_vector(require(j, "omegas", "system"), "system.omegas");
        spec.n_dof = omegas.size();
        spec.potential = Harmonic{std::move(omegas)};
    } else if (pot == "quadratic") {
        check_keys(j, {"potential", "curvature", "n_dof", "masses"}, "system (quadratic)");
        auto n = index_or(j, "n_dof", "system", 0);
        if (n == 0) throw ConfigError("system.n_dof is required for the quadratic potential");
        spec.n_dof = n;
        spec.potential = Quadratic{number_or(j, "curvature", "system", 0.0)};
    } else if (pot == "anharmonic_chain") {
        check_keys(j, {"potential", "n_dof", "k2", "k4", "masses"}, "system (anharmonic_chain)");
        auto n = index_or(j, "n_dof", "system", 0);
        if (n == 0) throw ConfigError("system.n_dof is required for the anharmonic chain");
        spec.n_dof = n;
        spec.potential = AnharmonicChain{number_or(j, "k2", "system", 1.0),
                                         number_or(j, "k4", "system", 0.0)};
    } else if (pot == "henon_heiles") {
        check_keys(j, {"potential", "n_dof", "masses"}, "system (henon_heiles)");
        const auto n = index_or(j, "n_dof", "system", 2);
        if (n != 2) throw ConfigError("system.n_dof must be 2 for henon_heiles");
        spec.n_dof = 2;
        spec.potential = HenonHeiles{};
    } else {
        throw ConfigError("system.potential must be one of harmonic, quadratic, "
                          "anharmonic_chain, henon_heiles");
    }
    auto it = j.find("masses");
    spec.masses = it == j.end() ? Vec(spec.n_dof, 1.0) : as_vector(*it, "system.masses");
    spec.validate();
    return spec;
}

inline PhaseState parse_initial(const json& j, const SystemSpec& system) {
    if (!j.is_object()) throw ConfigError("field 'initial' must be an object");
    check_keys(j, {"q", "p", "t"}, "initial");
    PhaseState state;
    state.q = as_vector(require(j, "q", "initial"), "initial.q");
    state.p = as_vector(require(j, "p", "initial"), "initial.p");
    state.t = number_or(j, "t", "initial", 0.0);
    if (state.q.size() != system.n_dof || state.p.size() != system.n_dof)
        throw ConfigError("initial.q and initial.p must have length n_dof = " +
                          std::to_string(system.n_dof));
    if (!all_finite(state.q) || !all_finite(state.p))
        throw ConfigError("initial state must be finite");
    return state;
}

inline RunConfig parse_run(const json* j) {
    RunConfig run;
    if (!j) return run;
    if (!j->is_object()) throw ConfigError("field 'run' must be an object");
    check_keys(*j,
               {"dt", "t_max", "record_stride", "renorm_interval", "dtau", "t_min_guard",
                "kappa", "norm", "seed", "energy_tol"},
               "run");
    run.dt = number_or(*j, "dt", "run", run.dt);
    run.t_max = number_or(*j, "t_max", "run", run.t_max);
    run.record_stride = index_or(*j, "record_stride", "run", run.record_stride);
    run.renorm_interval = index_or(*j, "renorm_interval", "run", run.renorm_interval);
    run.dtau = number_or(*j, "dtau", "run", run.dtau);
    if (j->contains("t_min_guard")) run.t_min_guard = as_number((*j)["t_min_guard"], "run.t_min_guard");
    run.kappa = number_or(*j, "kappa", "run", run.kappa);
    const std::string norm = string_or(*j, "norm", "run", "euclidean");
    if (norm == "euclidean") run.norm = NormKind::euclidean;
    else if (norm == "metric") run.norm = NormKind::metric;
    else throw ConfigError("run.norm must be 'euclidean' or 'metric'");
    if (j->contains("seed")) {
        const auto& s = (*j)["seed"];
        if (!s.is_number_integer()) throw ConfigError("run.seed must be an integer");
        run.seed = s.get<std::uint64_t>();
    }
    run.energy_tol = number_or(*j, "energy_tol", "run", run.energy_tol);
    run.validate();
    return run;
}

inline Direction parse_direction(const json& j, const SystemSpec& system) {
    if (!j.is_object()) throw ConfigError("field 'direction' must be an object");
    check_keys(j, {"dq", "dp"}, "direction");
    Direction dir;
    dir.dq = as_vector(require(j, "dq", "direction"), "direction.dq");
    dir.dp = as_vector(require(j, "dp", "direction"), "direction.dp");
    if (dir.dq.size() != system.n_dof || dir.dp.size() != system.n_dof)
        throw ConfigError("direction.dq and direction.dp must have length n_dof");
    const double r = norm2_pair(dir.dq, dir.dp);
    if (!(r > 0.0) || !std::isfinite(r))
        throw ConfigError("direction must be a nonzero finite vector");
    // fixed convention: unit Euclidean norm in (q, p) space
    scale(dir.dq, 1.0 / r);
    scale(dir.dp, 1.0 / r);
    return dir;
}

} // namespace detail

inline ExperimentKind experiment_kind_from_string(const std::string& s) {
    if (s == "trajectory") return ExperimentKind::trajectory;
    if (s == "tangent_lyapunov") return ExperimentKind::tangent_lyapunov;
    if (s == "jacobi_lyapunov") return ExperimentKind::jacobi_lyapunov;
    if (s == "relation_check") return ExperimentKind::relation_check;
    if (s == "floquet_oracle") return ExperimentKind::floquet_oracle;
    if (s == "spectrum") return ExperimentKind::spectrum;
    throw ConfigError("kind must be one of trajectory, tangent_lyapunov, jacobi_lyapunov, "
                      "relation_check, floquet_oracle, spectrum");
}

inline const char* to_string(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::trajectory: return "trajectory";
        case ExperimentKind::tangent_lyapunov: return "tangent_lyapunov";
        case ExperimentKind::jacobi_lyapunov: return "jacobi_lyapunov";
        case ExperimentKind::relation_check: return "relation_check";
        case ExperimentKind::floquet_oracle: return "floquet_oracle";
        case ExperimentKind::spectrum: return "spectrum";
    }
    return "?";
}

/// Parse and validate a JSON experiment document. Unknown keys anywhere are
/// rejected. The GEOSPREAD_SEED environment variable, when set, overrides
/// the configured seed.
inline ExperimentSpec parse_config(const std::string& text) {
    detail::json doc;
    try {
        doc = detail::json::parse(text);
    } catch (const detail::json::parse_error& e) {
        throw ConfigError("parse error at line " +
                          std::to_string(detail::line_of_byte(text, e.byte)) + ": " + e.what());
    }
    if (!doc.is_object()) throw ConfigError("config document must be a JSON object");
    detail::check_keys(doc,
                       {"kind", "system", "initial", "run", "direction", "arc", "scheme",
                        "variational", "period", "window", "integrator", "thresholds",
                        "output_dir", "emit_svg"},
                       "config");

    ExperimentSpec spec;
    spec.kind = experiment_kind_from_string(
        detail::require(doc, "kind", "config").get<std::string>());
    spec.system = detail::parse_system(detail::require(doc, "system", "config"));
    spec.initial = detail::parse_initial(detail::require(doc, "initial", "config"), spec.system);
    spec.run = detail::parse_run(doc.contains("run") ? &doc["run"] : nullptr);

    if (doc.contains("direction"))
        spec.direction = detail::parse_direction(doc["direction"], spec.system);

    const std::string arc = detail::string_or(doc, "arc", "config", "jacobi");
    if (arc == "jacobi") spec.arc = ArcKind::jacobi;
    else if (arc == "eisenhart") spec.arc = ArcKind::eisenhart;
    else throw ConfigError("arc must be 'jacobi' or 'eisenhart'");

    const std::string scheme = detail::string_or(doc, "scheme", "config", "central");
    if (scheme == "central") spec.scheme = FdScheme::central;
    else if (scheme == "forward") spec.scheme = FdScheme::forward;
    else throw ConfigError("scheme must be 'central' or 'forward'");

    const std::string var = detail::string_or(doc, "variational", "config", "jacobi");
    if (var == "tangent") spec.variational = VariationalKind::tangent;
    else if (var == "jacobi") spec.variational = VariationalKind::jacobi;
    else throw ConfigError("variational must be 'tangent' or 'jacobi'");

    spec.period = detail::number_or(doc, "period", "config", 0.0);

    const std::string window = detail::string_or(doc, "window", "config", "none");
    if (window == "none") spec.window = Window::none;
    else if (window == "hann") spec.window = Window::hann;
    else throw ConfigError("window must be 'none' or 'hann'");

    const std::string integ = detail::string_or(doc, "integrator", "config", "verlet");
    if (integ == "verlet") spec.integrator = Integrator::verlet;
    else if (integ == "rk4") spec.integrator = Integrator::rk4;
    else throw ConfigError("integrator must be 'verlet' or 'rk4'");

    if (doc.contains("thresholds")) {
        const auto& th = doc["thresholds"];
        if (!th.is_object()) throw ConfigError("field 'thresholds' must be an object");
        for (auto it = th.begin(); it != th.end(); ++it) {
            const std::string& key = it.key();
            const bool is_max = key.size() > 4 && key.rfind("_max") == key.size() - 4;
            const bool is_min = key.size() > 4 && key.rfind("_min") == key.size() - 4;
            if (!is_max && !is_min)
                throw ConfigError("threshold key '" + key + "' must end in _max or _min");
            spec.thresholds[key] = detail::as_number(*it, "thresholds." + key);
        }
    }

    spec.output_dir = detail::string_or(doc, "output_dir", "config", "out");
    if (doc.contains("emit_svg")) {
        if (!doc["emit_svg"].is_boolean()) throw ConfigError("emit_svg must be a boolean");
        spec.emit_svg = doc["emit_svg"].get<bool>();
    }

    // kind-specific validation, before any integration starts
    if (spec.kind == ExperimentKind::relation_check && !spec.direction)
        throw ConfigError("relation_check requires a 'direction'");
    if (spec.kind == ExperimentKind::floquet_oracle && !(spec.period > 0.0))
        throw ConfigError("floquet_oracle requires a positive 'period'");

    if (const char* env_seed = std::getenv("GEOSPREAD_SEED")) {
        try {
            spec.run.seed = std::stoull(env_seed);
        } catch (const std::exception&) {
            throw ConfigError("GEOSPREAD_SEED must be an unsigned integer");
        }
    }
    return spec;
}

inline ExperimentSpec parse_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file: " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

} // namespace geospread
