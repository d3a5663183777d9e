#pragma once

#include <filesystem>
#include <fstream>
#include <string>

#include "geospread/config.hpp"
#include "geospread/csv.hpp"
#include "geospread/svg.hpp"

namespace geospread {

struct ExperimentArtifacts {
    nlohmann::json summary;
    bool thresholds_pass = true;
    bool singular = false;
};

namespace detail {

inline void preflight_output_dir(const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
    const auto probe = dir / ".write_probe";
    {
        std::ofstream out(probe);
        if (!out) throw IoError("output directory is not writable: " + dir.string());
    }
    std::filesystem::remove(probe, ec);
}

inline CsvTable trajectory_table(const SystemSpec& spec, const TrajectoryRecord& record) {
    CsvTable table;
    table.columns.push_back("t");
    for (std::size_t i = 1; i <= spec.n_dof; ++i) table.columns.push_back("q_" + std::to_string(i));
    for (std::size_t i = 1; i <= spec.n_dof; ++i) table.columns.push_back("p_" + std::to_string(i));
    for (const char* c : {"T", "V", "E", "s_jacobi", "q_extra"}) table.columns.push_back(c);
    for (const auto& s : record.samples) {
        Vec row;
        row.push_back(s.state.t);
        for (double v : s.state.q) row.push_back(v);
        for (double v : s.state.p) row.push_back(v);
        row.push_back(s.kinetic);
        row.push_back(s.potential);
        row.push_back(s.energy);
        row.push_back(s.arc.s_jacobi);
        row.push_back(s.arc.q_extra);
        table.rows.push_back(std::move(row));
    }
    return table;
}

inline CsvTable exponent_table(const LyapunovSeries& series, bool with_guard_columns) {
    CsvTable table;
    table.columns = {"t", "s_jacobi", "lambda_t", "lambda_s", "renorm_count"};
    if (with_guard_columns) {
        table.columns.push_back("t_guard_hits");
        table.columns.push_back("singular_flag");
    }
    for (const auto& s : series.samples) {
        Vec row{s.t, s.s_jacobi, s.lambda_t, s.lambda_s, static_cast<double>(s.renorm_count)};
        if (with_guard_columns) {
            row.push_back(static_cast<double>(series.t_guard_hits));
            row.push_back(series.singular ? 1.0 : 0.0);
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

inline CsvTable comparison_table(const SpreadComparison& cmp) {
    CsvTable table;
    table.columns = {"t",       "s_jacobi",        "residual",  "ds_dtau",
                     "correction_norm", "xi_t_norm", "xi_g_fd_norm"};
    for (std::size_t k = 0; k < cmp.times.size(); ++k)
        table.rows.push_back({cmp.times[k], cmp.s_jacobi[k], cmp.residuals[k], cmp.ds_dtau[k],
                              cmp.correction_norm[k], cmp.xi_t_norm[k], cmp.xi_g_fd_norm[k]});
    return table;
}

inline CsvTable spectrum_table(const SpectrumReport& report) {
    CsvTable table;
    table.columns = {"angular_frequency", "amplitude"};
    for (std::size_t k = 0; k < report.frequencies.size(); ++k)
        table.rows.push_back({report.frequencies[k], report.amplitudes[k]});
    return table;
}

inline void apply_thresholds(const ExperimentSpec& spec, ExperimentArtifacts& art) {
    nlohmann::json results = nlohmann::json::object();
    bool pass = true;
    const auto& metrics = art.summary["metrics"];
    for (const auto& [key, bound] : spec.thresholds) {
        const bool is_max = key.rfind("_max") == key.size() - 4;
        const std::string metric = key.substr(0, key.size() - 4);
        if (!metrics.contains(metric))
            throw ConfigError("threshold '" + key + "' names unknown metric '" + metric + "'");
        const double value = metrics[metric].get<double>();
        const bool ok = is_max ? value <= bound : value >= bound;
        results[key] = {{"bound", bound}, {"value", value}, {"pass", ok}};
        pass = pass && ok;
    }
    art.summary["threshold_results"] = results;
    art.summary["pass"] = pass;
    art.thresholds_pass = pass;
}

} // namespace detail

/// Run one experiment: writes the kind's CSV artifacts plus summary.json
/// into output_dir, evaluates declared thresholds, and returns the summary.
/// Deterministic given the experiment description and seed.
inline ExperimentArtifacts run_experiment(const ExperimentSpec& spec) {
    detail::preflight_output_dir(spec.output_dir);

    ExperimentArtifacts art;
    art.summary["kind"] = to_string(spec.kind);
    art.summary["seed"] = spec.run.seed;
    art.summary["norm"] = spec.run.norm == NormKind::euclidean ? "euclidean" : "metric";
    art.summary["metrics"] = nlohmann::json::object();
    auto& metrics = art.summary["metrics"];
    if (spec.direction) {
        art.summary["direction"] = {{"dq", spec.direction->dq}, {"dp", spec.direction->dp}};
    }

    std::filesystem::path csv_path;
    std::string svg_x;
    std::vector<std::string> svg_y;

    switch (spec.kind) {
        case ExperimentKind::trajectory: {
            TrajectoryRecord rec = run_trajectory(spec.system, spec.initial, spec.run,
                                                  spec.integrator);
            csv_path = spec.output_dir / "trajectory.csv";
            write_csv(csv_path, detail::trajectory_table(spec.system, rec));
            const auto& last = rec.samples.back();
            metrics["final_t"] = last.state.t;
            metrics["final_energy"] = last.energy;
            metrics["s_jacobi_final"] = last.arc.s_jacobi;
            metrics["max_energy_deviation"] = rec.max_energy_deviation;
            metrics["secular_energy_drift"] = rec.secular_energy_drift;
            metrics["energy_warning"] = rec.energy_warning ? 1.0 : 0.0;
            metrics["affine_max_deviation"] = eisenhart_affine_check(rec, spec.run.kappa);
            svg_x = "t";
            svg_y = {"E"};
            break;
        }
        case ExperimentKind::tangent_lyapunov: {
            const TangentState ts0 = seeded_unit_tangent(spec.system.n_dof, spec.run.seed);
            LyapunovSeries series = benettin_exponent(spec.system, spec.initial, ts0, spec.run);
            csv_path = spec.output_dir / "exponents.csv";
            write_csv(csv_path, detail::exponent_table(series, false));
            if (series.samples.empty())
                throw ConfigError("tangent_lyapunov: t_max too small, no samples recorded");
            metrics["lambda_t_final"] = series.back().lambda_t;
            metrics["lambda_s_final"] = series.back().lambda_s;
            metrics["final_t"] = series.back().t;
            metrics["renorm_count"] = static_cast<double>(series.back().renorm_count);
            svg_x = "t";
            svg_y = {"lambda_t", "lambda_s"};
            break;
        }
        case ExperimentKind::jacobi_lyapunov: {
            const TangentState seed_vec = seeded_unit_tangent(spec.system.n_dof, spec.run.seed);
            JacobiVariationalState jv0;
            jv0.xi = seed_vec.xi;
            jv0.xi_dot = seed_vec.xi_dot;
            LyapunovSeries series = jacobi_exponent(spec.system, spec.initial, jv0, spec.run);
            csv_path = spec.output_dir / "exponents.csv";
            write_csv(csv_path, detail::exponent_table(series, true));
            if (series.samples.empty()) {
                metrics["lambda_t_final"] = 0.0;
                metrics["lambda_s_final"] = 0.0;
                metrics["final_t"] = spec.initial.t;
            } else {
                metrics["lambda_t_final"] = series.back().lambda_t;
                metrics["lambda_s_final"] = series.back().lambda_s;
                metrics["final_t"] = series.back().t;
            }
            metrics["singular_flag"] = series.singular ? 1.0 : 0.0;
            metrics["t_guard_hits"] = static_cast<double>(series.t_guard_hits);
            if (series.singular) metrics["t_singular"] = series.t_singular;
            art.singular = series.singular;
            svg_x = "t";
            svg_y = {"lambda_t", "lambda_s"};
            break;
        }
        case ExperimentKind::relation_check: {
            SpreadComparison cmp = relation_residual(spec.system, spec.initial, *spec.direction,
                                                     spec.run, spec.arc, spec.scheme);
            csv_path = spec.output_dir / "comparison.csv";
            write_csv(csv_path, detail::comparison_table(cmp));
            metrics["max_residual"] = cmp.max_residual();
            metrics["control_residual"] = cmp.max_control_residual();
            metrics["final_ds_dtau"] = cmp.ds_dtau.empty() ? 0.0 : cmp.ds_dtau.back();
            metrics["n_samples"] = static_cast<double>(cmp.times.size());
            svg_x = "t";
            svg_y = {"residual"};
            break;
        }
        case ExperimentKind::floquet_oracle: {
            FloquetResult result = floquet_oracle(spec.system, spec.initial, spec.period,
                                                  spec.run, spec.variational);
            metrics["max_exponent"] = result.exponents.front();
            metrics["min_exponent"] = result.exponents.back();
            metrics["periodicity_defect"] = result.periodicity_defect;
            art.summary["exponents"] = result.exponents;
            break;
        }
        case ExperimentKind::spectrum: {
            TrajectoryRecord rec = run_trajectory(spec.system, spec.initial, spec.run,
                                                  spec.integrator);
            Vec signal;
            signal.reserve(rec.samples.size());
            for (const auto& s : rec.samples) signal.push_back(s.kinetic);
            const double sample_dt = spec.run.dt * static_cast<double>(spec.run.record_stride);
            SpectrumReport report = spectrum_peak(signal, sample_dt, spec.window);
            csv_path = spec.output_dir / "spectrum.csv";
            write_csv(csv_path, detail::spectrum_table(report));
            metrics["peak_frequency"] = report.peak_frequency;
            metrics["dc_only"] = report.dc_only ? 1.0 : 0.0;
            metrics["n_samples"] = static_cast<double>(signal.size());
            svg_x = "angular_frequency";
            svg_y = {"amplitude"};
            break;
        }
    }

    detail::apply_thresholds(spec, art);
    art.summary["singular_flag"] = art.singular ? 1 : 0;

    if (spec.emit_svg && !csv_path.empty()) {
        const auto svg_path = csv_path.parent_path() / (csv_path.stem().string() + ".svg");
        emit_svg(csv_path, svg_x, svg_y, svg_path);
        art.summary["svg"] = svg_path.string();
    }

    std::ofstream out(spec.output_dir / "summary.json");
    if (!out) throw IoError("cannot write summary.json in " + spec.output_dir.string());
    out << art.summary.dump(2) << "\n";
    return art;
}

} // namespace geospread
