#pragma once

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "geospread/compare.hpp"
#include "geospread/geodesic.hpp"

namespace geospread {

struct CriterionResult {
    std::string id;
    std::string title;
    bool pass = false;
    std::string details;
    double seconds = 0.0;
};

struct AcceptanceCriterion {
    std::string id;
    std::string title;
    std::function<void(CriterionResult&)> run;
};

namespace detail {

inline std::string fmt_num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

/// Accumulates named sub-assertions into a pass flag and a details string.
struct Checks {
    bool ok = true;
    std::string text;

    void note(const std::string& name, double value) {
        append(name + "=" + fmt_num(value));
    }
    void le(const std::string& name, double value, double bound) {
        const bool good = value <= bound;
        append(name + "=" + fmt_num(value) + (good ? " <= " : " !<= ") + fmt_num(bound));
        ok = ok && good;
    }
    void lt(const std::string& name, double value, double bound) {
        const bool good = value < bound;
        append(name + "=" + fmt_num(value) + (good ? " < " : " !< ") + fmt_num(bound));
        ok = ok && good;
    }
    void gt(const std::string& name, double value, double bound) {
        const bool good = value > bound;
        append(name + "=" + fmt_num(value) + (good ? " > " : " !> ") + fmt_num(bound));
        ok = ok && good;
    }
    void in_range(const std::string& name, double value, double lo, double hi) {
        const bool good = value >= lo && value <= hi;
        append(name + "=" + fmt_num(value) + (good ? " in [" : " !in [") + fmt_num(lo) + ", " +
               fmt_num(hi) + "]");
        ok = ok && good;
    }
    void truthy(const std::string& name, bool value) {
        append(name + "=" + (value ? "yes" : "no"));
        ok = ok && value;
    }

private:
    void append(const std::string& s) {
        if (!text.empty()) text += "; ";
        text += s;
    }
};

inline PhaseState henon_state_at_energy(const SystemSpec& spec, double q1, double q2,
                                        double p2, double energy) {
    Vec q{q1, q2};
    const double v = potential_value(spec, q);
    const double p1sq = 2.0 * (energy - v) - p2 * p2;
    if (!(p1sq > 0.0)) throw ConfigError("henon_state_at_energy: energy too low for this point");
    return PhaseState{0.0, std::move(q), Vec{std::sqrt(p1sq), p2}};
}

inline double window_max_lambda(const LyapunovSeries& series, double t_lo, double t_hi) {
    double m = -std::numeric_limits<double>::infinity();
    for (const auto& s : series.samples)
        if (s.t >= t_lo && s.t <= t_hi) m = std::max(m, s.lambda_t);
    return m;
}

} // namespace detail

inline std::vector<AcceptanceCriterion> acceptance_suite() {
    using detail::Checks;
    const double pi = std::numbers::pi;
    std::vector<AcceptanceCriterion> suite;

    suite.push_back({"A1", "Eisenhart affineness on a Henon-Heiles run", [pi](CriterionResult& r) {
        auto spec = make_henon_heiles();
        PhaseState init = detail::henon_state_at_energy(spec, 0.0, 0.1, 0.0, 1.0 / 12.0);
        RunConfig cfg;
        cfg.dt = 1e-3;
        cfg.t_max = 100.0;
        cfg.record_stride = 10;
        TrajectoryRecord rec = run_trajectory(spec, init, cfg, Integrator::verlet);
        Checks c;
        c.lt("max_affine_deviation", eisenhart_affine_check(rec, cfg.kappa), 1e-8);
        r.pass = c.ok;
        r.details = c.text;
    }});

    suite.push_back({"A2", "Stable system, tangent dynamics vanishing exponent",
                     [](CriterionResult& r) {
        auto spec = make_harmonic({1.0, std::sqrt(2.0)});
        PhaseState init{0.0, {1.0, 0.0}, {0.0, 1.0}};
        RunConfig cfg;
        cfg.dt = 1e-3;
        cfg.t_max = 1e4;
        cfg.record_stride = 100;
        cfg.renorm_interval = 100;
        auto ts = seeded_unit_tangent(2, cfg.seed);
        LyapunovSeries series = benettin_exponent(spec, init, ts, cfg);
        const double early = detail::window_max_lambda(series, 1e3, 2e3);
        const double late = detail::window_max_lambda(series, 9e3, 1e4);
        Checks c;
        c.lt("lambda_T_final", series.back().lambda_t, 1e-2);
        c.lt("max_lambda[9e3,1e4]", late, early);
        c.note("max_lambda[1e3,2e3]", early);
        r.pass = c.ok;
        r.details = c.text;
    }});

    suite.push_back({"A3", "Jacobi measure positive on the same stable orbit",
                     [pi](CriterionResult& r) {
        Checks c;
        // tangent reference on the identical orbit
        auto spec = make_harmonic({1.0, std::sqrt(2.0)});
        PhaseState init{0.0, {1.0, 0.0}, {0.0, 1.0}};
        RunConfig tangent_cfg;
        tangent_cfg.dt = 1e-3;
        tangent_cfg.t_max = 2e3;
        tangent_cfg.record_stride = 1000;
        tangent_cfg.renorm_interval = 100;
        auto ts = seeded_unit_tangent(2, tangent_cfg.seed);
        LyapunovSeries tangent_series = benettin_exponent(spec, init, ts, tangent_cfg);
        const double lambda_tangent = tangent_series.back().lambda_t;

        // Jacobi flow on the same orbit. The orbit passes within 3e-7 of a
        // turning coincidence near t = 204 pi, so the step must resolve the
        // transit and the guard sits below it.
        RunConfig jacobi_cfg;
        jacobi_cfg.dt = 1e-4;
        jacobi_cfg.t_max = 2e3;
        jacobi_cfg.record_stride = 10000;
        jacobi_cfg.renorm_interval = 100;
        jacobi_cfg.t_min_guard = 1e-9 * total_energy(spec, init);
        JacobiVariationalState jv0{ts.xi, ts.xi_dot, 0, 0, 0};
        LyapunovSeries jacobi_series = jacobi_exponent(spec, init, jv0, jacobi_cfg);

        c.truthy("jacobi_run_completed", !jacobi_series.singular);
        const double lambda_jacobi = jacobi_series.back().lambda_t;
        c.note("lambda_T(2e3)", lambda_tangent);
        c.gt("lambda_J_per_t(2e3)", lambda_jacobi, 10.0 * lambda_tangent);
        c.gt("lambda_J_per_s(2e3)", jacobi_series.back().lambda_s, 0.0);

        // commensurate variant: oracle reference value vs the long-run
        // estimate of the same discretized flow
        auto spec_c = make_harmonic({1.0, 2.0});
        PhaseState init_c{0.0, {1.0, 1.2}, {0.0, 0.3}};
        RunConfig floq_cfg;
        floq_cfg.dt = 2.5e-4;
        FloquetResult floq = floquet_oracle(spec_c, init_c, 2.0 * pi, floq_cfg,
                                            VariationalKind::jacobi);
        c.gt("floquet_max_exponent", floq.exponents.front(), 0.0);

        RunConfig long_cfg;
        long_cfg.dt = 2.5e-4;
        long_cfg.t_max = 4e3;
        long_cfg.record_stride = 400000;
        long_cfg.renorm_interval = 400;
        LyapunovSeries long_series = jacobi_exponent(spec_c, init_c, jv0, long_cfg);
        c.truthy("commensurate_run_completed", !long_series.singular);
        const double lambda_long = long_series.back().lambda_t;
        const double agreement =
            std::abs(lambda_long - floq.exponents.front()) / std::abs(floq.exponents.front());
        c.note("lambda_J_commensurate", lambda_long);
        c.le("floquet_agreement", agreement, 0.25);
        r.pass = c.ok;
        r.details = c.text;
    }});

    suite.push_back({"A4", "Spread identity residual converges", [](CriterionResult& r) {
        auto spec = make_harmonic({1.0, 2.0});
        PhaseState init{0.0, {1.0, 0.0}, {0.0, 1.0}};
        // energy-changing direction exciting both modes, so the per-time
        // normalization |xi_T(t)| stays bounded away from zero
        const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
        Direction dir{{inv_sqrt2, inv_sqrt2}, {0.0, 0.0}};
        RunConfig cfg;
        cfg.dt = 1e-3;
        cfg.t_max = 50.0;
        cfg.record_stride = 1;
        Checks c;
        cfg.dtau = 1e-5;
        SpreadComparison coarse = relation_residual(spec, init, dir, cfg, ArcKind::jacobi,
                                                    FdScheme::central);
        c.lt("max_residual(dtau=1e-5)", coarse.max_residual(), 1e-2);
        cfg.dtau = 1e-6;
        SpreadComparison fine = relation_residual(spec, init, dir, cfg, ArcKind::jacobi,
                                                  FdScheme::central);
        c.lt("max_residual(dtau=1e-6)", fine.max_residual(), 1e-3);
        c.gt("negative_control_residual", fine.max_control_residual(), 0.1);
        r.pass = c.ok;
        r.details = c.text;
    }});

    suite.push_back({"A5", "Kinetic energy oscillates at twice the frequency",
                     [](CriterionResult& r) {
        auto spec = make_harmonic({1.0});
        PhaseState init{0.0, {1.0}, {0.0}};
        RunConfig cfg;
        cfg.dt = 1e-2;
        cfg.record_stride = 1;
        cfg.t_max = 163.83; // 16383 steps: 16384 samples including t = 0
        TrajectoryRecord rec = run_trajectory(spec, init, cfg, Integrator::verlet);
        Vec signal;
        for (const auto& s : rec.samples) signal.push_back(s.kinetic);
        SpectrumReport report = spectrum_peak(signal, cfg.dt, Window::none);
        const double bin = report.frequencies[1];
        Checks c;
        c.note("n_samples", static_cast<double>(signal.size()));
        c.truthy("has_positive_peak", !report.dc_only);
        c.le("peak_frequency_error", std::abs(report.peak_frequency - 2.0), bin);
        r.pass = c.ok;
        r.details = c.text;
    }});

    suite.push_back({"A6", "Eisenhart JLC spatial components equal tangent dynamics",
                     [](CriterionResult& r) {
        auto spec = make_henon_heiles();
        std::mt19937_64 gen(20240601);
        auto u = [&]() { return -0.5 + (gen() >> 11) * 0x1.0p-53; };
        double max_diff = 0.0, max_mag = 0.0;
        for (int trial = 0; trial < 100; ++trial) {
            PhaseState st{0.0, {u(), u()}, {u(), u()}};
            TangentState ts{{u(), u()}, {u(), u()}, 0, 0};
            auto [xi_dot, xi_ddot] = tangent_rhs(spec, st, ts);
            Vec eis = eisenhart_jlc_rhs(spec, st, ts.xi, ts.xi_dot);
            for (std::size_t i = 0; i < 2; ++i) {
                max_diff = std::max(max_diff, std::abs(eis[i] - xi_ddot[i]));
                max_mag = std::max(max_mag, std::abs(xi_ddot[i]));
            }
        }
        Checks c;
        c.le("max_abs_difference", max_diff, 1e-14 * std::max(1.0, max_mag));
        c.note("max_rhs_magnitude", max_mag);
        r.pass = c.ok;
        r.details = c.text;
    }});

    suite.push_back({"A7", "Jacobi guard fires at the first turning point",
                     [pi](CriterionResult& r) {
        auto spec = make_harmonic({1.0});
        PhaseState init{0.0, {0.0}, {1.0}}; // T = cos(t)^2 / 2, first zero at pi/2
        RunConfig cfg;
        cfg.dt = 1e-3;
        cfg.t_max = 3.0;
        cfg.record_stride = 1;
        JacobiVariationalState jv0{{1.0}, {0.0}, 0, 0, 0};
        LyapunovSeries series = jacobi_exponent(spec, init, jv0, cfg);
        Checks c;
        c.truthy("singular_flag", series.singular);
        if (series.singular)
            c.le("guard_time_error", std::abs(series.t_singular - pi / 2.0), cfg.dt + 1e-12);
        r.pass = c.ok;
        r.details = c.text;
    }});

    suite.push_back({"A8", "Tangent flow matches finite-difference oracle at first order",
                     [](CriterionResult& r) {
        Checks c;
        RunConfig cfg;
        cfg.dt = 1e-3;
        cfg.t_max = 20.0;
        cfg.record_stride = 10;
        Direction dir{{1.0, 0.0}, {0.0, 0.0}};

        auto sup_error = [&](const SystemSpec& spec, const PhaseState& init,
                             double dtau) {
            RunConfig run = cfg;
            run.dtau = dtau;
            auto [xi0, xid0] = tangent_initial_from_direction(spec, dir);
            TangentTrack track = integrate_tangent(spec, init, xi0, xid0, run);
            FdTangentSeries fd = fd_tangent_oracle(spec, init, dir, run, FdScheme::forward);
            double err = 0.0, scale = 0.0;
            const std::size_t n = std::min(track.times.size(), fd.times.size());
            for (std::size_t k = 0; k < n; ++k) {
                double d2 = 0.0;
                for (std::size_t i = 0; i < spec.n_dof; ++i) {
                    const double d = track.xi[k][i] - fd.xi[k][i];
                    d2 += d * d;
                }
                err = std::max(err, std::sqrt(d2));
                scale = std::max(scale, norm2(fd.xi[k]));
            }
            return err / scale;
        };

        auto harm = make_harmonic({1.0, std::sqrt(2.0)});
        PhaseState harm_init{0.0, {1.0, 0.0}, {0.0, 1.0}};
        c.le("harmonic_sup_error(dtau=1e-5)", sup_error(harm, harm_init, 1e-5), 1e-6);

        auto hh = make_henon_heiles();
        PhaseState hh_init = detail::henon_state_at_energy(hh, 0.0, -0.1, 0.0, 0.125);
        const double e1 = sup_error(hh, hh_init, 1e-4);
        const double e2 = sup_error(hh, hh_init, 5e-5);
        c.lt("henon_sup_error(dtau=5e-5)", e2, 1e-2);
        c.in_range("henon_error_ratio", e1 / e2, 1.5, 3.0); // first-order convergence
        r.pass = c.ok;
        r.details = c.text;
    }});

    suite.push_back({"A9", "Chaotic regime: both indicators positive and consistent",
                     [](CriterionResult& r) {
        Checks c;
        auto spec = make_henon_heiles();
        PhaseState init = detail::henon_state_at_energy(spec, 0.0, -0.1, 0.0, 0.125);

        RunConfig cfg;
        cfg.dt = 1e-3;
        cfg.t_max = 2e4;
        cfg.record_stride = 20000; // one sample per 20 time units
        cfg.renorm_interval = 100;
        auto ts = seeded_unit_tangent(2, cfg.seed);
        LyapunovSeries benettin = benettin_exponent(spec, init, ts, cfg);
        const double lam_final = benettin.back().lambda_t;
        const double lam_mid = sample_at_or_before(benettin, 2e3).lambda_t;
        c.gt("lambda_T(2e4)", lam_final, 0.01);
        double lo = std::numeric_limits<double>::infinity(), hi = 0.0, mean = 0.0;
        std::size_t count = 0;
        double min_positive = std::numeric_limits<double>::infinity();
        for (const auto& s : benettin.samples) {
            if (s.t >= 200.0) min_positive = std::min(min_positive, s.lambda_t);
            if (s.t >= 2e3) {
                lo = std::min(lo, s.lambda_t);
                hi = std::max(hi, s.lambda_t);
                mean += s.lambda_t;
                ++count;
            }
        }
        mean /= static_cast<double>(count);
        c.gt("min_lambda_T[200,2e4]", min_positive, 0.0);
        c.lt("last_decade_rel_change", std::abs(lam_final - lam_mid) / lam_final, 0.3);
        c.lt("last_decade_fluctuation", (hi - lo) / mean, 0.5);

        RunConfig jcfg;
        jcfg.dt = 1e-3;
        jcfg.t_max = 500.0;
        jcfg.record_stride = 1000;
        jcfg.renorm_interval = 100;
        JacobiVariationalState jv0{ts.xi, ts.xi_dot, 0, 0, 0};
        LyapunovSeries jacobi = jacobi_exponent(spec, init, jv0, jcfg);
        c.truthy("jacobi_run_completed", !jacobi.singular);
        c.gt("lambda_J(500)", jacobi.back().lambda_t, 0.0);

        // two-trajectory estimator against Benettin, same direction, before
        // the separation saturates
        Direction dir{{1.0, 0.0}, {0.0, 0.0}};
        auto [xi0, xid0] = tangent_initial_from_direction(spec, dir);
        RunConfig tcfg;
        tcfg.dt = 1e-3;
        tcfg.t_max = 600.0;
        tcfg.record_stride = 100;
        tcfg.renorm_interval = 100;
        TangentState aligned{xi0, xid0, 0, 0};
        LyapunovSeries bench = benettin_exponent(spec, init, aligned, tcfg);
        const double d0 = 1e-8;
        PhaseState pert = init;
        pert.q[0] += d0;
        LyapunovSeries two = two_trajectory_exponent(spec, init, pert, tcfg);
        bool found = false;
        for (const auto& s : two.samples) {
            const double separation = d0 * std::exp(s.lambda_t * (s.t - init.t));
            if (separation >= 1e-2) {
                const auto& b = sample_at_or_before(bench, s.t);
                c.note("t_star", s.t);
                c.le("estimator_rel_difference",
                     std::abs(s.lambda_t - b.lambda_t) / std::abs(b.lambda_t), 0.2);
                found = true;
                break;
            }
        }
        c.truthy("separation_reached_saturation", found);
        r.pass = c.ok;
        r.details = c.text;
    }});

    return suite;
}

inline CriterionResult run_criterion(const AcceptanceCriterion& criterion) {
    CriterionResult result;
    result.id = criterion.id;
    result.title = criterion.title;
    const auto start = std::chrono::steady_clock::now();
    try {
        criterion.run(result);
    } catch (const std::exception& e) {
        result.pass = false;
        result.details += std::string(result.details.empty() ? "" : "; ") + "exception: " +
                          e.what();
    }
    result.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
}

} // namespace geospread
