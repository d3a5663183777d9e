#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "geospread/integrate.hpp"
#include "geospread/system.hpp"

namespace geospread {

/// One point of a finite-time exponent series. lambda_t is the exponent per
/// unit time, lambda_s the exponent per unit Jacobi arc length.
struct LyapunovSample {
    double t = 0.0;
    double s_jacobi = 0.0;
    double lambda_t = 0.0;
    double lambda_s = 0.0;
    long renorm_count = 0;
};

struct LyapunovSeries {
    std::vector<LyapunovSample> samples;
    bool singular = false;
    double t_singular = std::numeric_limits<double>::quiet_NaN();
    long t_guard_hits = 0;

    const LyapunovSample& back() const { return samples.back(); }
};

/// Latest sample with sample.t <= t (series entries are at increasing t).
inline const LyapunovSample& sample_at_or_before(const LyapunovSeries& series, double t) {
    const LyapunovSample* best = nullptr;
    for (const auto& s : series.samples) {
        if (s.t <= t + 1e-12) best = &s;
        else break;
    }
    if (!best) throw ConfigError("sample_at_or_before: no sample at or before requested time");
    return *best;
}

namespace detail {

enum class MetricWeight { mass, jacobi };

/// Norm used for renormalization. The metric variant weighs both blocks with
/// the mass matrix; for Jacobi runs the conformal factor 2T (equal to
/// 2(E - V) on the energy shell) multiplies the whole form.
inline double variational_norm(const SystemSpec& spec, const PhaseState& state, const Vec& xi,
                               const Vec& xi_dot, NormKind kind, MetricWeight weight) {
    if (kind == NormKind::euclidean) return norm2_pair(xi, xi_dot);
    double s = 0.0;
    for (std::size_t i = 0; i < spec.n_dof; ++i)
        s += spec.masses[i] * (xi[i] * xi[i] + xi_dot[i] * xi_dot[i]);
    if (weight == MetricWeight::jacobi) s *= 2.0 * kinetic_energy(spec, state);
    return std::sqrt(s);
}

struct VariationalOptions {
    bool renormalize = true;
    bool record_vectors = false;
    MetricWeight weight = MetricWeight::mass;
};

struct VariationalOutcome {
    LyapunovSeries series;
    std::vector<double> track_times;
    std::vector<Vec> xi_track, xi_dot_track; // raw vectors, filled when record_vectors
    Vec xi, xi_dot;                          // state after the last completed step
    double log_sum = 0.0;
    long renorm_count = 0;
};

/// Joint RK4 integration of (base trajectory, variational pair). The
/// variational right-hand side is a callable
///     bool rhs(const PhaseState& stage, const Vec& xi, const Vec& xi_dot, Vec& xi_ddot)
/// returning false to signal the kinetic-energy guard; the offending step is
/// then discarded and the run ends with the singular flag set.
template <class XiRhs>
VariationalOutcome run_variational(const SystemSpec& spec, const PhaseState& initial, Vec xi0,
                                   Vec xi_dot0, const RunConfig& config, XiRhs&& xi_rhs,
                                   const VariationalOptions& opt = {}) {
    spec.validate();
    config.validate();
    check_dim(spec, initial.q, "run_variational");
    check_dim(spec, initial.p, "run_variational");
    check_dim(spec, xi0, "run_variational");
    check_dim(spec, xi_dot0, "run_variational");

    const std::size_t n = spec.n_dof;
    const std::size_t n_steps = config.step_count();

    PhaseState state = initial;
    const double t0 = initial.t;

    const double r0 = variational_norm(spec, state, xi0, xi_dot0, config.norm, opt.weight);
    if (!(r0 > 0.0)) throw ConfigError("run_variational: initial variational vector is zero");
    scale(xi0, 1.0 / r0);
    scale(xi_dot0, 1.0 / r0);

    Vec y(4 * n);
    for (std::size_t i = 0; i < n; ++i) y[i] = state.q[i];
    for (std::size_t i = 0; i < n; ++i) y[n + i] = state.p[i];
    for (std::size_t i = 0; i < n; ++i) y[2 * n + i] = xi0[i];
    for (std::size_t i = 0; i < n; ++i) y[3 * n + i] = xi_dot0[i];

    VariationalOutcome out;
    out.xi = xi0;
    out.xi_dot = xi_dot0;

    ArcAccumulator arc;
    double t_kin = kinetic_energy(spec, state);
    double v_pot = potential_value(spec, state.q);

    struct GuardMonitor {
        bool hit = false;
        double t = std::numeric_limits<double>::quiet_NaN();
    } guard;

    PhaseState stage{state.t, Vec(n), Vec(n)};
    Vec grad, xib(n), xidb(n), xiddb(n);
    auto rhs = [&](double t, const Vec& yy, Vec& dy) {
        stage.t = t;
        for (std::size_t i = 0; i < n; ++i) stage.q[i] = yy[i];
        for (std::size_t i = 0; i < n; ++i) stage.p[i] = yy[n + i];
        for (std::size_t i = 0; i < n; ++i) dy[i] = stage.p[i] / spec.masses[i];
        potential_gradient(spec, stage.q, grad);
        for (std::size_t i = 0; i < n; ++i) dy[n + i] = -grad[i];
        for (std::size_t i = 0; i < n; ++i) xib[i] = yy[2 * n + i];
        for (std::size_t i = 0; i < n; ++i) xidb[i] = yy[3 * n + i];
        for (std::size_t i = 0; i < n; ++i) dy[2 * n + i] = xidb[i];
        if (!guard.hit && !xi_rhs(stage, xib, xidb, xiddb)) {
            guard.hit = true;
            guard.t = t;
        }
        if (guard.hit) std::fill(xiddb.begin(), xiddb.end(), 0.0);
        for (std::size_t i = 0; i < n; ++i) dy[3 * n + i] = xiddb[i];
    };

    Rk4Work work;
    auto norm_now = [&]() {
        for (std::size_t i = 0; i < n; ++i) out.xi[i] = y[2 * n + i];
        for (std::size_t i = 0; i < n; ++i) out.xi_dot[i] = y[3 * n + i];
        return variational_norm(spec, state, out.xi, out.xi_dot, config.norm, opt.weight);
    };

    auto record_sample = [&]() {
        const double r = norm_now();
        const double num = out.log_sum + std::log(r);
        const double elapsed = state.t - t0;
        LyapunovSample s;
        s.t = state.t;
        s.s_jacobi = arc.s_jacobi;
        s.lambda_t = elapsed > 0.0 ? num / elapsed : std::numeric_limits<double>::quiet_NaN();
        s.lambda_s =
            arc.s_jacobi > 0.0 ? num / arc.s_jacobi : std::numeric_limits<double>::quiet_NaN();
        s.renorm_count = out.renorm_count;
        out.series.samples.push_back(s);
        if (opt.record_vectors) {
            out.track_times.push_back(state.t);
            out.xi_track.push_back(out.xi);
            out.xi_dot_track.push_back(out.xi_dot);
        }
    };

    if (opt.record_vectors) {
        out.track_times.push_back(state.t);
        out.xi_track.push_back(xi0);
        out.xi_dot_track.push_back(xi_dot0);
    }

    for (std::size_t k = 1; k <= n_steps; ++k) {
        const double t_prev = t_kin, l_prev = t_kin - v_pot;
        rk4_step_flat(rhs, state.t, y, config.dt, work);
        if (guard.hit) {
            out.series.singular = true;
            out.series.t_singular = guard.t;
            out.series.t_guard_hits = 1;
            break;
        }
        if (!all_finite(y))
            throw NumericalError("run_variational: non-finite state", state.t + config.dt);
        for (std::size_t i = 0; i < n; ++i) state.q[i] = y[i];
        for (std::size_t i = 0; i < n; ++i) state.p[i] = y[n + i];
        state.t += config.dt;
        t_kin = kinetic_energy(spec, state);
        v_pot = potential_value(spec, state.q);
        arc = accumulate_arc(arc, t_prev, t_kin, l_prev, t_kin - v_pot, config.dt, config.kappa);

        if (opt.renormalize && k % config.renorm_interval == 0 && k != n_steps) {
            const double r = norm_now();
            if (!(r > 0.0))
                throw NumericalError("run_variational: variational vector collapsed to zero",
                                     state.t);
            out.log_sum += std::log(r);
            ++out.renorm_count;
            const double inv = 1.0 / r;
            for (std::size_t i = 2 * n; i < 4 * n; ++i) y[i] *= inv;
        }

        if (k % config.record_stride == 0 || k == n_steps) record_sample();
    }

    norm_now(); // refresh out.xi / out.xi_dot
    return out;
}

} // namespace detail
} // namespace geospread
