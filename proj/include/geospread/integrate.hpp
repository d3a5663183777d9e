#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "geospread/errors.hpp"
#include "geospread/system.hpp"

namespace geospread {

enum class NormKind { euclidean, metric };
enum class Integrator { verlet, rk4 };

/// Per-run integration parameters shared by all experiment kinds.
struct RunConfig {
    double dt = 1e-3;
    double t_max = 100.0;
    std::size_t record_stride = 1;
    std::size_t renorm_interval = 100;
    double dtau = 1e-6;                    // finite-difference offset for oracles
    std::optional<double> t_min_guard;     // absolute kinetic-energy guard; unset: 1e-6 |E|
    double kappa = 1.0;                    // affine constant, ds = kappa dt
    NormKind norm = NormKind::euclidean;
    std::uint64_t seed = 1234567;
    double energy_tol = 1e-6;              // warning threshold on max |E - E0| / |E0|

    void validate() const {
        if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("run.dt must be > 0");
        if (!(t_max >= 0.0) || !std::isfinite(t_max)) throw ConfigError("run.t_max must be >= 0");
        if (record_stride < 1) throw ConfigError("run.record_stride must be >= 1");
        if (renorm_interval < 1) throw ConfigError("run.renorm_interval must be >= 1");
        if (!(dtau > 0.0)) throw ConfigError("run.dtau must be > 0");
        if (t_min_guard && !(*t_min_guard >= 0.0)) throw ConfigError("run.t_min_guard must be >= 0");
        if (!(kappa > 0.0)) throw ConfigError("run.kappa must be > 0");
        if (!(energy_tol > 0.0)) throw ConfigError("run.energy_tol must be > 0");
    }

    double resolved_guard(double energy) const {
        return t_min_guard ? *t_min_guard : 1e-6 * std::abs(energy);
    }

    std::size_t step_count() const { return static_cast<std::size_t>(std::llround(t_max / dt)); }
};

/// Arc-length bookkeeping carried along a trajectory. s_jacobi integrates
/// 2T dt, s_eisenhart is kappa t, and q_extra is the Eisenhart coordinate
/// q^{N+1} = kappa^2 t / 2 - int L dt (integration constant fixed to zero).
struct ArcAccumulator {
    double s_jacobi = 0.0;
    double s_eisenhart = 0.0;
    double q_extra = 0.0;
};

/// One trapezoid update over a step of size dt. L = T - V is the Lagrangian.
inline ArcAccumulator accumulate_arc(ArcAccumulator acc, double t_prev, double t_next,
                                     double l_prev, double l_next, double dt, double kappa) {
    if (t_prev < 0.0 || t_next < 0.0)
        throw ConfigError("accumulate_arc: kinetic energy must be non-negative");
    acc.s_jacobi += dt * (t_prev + t_next);                       // trapezoid of 2T
    acc.q_extra += kappa * kappa * dt / 2.0 - 0.5 * dt * (l_prev + l_next);
    acc.s_eisenhart += kappa * dt;
    return acc;
}

struct TrajectorySample {
    PhaseState state;
    double kinetic = 0.0;
    double potential = 0.0;
    double energy = 0.0;
    ArcAccumulator arc;
};

struct TrajectoryRecord {
    std::vector<TrajectorySample> samples;
    double max_energy_deviation = 0.0;   // max |E(t) - E0| / |E0| over all steps
    double secular_energy_drift = 0.0;   // |mean E last tenth - mean E first tenth| / |E0|
    bool energy_warning = false;         // max deviation exceeded config tolerance
};

/// One velocity-Verlet step of the separable Hamiltonian flow.
inline PhaseState verlet_step(const SystemSpec& spec, const PhaseState& state, double dt) {
    PhaseState next = state;
    Vec grad;
    potential_gradient(spec, state.q, grad);
    const std::size_t n = spec.n_dof;
    Vec p_half(n);
    for (std::size_t i = 0; i < n; ++i) p_half[i] = state.p[i] - 0.5 * dt * grad[i];
    for (std::size_t i = 0; i < n; ++i) next.q[i] = state.q[i] + dt * p_half[i] / spec.masses[i];
    potential_gradient(spec, next.q, grad);
    if (!all_finite(grad))
        throw NumericalError("verlet_step: non-finite force", state.t);
    for (std::size_t i = 0; i < n; ++i) next.p[i] = p_half[i] - 0.5 * dt * grad[i];
    next.t = state.t + dt;
    return next;
}

namespace detail {

/// Scratch space for the flat classical RK4 step.
struct Rk4Work {
    Vec k1, k2, k3, k4, ytmp;
    void resize(std::size_t n) {
        k1.resize(n);
        k2.resize(n);
        k3.resize(n);
        k4.resize(n);
        ytmp.resize(n);
    }
};

/// Classical fourth-order step on a flat state vector.
/// rhs(t, y, dy) must fill dy with the derivative.
template <class Rhs>
inline void rk4_step_flat(Rhs&& rhs, double t, Vec& y, double dt, Rk4Work& w) {
    const std::size_t n = y.size();
    w.resize(n);
    rhs(t, y, w.k1);
    for (std::size_t i = 0; i < n; ++i) w.ytmp[i] = y[i] + 0.5 * dt * w.k1[i];
    rhs(t + 0.5 * dt, w.ytmp, w.k2);
    for (std::size_t i = 0; i < n; ++i) w.ytmp[i] = y[i] + 0.5 * dt * w.k2[i];
    rhs(t + 0.5 * dt, w.ytmp, w.k3);
    for (std::size_t i = 0; i < n; ++i) w.ytmp[i] = y[i] + dt * w.k3[i];
    rhs(t + dt, w.ytmp, w.k4);
    for (std::size_t i = 0; i < n; ++i)
        y[i] += dt / 6.0 * (w.k1[i] + 2.0 * w.k2[i] + 2.0 * w.k3[i] + w.k4[i]);
}

} // namespace detail

/// One RK4 step of the joint system (base trajectory, auxiliary vector).
/// aux_rhs(base, aux, daux) is evaluated at every internal stage with the
/// stage's base state, so auxiliary flows that depend on (q, p, t) are
/// integrated consistently with the trajectory. aux may be empty.
template <class AuxRhs>
inline std::pair<PhaseState, Vec> rk4_augmented_step(const SystemSpec& spec,
                                                     const PhaseState& state, const Vec& aux,
                                                     AuxRhs&& aux_rhs, double dt) {
    const std::size_t n = spec.n_dof;
    const std::size_t k = aux.size();
    Vec y(2 * n + k);
    for (std::size_t i = 0; i < n; ++i) y[i] = state.q[i];
    for (std::size_t i = 0; i < n; ++i) y[n + i] = state.p[i];
    for (std::size_t i = 0; i < k; ++i) y[2 * n + i] = aux[i];

    PhaseState stage{state.t, Vec(n), Vec(n)};
    Vec aux_stage(k), daux(k), grad;
    auto rhs = [&](double t, const Vec& yy, Vec& dy) {
        stage.t = t;
        for (std::size_t i = 0; i < n; ++i) stage.q[i] = yy[i];
        for (std::size_t i = 0; i < n; ++i) stage.p[i] = yy[n + i];
        for (std::size_t i = 0; i < n; ++i) dy[i] = stage.p[i] / spec.masses[i];
        potential_gradient(spec, stage.q, grad);
        for (std::size_t i = 0; i < n; ++i) dy[n + i] = -grad[i];
        if (k > 0) {
            for (std::size_t i = 0; i < k; ++i) aux_stage[i] = yy[2 * n + i];
            aux_rhs(stage, aux_stage, daux);
            for (std::size_t i = 0; i < k; ++i) dy[2 * n + i] = daux[i];
        }
    };
    detail::Rk4Work work;
    detail::rk4_step_flat(rhs, state.t, y, dt, work);
    if (!all_finite(y)) throw NumericalError("rk4_augmented_step: non-finite state", state.t);

    PhaseState next{state.t + dt, Vec(n), Vec(n)};
    for (std::size_t i = 0; i < n; ++i) next.q[i] = y[i];
    for (std::size_t i = 0; i < n; ++i) next.p[i] = y[n + i];
    Vec aux_next(k);
    for (std::size_t i = 0; i < k; ++i) aux_next[i] = y[2 * n + i];
    return {std::move(next), std::move(aux_next)};
}

/// Fixed-step integration of the base trajectory with energy monitoring and
/// arc-length accumulation. Samples are recorded every record_stride steps
/// (the initial state is always sample zero).
inline TrajectoryRecord run_trajectory(const SystemSpec& spec, const PhaseState& initial,
                                       const RunConfig& config,
                                       Integrator integrator = Integrator::verlet) {
    spec.validate();
    config.validate();
    detail::check_dim(spec, initial.q, "run_trajectory");
    detail::check_dim(spec, initial.p, "run_trajectory");

    const std::size_t n_steps = config.step_count();
    TrajectoryRecord rec;
    rec.samples.reserve(n_steps / config.record_stride + 2);

    PhaseState state = initial;
    ArcAccumulator arc;
    double t_kin = kinetic_energy(spec, state);
    double v_pot = potential_value(spec, state.q);
    const double e0 = t_kin + v_pot;
    rec.samples.push_back({state, t_kin, v_pot, e0, arc});

    // running sums for the secular-drift estimate
    const std::size_t window = std::max<std::size_t>(1, n_steps / 10);
    double head_sum = e0;
    std::size_t head_count = 1;
    std::vector<double> tail(window, e0);
    std::size_t tail_pos = 0, tail_count = 1;

    detail::Rk4Work work;
    Vec grad, qbuf(spec.n_dof);
    auto rk4_rhs = [&](double, const Vec& y, Vec& dy) {
        const std::size_t nd = spec.n_dof;
        for (std::size_t i = 0; i < nd; ++i) dy[i] = y[nd + i] / spec.masses[i];
        std::copy(y.begin(), y.begin() + static_cast<std::ptrdiff_t>(nd), qbuf.begin());
        potential_gradient(spec, qbuf, grad);
        for (std::size_t i = 0; i < nd; ++i) dy[nd + i] = -grad[i];
    };

    Vec y;
    if (integrator == Integrator::rk4) {
        y.resize(2 * spec.n_dof);
        for (std::size_t i = 0; i < spec.n_dof; ++i) y[i] = state.q[i];
        for (std::size_t i = 0; i < spec.n_dof; ++i) y[spec.n_dof + i] = state.p[i];
    }

    for (std::size_t k = 1; k <= n_steps; ++k) {
        const double t_prev = t_kin, l_prev = t_kin - v_pot;
        if (integrator == Integrator::verlet) {
            state = verlet_step(spec, state, config.dt);
        } else {
            detail::rk4_step_flat(rk4_rhs, state.t, y, config.dt, work);
            for (std::size_t i = 0; i < spec.n_dof; ++i) state.q[i] = y[i];
            for (std::size_t i = 0; i < spec.n_dof; ++i) state.p[i] = y[spec.n_dof + i];
            state.t += config.dt;
        }
        if (!all_finite(state.q) || !all_finite(state.p))
            throw NumericalError("run_trajectory: non-finite state", state.t);

        t_kin = kinetic_energy(spec, state);
        v_pot = potential_value(spec, state.q);
        const double e = t_kin + v_pot;
        if (!std::isfinite(e)) throw NumericalError("run_trajectory: non-finite energy", state.t);
        arc = accumulate_arc(arc, t_prev, t_kin, l_prev, t_kin - v_pot, config.dt, config.kappa);

        const double denom = std::abs(e0) > 0.0 ? std::abs(e0) : 1.0;
        rec.max_energy_deviation = std::max(rec.max_energy_deviation, std::abs(e - e0) / denom);
        if (k < window) {
            head_sum += e;
            ++head_count;
        }
        tail[tail_pos] = e;
        tail_pos = (tail_pos + 1) % window;
        tail_count = std::min(tail_count + 1, window);

        if (k % config.record_stride == 0 || k == n_steps)
            rec.samples.push_back({state, t_kin, v_pot, e, arc});
    }

    double tail_sum = 0.0;
    for (std::size_t i = 0; i < tail_count; ++i) tail_sum += tail[i];
    const double denom = std::abs(e0) > 0.0 ? std::abs(e0) : 1.0;
    rec.secular_energy_drift =
        std::abs(tail_sum / static_cast<double>(tail_count) - head_sum / static_cast<double>(head_count)) / denom;
    rec.energy_warning = rec.max_energy_deviation > config.energy_tol;
    return rec;
}

} // namespace geospread
