#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <utility>
#include <vector>

#include "geospread/variational.hpp"

namespace geospread {

/// Linearized variation xi = dq/dtau at fixed t, with the Benettin
/// renormalization ledger.
struct TangentState {
    Vec xi;
    Vec xi_dot;
    double log_sum = 0.0;
    long renorm_count = 0;
};

/// Unit perturbation direction in (q, p) space.
struct Direction {
    Vec dq;
    Vec dp;
};

enum class FdScheme { forward, central };

inline void validate_unit_direction(const SystemSpec& spec, const Direction& dir) {
    detail::check_dim(spec, dir.dq, "direction");
    detail::check_dim(spec, dir.dp, "direction");
    const double r = norm2_pair(dir.dq, dir.dp);
    if (std::abs(r - 1.0) > 1e-8)
        throw ConfigError("direction: not a unit vector in (q, p) space");
}

/// Tangent vector matching a phase-space perturbation direction:
/// xi = dq, xi_dot = d(qdot) = dp / m.
inline std::pair<Vec, Vec> tangent_initial_from_direction(const SystemSpec& spec,
                                                          const Direction& dir) {
    Vec xi = dir.dq, xi_dot(spec.n_dof);
    for (std::size_t i = 0; i < spec.n_dof; ++i) xi_dot[i] = dir.dp[i] / spec.masses[i];
    return {std::move(xi), std::move(xi_dot)};
}

namespace detail {

inline double uniform01(std::mt19937_64& gen) {
    return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

inline double gaussian(std::mt19937_64& gen) {
    double u1 = 0.0;
    do {
        u1 = uniform01(gen);
    } while (u1 <= 0.0);
    const double u2 = uniform01(gen);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

/// xi_ddot_n = -(1/m_n) sum_l V_{,nl} xi_l. Shared by the tangent flow and
/// the Floquet oracle.
struct TangentRhs {
    const SystemSpec& spec;
    Matrix hess;
    bool constant_hessian;

    explicit TangentRhs(const SystemSpec& s) : spec(s) {
        constant_hessian = std::holds_alternative<Harmonic>(s.potential) ||
                           std::holds_alternative<Quadratic>(s.potential);
        if (constant_hessian) potential_hessian(spec, Vec(s.n_dof, 0.0), hess);
    }

    bool operator()(const PhaseState& stage, const Vec& xi, const Vec&, Vec& xi_ddot) {
        if (!constant_hessian) potential_hessian(spec, stage.q, hess);
        const std::size_t n = spec.n_dof;
        for (std::size_t i = 0; i < n; ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j < n; ++j) s += hess(i, j) * xi[j];
            xi_ddot[i] = -s / spec.masses[i];
        }
        return true;
    }
};

} // namespace detail

/// Deterministic pseudo-random unit tangent vector (Euclidean norm on the
/// doubled vector), for reproducible exponent runs.
inline TangentState seeded_unit_tangent(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    TangentState ts;
    ts.xi.resize(n);
    ts.xi_dot.resize(n);
    for (std::size_t i = 0; i < n; ++i) ts.xi[i] = detail::gaussian(gen);
    for (std::size_t i = 0; i < n; ++i) ts.xi_dot[i] = detail::gaussian(gen);
    const double r = norm2_pair(ts.xi, ts.xi_dot);
    scale(ts.xi, 1.0 / r);
    scale(ts.xi_dot, 1.0 / r);
    return ts;
}

/// Tangent-dynamics right-hand side: returns (xi_dot, xi_ddot) with
/// xi_ddot_n = -(1/m_n) sum_l V_{,nl}(q) xi_l.
inline std::pair<Vec, Vec> tangent_rhs(const SystemSpec& spec, const PhaseState& state,
                                       const TangentState& ts) {
    detail::check_dim(spec, ts.xi, "tangent_rhs");
    detail::check_dim(spec, ts.xi_dot, "tangent_rhs");
    detail::TangentRhs rhs(spec);
    Vec xi_ddot(spec.n_dof);
    rhs(state, ts.xi, ts.xi_dot, xi_ddot);
    return {ts.xi_dot, std::move(xi_ddot)};
}

/// Benettin finite-time Lyapunov series from the tangent flow: the joint
/// (base, xi) system is integrated with RK4 and the pair (xi, xi_dot) is
/// rescaled to unit norm every renorm_interval steps, accumulating log
/// growth factors. Reports the exponent per unit time and per unit Jacobi
/// arc length.
inline LyapunovSeries benettin_exponent(const SystemSpec& spec, const PhaseState& initial,
                                        const TangentState& ts0, const RunConfig& config) {
    detail::TangentRhs rhs(spec);
    detail::VariationalOptions opt;
    opt.weight = detail::MetricWeight::mass;
    auto outcome = detail::run_variational(spec, initial, ts0.xi, ts0.xi_dot, config, rhs, opt);
    return std::move(outcome.series);
}

/// Raw tangent-flow track (no renormalization): xi at every recorded sample,
/// in physical scale. Used by the finite-difference comparisons.
struct TangentTrack {
    Vec times;
    std::vector<Vec> xi;
    std::vector<Vec> xi_dot;
};

inline TangentTrack integrate_tangent(const SystemSpec& spec, const PhaseState& initial,
                                      const Vec& xi0, const Vec& xi_dot0,
                                      const RunConfig& config) {
    detail::TangentRhs rhs(spec);
    detail::VariationalOptions opt;
    opt.renormalize = false;
    opt.record_vectors = true;
    auto outcome = detail::run_variational(spec, initial, xi0, xi_dot0, config, rhs, opt);
    // run_variational scales the initial pair to unit norm; undo so the
    // track is in the caller's scale.
    const double r0 = detail::variational_norm(spec, initial, xi0, xi_dot0, config.norm,
                                               detail::MetricWeight::mass);
    TangentTrack track;
    track.times = std::move(outcome.track_times);
    track.xi = std::move(outcome.xi_track);
    track.xi_dot = std::move(outcome.xi_dot_track);
    for (auto& v : track.xi)
        for (double& x : v) x *= r0;
    for (auto& v : track.xi_dot)
        for (double& x : v) x *= r0;
    return track;
}

/// Naive two-trajectory exponent: lambda(t) = ln(|dq(t)| / |dq(0)|) / t for
/// two nearby initial conditions, integrated with velocity Verlet. Saturates
/// once the separation reaches the system size.
inline LyapunovSeries two_trajectory_exponent(const SystemSpec& spec, const PhaseState& state1,
                                              const PhaseState& state2, const RunConfig& config) {
    spec.validate();
    config.validate();
    Vec dq(spec.n_dof);
    for (std::size_t i = 0; i < spec.n_dof; ++i) dq[i] = state2.q[i] - state1.q[i];
    const double d0 = norm2(dq);
    if (!(d0 > 0.0))
        throw ConfigError("two_trajectory_exponent: initial coordinate separation is zero");

    const std::size_t n_steps = config.step_count();
    PhaseState a = state1, b = state2;
    ArcAccumulator arc;
    double t_kin = kinetic_energy(spec, a);
    double v_pot = potential_value(spec, a.q);
    LyapunovSeries series;
    for (std::size_t k = 1; k <= n_steps; ++k) {
        const double t_prev = t_kin, l_prev = t_kin - v_pot;
        a = verlet_step(spec, a, config.dt);
        b = verlet_step(spec, b, config.dt);
        t_kin = kinetic_energy(spec, a);
        v_pot = potential_value(spec, a.q);
        arc = accumulate_arc(arc, t_prev, t_kin, l_prev, t_kin - v_pot, config.dt, config.kappa);
        if (k % config.record_stride == 0 || k == n_steps) {
            for (std::size_t i = 0; i < spec.n_dof; ++i) dq[i] = b.q[i] - a.q[i];
            const double num = std::log(norm2(dq) / d0);
            const double elapsed = a.t - state1.t;
            LyapunovSample s;
            s.t = a.t;
            s.s_jacobi = arc.s_jacobi;
            s.lambda_t = num / elapsed;
            s.lambda_s = arc.s_jacobi > 0.0 ? num / arc.s_jacobi
                                            : std::numeric_limits<double>::quiet_NaN();
            s.renorm_count = 0;
            series.samples.push_back(s);
        }
    }
    return series;
}

/// Finite-difference oracle for the tangent vector: two (or three) nearby
/// trajectories integrated with RK4 and differenced at matched times.
struct FdTangentSeries {
    Vec times;
    std::vector<Vec> xi;
};

inline FdTangentSeries fd_tangent_oracle(const SystemSpec& spec, const PhaseState& initial,
                                         const Direction& direction, const RunConfig& config,
                                         FdScheme scheme = FdScheme::forward) {
    validate_unit_direction(spec, direction);
    auto offset_state = [&](double eps) {
        PhaseState s = initial;
        for (std::size_t i = 0; i < spec.n_dof; ++i) s.q[i] += eps * direction.dq[i];
        for (std::size_t i = 0; i < spec.n_dof; ++i) s.p[i] += eps * direction.dp[i];
        return s;
    };
    const double h = config.dtau;
    const PhaseState plus = offset_state(h);
    const PhaseState base = scheme == FdScheme::central ? offset_state(-h) : initial;
    const double denom = scheme == FdScheme::central ? 2.0 * h : h;

    TrajectoryRecord rp = run_trajectory(spec, plus, config, Integrator::rk4);
    TrajectoryRecord rb = run_trajectory(spec, base, config, Integrator::rk4);
    if (rp.samples.size() != rb.samples.size())
        throw NumericalError("fd_tangent_oracle: mismatched sample counts");

    FdTangentSeries out;
    out.times.reserve(rp.samples.size());
    out.xi.reserve(rp.samples.size());
    for (std::size_t k = 0; k < rp.samples.size(); ++k) {
        Vec xi(spec.n_dof);
        for (std::size_t i = 0; i < spec.n_dof; ++i)
            xi[i] = (rp.samples[k].state.q[i] - rb.samples[k].state.q[i]) / denom;
        out.times.push_back(rp.samples[k].state.t);
        out.xi.push_back(std::move(xi));
    }
    return out;
}

} // namespace geospread
