#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "geospread/smalleig.hpp"
#include "geospread/tangent.hpp"
#include "geospread/variational.hpp"

namespace geospread {

/// Geodesic-spread vector in the Jacobi-metric realization, with the same
/// renormalization ledger as the tangent state plus guard bookkeeping.
struct JacobiVariationalState {
    Vec xi;
    Vec xi_dot;
    double log_sum = 0.0;
    long renorm_count = 0;
    long t_guard_hits = 0;
};

/// Kinetic-energy (Jacobi) metric g = 2 (E - V(q)) a, with a = diag(m).
/// Positive definite iff E > V(q); singular exactly at turning points.
struct JacobiMetricValue {
    Matrix g;
};

inline JacobiMetricValue jacobi_metric(const SystemSpec& spec, const Vec& q, double energy) {
    detail::check_dim(spec, q, "jacobi_metric");
    if (!std::isfinite(energy)) throw ConfigError("jacobi_metric: energy must be finite");
    const double factor = 2.0 * (energy - potential_value(spec, q));
    Matrix g(spec.n_dof, spec.n_dof);
    for (std::size_t i = 0; i < spec.n_dof; ++i) g(i, i) = factor * spec.masses[i];
    return {std::move(g)};
}

namespace detail {

/// Right-hand side of the geodesic-spread dynamics in the Jacobi metric,
/// written in time parameterization with constant diagonal masses:
///
///   xidd^n = -a^{nk} V_{,kl} xi^l
///            - (1/T) [ a^{nm} V_{,m} { a_{ij} qd^i xid^j + V_{,l} xi^l }
///                      - qd^n { V_{,il} qd^i xi^l + V_{,j} xid^j
///                               + (1/T) V_{,i} qd^i V_{,l} xi^l } ]
///
/// Returns false (guard) when T < t_min_guard; the 1/T and 1/T^2 factors make
/// the flow meaningless below that threshold.
struct JacobiRhs {
    const SystemSpec& spec;
    double t_min_guard;
    Vec grad, qdot, hxi;
    Matrix hess;

    JacobiRhs(const SystemSpec& s, double guard) : spec(s), t_min_guard(guard) {}

    bool operator()(const PhaseState& stage, const Vec& xi, const Vec& xi_dot, Vec& xi_ddot) {
        const std::size_t n = spec.n_dof;
        const double t_kin = kinetic_energy(spec, stage);
        if (!(t_kin >= t_min_guard) || t_kin <= 0.0) return false;

        potential_gradient(spec, stage.q, grad);
        potential_hessian(spec, stage.q, hess);
        qdot.resize(n);
        hxi.resize(n);
        for (std::size_t i = 0; i < n; ++i) qdot[i] = stage.p[i] / spec.masses[i];

        double met_vel = 0.0;  // a_{ij} qd^i xid^j
        double grad_xi = 0.0;  // V_{,l} xi^l
        double grad_xid = 0.0; // V_{,j} xid^j
        double grad_qd = 0.0;  // V_{,i} qd^i
        for (std::size_t i = 0; i < n; ++i) {
            met_vel += spec.masses[i] * qdot[i] * xi_dot[i];
            grad_xi += grad[i] * xi[i];
            grad_xid += grad[i] * xi_dot[i];
            grad_qd += grad[i] * qdot[i];
        }
        double hess_qd_xi = 0.0; // V_{,il} qd^i xi^l
        for (std::size_t i = 0; i < n; ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j < n; ++j) s += hess(i, j) * xi[j];
            hxi[i] = s;
            hess_qd_xi += qdot[i] * s;
        }

        const double inv_t = 1.0 / t_kin;
        const double brace1 = met_vel + grad_xi;
        const double brace2 = hess_qd_xi + grad_xid + inv_t * grad_qd * grad_xi;
        for (std::size_t i = 0; i < n; ++i) {
            const double base = -hxi[i] / spec.masses[i];
            const double extra =
                -inv_t * (grad[i] / spec.masses[i] * brace1 - qdot[i] * brace2);
            xi_ddot[i] = base + extra;
        }
        return true;
    }
};

} // namespace detail

/// Geodesic-spread right-hand side (Jacobi metric, time parameterization).
/// Returns nullopt when the kinetic energy is below t_min_guard (turning
/// point reached; the caller decides whether to abort or flag).
inline std::optional<std::pair<Vec, Vec>> jacobi_xi_rhs(const SystemSpec& spec,
                                                        const PhaseState& state,
                                                        const JacobiVariationalState& jv,
                                                        double t_min_guard) {
    detail::check_dim(spec, jv.xi, "jacobi_xi_rhs");
    detail::check_dim(spec, jv.xi_dot, "jacobi_xi_rhs");
    detail::JacobiRhs rhs(spec, t_min_guard);
    Vec xi_ddot(spec.n_dof);
    if (!rhs(state, jv.xi, jv.xi_dot, xi_ddot)) return std::nullopt;
    return std::make_pair(jv.xi_dot, std::move(xi_ddot));
}

/// Benettin exponent series for the Jacobi geodesic-spread flow. Reports the
/// exponent both per unit Jacobi arc length (the geometrical exponent) and
/// per unit time. A kinetic-energy guard hit ends the run with the singular
/// flag set and the partial series retained.
inline LyapunovSeries jacobi_exponent(const SystemSpec& spec, const PhaseState& initial,
                                      const JacobiVariationalState& jv0,
                                      const RunConfig& config) {
    const double energy = total_energy(spec, initial);
    detail::JacobiRhs rhs(spec, config.resolved_guard(energy));
    detail::VariationalOptions opt;
    opt.weight = detail::MetricWeight::jacobi;
    auto outcome = detail::run_variational(spec, initial, jv0.xi, jv0.xi_dot, config, rhs, opt);
    return std::move(outcome.series);
}

enum class VariationalKind { tangent, jacobi };

/// Monodromy matrix of a variational flow over one period of a periodic base
/// orbit, with Floquet exponents ln|eig| / period sorted descending.
struct FloquetResult {
    double period = 0.0;
    Matrix monodromy;
    Vec exponents;
    double periodicity_defect = 0.0;
};

inline FloquetResult floquet_oracle(const SystemSpec& spec, const PhaseState& initial,
                                    double period, const RunConfig& config,
                                    VariationalKind kind = VariationalKind::jacobi) {
    spec.validate();
    config.validate();
    if (!(period > 0.0)) throw ConfigError("floquet_oracle: period must be positive");

    // land exactly on t = period
    const std::size_t n_steps =
        std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(period / config.dt)));
    RunConfig cfg = config;
    cfg.dt = period / static_cast<double>(n_steps);
    cfg.t_max = period;
    cfg.record_stride = n_steps;
    cfg.norm = NormKind::euclidean; // monodromy columns live in the standard basis

    TrajectoryRecord rec = run_trajectory(spec, initial, cfg, Integrator::rk4);
    const PhaseState& endpoint = rec.samples.back().state;
    double defect2 = 0.0, scale2 = 0.0;
    for (std::size_t i = 0; i < spec.n_dof; ++i) {
        defect2 += (endpoint.q[i] - initial.q[i]) * (endpoint.q[i] - initial.q[i]);
        defect2 += (endpoint.p[i] - initial.p[i]) * (endpoint.p[i] - initial.p[i]);
        scale2 += initial.q[i] * initial.q[i] + initial.p[i] * initial.p[i];
    }
    const double defect = std::sqrt(defect2) / std::max(1.0, std::sqrt(scale2));
    if (defect > 1e-6)
        throw ConfigError("floquet_oracle: base orbit is not periodic with the given period "
                          "(defect " +
                          std::to_string(defect) + ")");

    const std::size_t dim = 2 * spec.n_dof;
    FloquetResult result;
    result.period = period;
    result.periodicity_defect = defect;
    result.monodromy.resize(dim, dim);

    const double energy = total_energy(spec, initial);
    detail::VariationalOptions opt;
    opt.renormalize = false;

    for (std::size_t col = 0; col < dim; ++col) {
        Vec xi0(spec.n_dof, 0.0), xid0(spec.n_dof, 0.0);
        if (col < spec.n_dof) xi0[col] = 1.0;
        else xid0[col - spec.n_dof] = 1.0;

        detail::VariationalOutcome outcome;
        if (kind == VariationalKind::tangent) {
            detail::TangentRhs rhs(spec);
            outcome = detail::run_variational(spec, initial, xi0, xid0, cfg, rhs, opt);
        } else {
            detail::JacobiRhs rhs(spec, cfg.resolved_guard(energy));
            outcome = detail::run_variational(spec, initial, xi0, xid0, cfg, rhs, opt);
        }
        if (outcome.series.singular)
            throw NumericalError("floquet_oracle: kinetic-energy guard hit during monodromy "
                                 "integration",
                                 outcome.series.t_singular);
        for (std::size_t i = 0; i < spec.n_dof; ++i) {
            result.monodromy(i, col) = outcome.xi[i];
            result.monodromy(spec.n_dof + i, col) = outcome.xi_dot[i];
        }
    }

    const auto eigs = eigenvalues(result.monodromy);
    result.exponents.resize(dim);
    for (std::size_t i = 0; i < dim; ++i)
        result.exponents[i] = std::log(std::abs(eigs[i])) / period;
    std::sort(result.exponents.begin(), result.exponents.end(), std::greater<double>());
    return result;
}

/// Spatial components of the Jacobi-Levi-Civita equation on the Eisenhart
/// manifold. The only nonzero Christoffel symbols feeding spatial components
/// are Gamma^i_00 = a^{ij} V_{,j}; with the affine parameterization ds =
/// kappa dt and vanishing variation of the time coordinate, the first-order
/// term drops and the kappa factors cancel, leaving
///   xidd^i = -a^{ik} V_{,kj} xi^j,
/// formally identical to the tangent dynamics.
inline Vec eisenhart_jlc_rhs(const SystemSpec& spec, const PhaseState& state, const Vec& xi,
                             const Vec& xi_dot) {
    detail::check_dim(spec, xi, "eisenhart_jlc_rhs");
    detail::check_dim(spec, xi_dot, "eisenhart_jlc_rhs");
    (void)xi_dot; // couples only to the vanishing time-coordinate variation
    Matrix gamma00_grad; // d Gamma^i_00 / dq^j, scaled by the inverse masses below
    potential_hessian(spec, state.q, gamma00_grad);
    Vec out(spec.n_dof);
    for (std::size_t i = 0; i < spec.n_dof; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < spec.n_dof; ++j) s += gamma00_grad(i, j) * xi[j];
        out[i] = -s / spec.masses[i];
    }
    return out;
}

/// Max relative deviation of the assembled ds^2/dt^2 from kappa^2 over a
/// recorded trajectory, with qdot^{N+1} = kappa^2/2 - L taken per sample.
/// The identity is exact analytically; the deviation measures inconsistency
/// of the recorded energies.
inline double eisenhart_affine_check(const TrajectoryRecord& record, double kappa) {
    if (!(kappa > 0.0)) throw ConfigError("eisenhart_affine_check: kappa must be positive");
    const double k2 = kappa * kappa;
    double max_dev = 0.0;
    for (const auto& s : record.samples) {
        const double lagrangian = s.kinetic - s.potential;
        const double qdot_extra = k2 / 2.0 - lagrangian;
        const double val = -2.0 * s.potential + 2.0 * s.kinetic + 2.0 * qdot_extra;
        max_dev = std::max(max_dev, std::abs(val / k2 - 1.0));
    }
    return max_dev;
}

} // namespace geospread
