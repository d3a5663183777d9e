#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <variant>

#include "geospread/errors.hpp"
#include "geospread/linalg.hpp"

namespace geospread {

/// V(q) = 1/2 sum_i omega_i^2 q_i^2, one positive frequency per degree of freedom.
struct Harmonic {
    Vec omegas;
};

/// V(q) = 1/2 c |q|^2 with arbitrary-sign curvature c. Testing family:
/// c = 0 is a free particle, c < 0 a uniformly unstable saddle with known
/// analytic growth rate sqrt(-c). Not part of the physical catalog.
struct Quadratic {
    double curvature = 0.0;
};

/// Chain of N particles with fixed ends q_0 = q_{N+1} = 0 and bond potential
/// 1/2 k2 d^2 + 1/4 k4 d^4 on every neighbor difference d.
struct AnharmonicChain {
    double k2 = 1.0;
    double k4 = 0.0;
};

/// Two degrees of freedom, V = 1/2 (q1^2 + q2^2) + q1^2 q2 - q2^3 / 3.
struct HenonHeiles {};

using PotentialKind = std::variant<Harmonic, Quadratic, AnharmonicChain, HenonHeiles>;

/// A separable Hamiltonian H = 1/2 sum p_i^2 / m_i + V(q) with constant
/// diagonal mass matrix.
struct SystemSpec {
    std::size_t n_dof = 0;
    Vec masses;
    PotentialKind potential;

    void validate() const;
};

/// Phase-space point of the base trajectory.
struct PhaseState {
    double t = 0.0;
    Vec q;
    Vec p;
};

inline void SystemSpec::validate() const {
    if (n_dof == 0) throw ConfigError("system: n_dof must be positive");
    if (masses.size() != n_dof)
        throw ConfigError("system: masses has length " + std::to_string(masses.size()) +
                          ", expected " + std::to_string(n_dof));
    for (double m : masses)
        if (!(m > 0.0) || !std::isfinite(m))
            throw ConfigError("system: all masses must be positive and finite");
    if (const auto* h = std::get_if<Harmonic>(&potential)) {
        if (h->omegas.size() != n_dof)
            throw ConfigError("system: omegas has length " + std::to_string(h->omegas.size()) +
                              ", expected " + std::to_string(n_dof));
        for (double w : h->omegas)
            if (!(w > 0.0) || !std::isfinite(w))
                throw ConfigError("system: harmonic frequencies must be positive and finite");
    } else if (const auto* c = std::get_if<AnharmonicChain>(&potential)) {
        if (!(c->k2 >= 0.0) || !(c->k4 >= 0.0) || !std::isfinite(c->k2) || !std::isfinite(c->k4))
            throw ConfigError("system: chain couplings k2, k4 must be >= 0 and finite");
    } else if (std::holds_alternative<HenonHeiles>(potential)) {
        if (n_dof != 2) throw ConfigError("system: henon_heiles requires n_dof = 2");
    } else if (const auto* s = std::get_if<Quadratic>(&potential)) {
        if (!std::isfinite(s->curvature)) throw ConfigError("system: curvature must be finite");
    }
}

inline SystemSpec make_harmonic(Vec omegas, Vec masses = {}) {
    SystemSpec s;
    s.n_dof = omegas.size();
    s.masses = masses.empty() ? Vec(s.n_dof, 1.0) : std::move(masses);
    s.potential = Harmonic{std::move(omegas)};
    s.validate();
    return s;
}

inline SystemSpec make_quadratic(std::size_t n, double curvature, Vec masses = {}) {
    SystemSpec s;
    s.n_dof = n;
    s.masses = masses.empty() ? Vec(n, 1.0) : std::move(masses);
    s.potential = Quadratic{curvature};
    s.validate();
    return s;
}

inline SystemSpec make_anharmonic_chain(std::size_t n, double k2, double k4, Vec masses = {}) {
    SystemSpec s;
    s.n_dof = n;
    s.masses = masses.empty() ? Vec(n, 1.0) : std::move(masses);
    s.potential = AnharmonicChain{k2, k4};
    s.validate();
    return s;
}

inline SystemSpec make_henon_heiles() {
    SystemSpec s;
    s.n_dof = 2;
    s.masses = Vec(2, 1.0);
    s.potential = HenonHeiles{};
    s.validate();
    return s;
}

namespace detail {

inline void check_dim(const SystemSpec& spec, const Vec& q, const char* what) {
    if (q.size() != spec.n_dof)
        throw ConfigError(std::string(what) + ": vector has length " + std::to_string(q.size()) +
                          ", expected " + std::to_string(spec.n_dof));
}

} // namespace detail

inline double potential_value(const SystemSpec& spec, const Vec& q) {
    detail::check_dim(spec, q, "potential_value");
    return std::visit(
        [&](const auto& pot) -> double {
            using T = std::decay_t<decltype(pot)>;
            if constexpr (std::is_same_v<T, Harmonic>) {
                double v = 0.0;
                for (std::size_t i = 0; i < q.size(); ++i) {
                    const double w = pot.omegas[i];
                    v += 0.5 * w * w * q[i] * q[i];
                }
                return v;
            } else if constexpr (std::is_same_v<T, Quadratic>) {
                double v = 0.0;
                for (double qi : q) v += qi * qi;
                return 0.5 * pot.curvature * v;
            } else if constexpr (std::is_same_v<T, AnharmonicChain>) {
                // bonds i = 0..N with q_0 = q_{N+1} = 0
                double v = 0.0;
                const std::size_t n = q.size();
                for (std::size_t b = 0; b <= n; ++b) {
                    const double left = (b == 0) ? 0.0 : q[b - 1];
                    const double right = (b == n) ? 0.0 : q[b];
                    const double d = right - left;
                    const double d2 = d * d;
                    v += 0.5 * pot.k2 * d2 + 0.25 * pot.k4 * d2 * d2;
                }
                return v;
            } else { // HenonHeiles
                const double x = q[0], y = q[1];
                return 0.5 * (x * x + y * y) + x * x * y - y * y * y / 3.0;
            }
        },
        spec.potential);
}

inline void potential_gradient(const SystemSpec& spec, const Vec& q, Vec& out) {
    detail::check_dim(spec, q, "potential_gradient");
    out.assign(q.size(), 0.0);
    std::visit(
        [&](const auto& pot) {
            using T = std::decay_t<decltype(pot)>;
            if constexpr (std::is_same_v<T, Harmonic>) {
                for (std::size_t i = 0; i < q.size(); ++i) {
                    const double w = pot.omegas[i];
                    out[i] = w * w * q[i];
                }
            } else if constexpr (std::is_same_v<T, Quadratic>) {
                for (std::size_t i = 0; i < q.size(); ++i) out[i] = pot.curvature * q[i];
            } else if constexpr (std::is_same_v<T, AnharmonicChain>) {
                const std::size_t n = q.size();
                for (std::size_t b = 0; b <= n; ++b) {
                    const double left = (b == 0) ? 0.0 : q[b - 1];
                    const double right = (b == n) ? 0.0 : q[b];
                    const double d = right - left;
                    const double f = pot.k2 * d + pot.k4 * d * d * d; // dV/dd on bond b
                    if (b > 0) out[b - 1] -= f;
                    if (b < n) out[b] += f;
                }
            } else { // HenonHeiles
                const double x = q[0], y = q[1];
                out[0] = x + 2.0 * x * y;
                out[1] = y + x * x - y * y;
            }
        },
        spec.potential);
}

inline Vec potential_gradient(const SystemSpec& spec, const Vec& q) {
    Vec g;
    potential_gradient(spec, q, g);
    return g;
}

inline void potential_hessian(const SystemSpec& spec, const Vec& q, Matrix& out) {
    detail::check_dim(spec, q, "potential_hessian");
    const std::size_t n = q.size();
    out.resize(n, n);
    std::visit(
        [&](const auto& pot) {
            using T = std::decay_t<decltype(pot)>;
            if constexpr (std::is_same_v<T, Harmonic>) {
                for (std::size_t i = 0; i < n; ++i) out(i, i) = pot.omegas[i] * pot.omegas[i];
            } else if constexpr (std::is_same_v<T, Quadratic>) {
                for (std::size_t i = 0; i < n; ++i) out(i, i) = pot.curvature;
            } else if constexpr (std::is_same_v<T, AnharmonicChain>) {
                for (std::size_t b = 0; b <= n; ++b) {
                    const double left = (b == 0) ? 0.0 : q[b - 1];
                    const double right = (b == n) ? 0.0 : q[b];
                    const double d = right - left;
                    const double f2 = pot.k2 + 3.0 * pot.k4 * d * d; // d2V/dd2 on bond b
                    if (b > 0) out(b - 1, b - 1) += f2;
                    if (b < n) out(b, b) += f2;
                    if (b > 0 && b < n) {
                        out(b - 1, b) -= f2;
                        out(b, b - 1) -= f2;
                    }
                }
            } else { // HenonHeiles
                const double x = q[0], y = q[1];
                out(0, 0) = 1.0 + 2.0 * y;
                out(0, 1) = 2.0 * x;
                out(1, 0) = 2.0 * x;
                out(1, 1) = 1.0 - 2.0 * y;
            }
        },
        spec.potential);
}

inline Matrix potential_hessian(const SystemSpec& spec, const Vec& q) {
    Matrix h;
    potential_hessian(spec, q, h);
    return h;
}

/// Canonical equations: qdot_i = p_i / m_i, pdot_i = -dV/dq_i.
inline void hamilton_rhs(const SystemSpec& spec, const PhaseState& state, Vec& qdot, Vec& pdot) {
    detail::check_dim(spec, state.q, "hamilton_rhs");
    detail::check_dim(spec, state.p, "hamilton_rhs");
    qdot.resize(spec.n_dof);
    for (std::size_t i = 0; i < spec.n_dof; ++i) qdot[i] = state.p[i] / spec.masses[i];
    potential_gradient(spec, state.q, pdot);
    for (double& v : pdot) v = -v;
}

inline std::pair<Vec, Vec> hamilton_rhs(const SystemSpec& spec, const PhaseState& state) {
    Vec qdot, pdot;
    hamilton_rhs(spec, state, qdot, pdot);
    return {std::move(qdot), std::move(pdot)};
}

inline double kinetic_energy(const SystemSpec& spec, const PhaseState& state) {
    detail::check_dim(spec, state.p, "kinetic_energy");
    double t = 0.0;
    for (std::size_t i = 0; i < spec.n_dof; ++i) t += state.p[i] * state.p[i] / spec.masses[i];
    return 0.5 * t;
}

/// E = T + V. Single source of truth for the energy used downstream.
inline double total_energy(const SystemSpec& spec, const PhaseState& state) {
    return kinetic_energy(spec, state) + potential_value(spec, state.q);
}

} // namespace geospread
