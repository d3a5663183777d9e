#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "geospread/fft.hpp"
#include "geospread/interp.hpp"
#include "geospread/tangent.hpp"

namespace geospread {

enum class ArcKind { jacobi, eisenhart };
enum class Window { none, hann };

inline double arc_length_of(const TrajectorySample& sample, ArcKind arc) {
    return arc == ArcKind::jacobi ? sample.arc.s_jacobi : sample.arc.s_eisenhart;
}

/// Central finite difference of the arc length with respect to the initial
/// condition at fixed time: [s(t, tau+dtau) - s(t, tau-dtau)] / (2 dtau).
struct DsDtauSeries {
    Vec times;
    Vec ds_dtau;
};

inline DsDtauSeries ds_dtau_fixed_t(const SystemSpec& spec, const PhaseState& initial,
                                    const Direction& direction, const RunConfig& config,
                                    ArcKind arc = ArcKind::jacobi) {
    validate_unit_direction(spec, direction);
    auto offset_state = [&](double eps) {
        PhaseState s = initial;
        for (std::size_t i = 0; i < spec.n_dof; ++i) s.q[i] += eps * direction.dq[i];
        for (std::size_t i = 0; i < spec.n_dof; ++i) s.p[i] += eps * direction.dp[i];
        return s;
    };
    const double h = config.dtau;
    TrajectoryRecord plus = run_trajectory(spec, offset_state(h), config, Integrator::rk4);
    TrajectoryRecord minus = run_trajectory(spec, offset_state(-h), config, Integrator::rk4);
    DsDtauSeries out;
    const std::size_t n = std::min(plus.samples.size(), minus.samples.size());
    out.times.reserve(n);
    out.ds_dtau.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
        out.times.push_back(plus.samples[k].state.t);
        out.ds_dtau.push_back(
            (arc_length_of(plus.samples[k], arc) - arc_length_of(minus.samples[k], arc)) /
            (2.0 * h));
    }
    return out;
}

/// Finite-difference geodesic-spread field: nearby trajectories resampled
/// onto the base run's arc-length grid by monotone cubic interpolation and
/// differenced at fixed s.
struct FdSpreadSeries {
    Vec s;       // arc-length grid (base trajectory)
    Vec times;   // base times mapping the grid back to t
    std::vector<Vec> xi;
};

namespace detail {

/// One interpolant per coordinate of q against the trajectory's arc length.
inline std::vector<CubicSpline> spread_interpolants(const TrajectoryRecord& rec, ArcKind arc,
                                                    std::size_t n_dof, double guard) {
    Vec s;
    s.reserve(rec.samples.size());
    for (const auto& sample : rec.samples) {
        if (arc == ArcKind::jacobi && sample.kinetic < guard)
            throw ConfigError("fd_geodesic_spread: kinetic energy fell below the guard; "
                              "arc length is not invertible");
        s.push_back(arc_length_of(sample, arc));
    }
    for (std::size_t k = 0; k + 1 < s.size(); ++k)
        if (!(s[k + 1] > s[k]))
            throw ConfigError("fd_geodesic_spread: arc length is not strictly increasing");
    std::vector<CubicSpline> interp;
    interp.reserve(n_dof);
    for (std::size_t i = 0; i < n_dof; ++i) {
        Vec qi;
        qi.reserve(rec.samples.size());
        for (const auto& sample : rec.samples) qi.push_back(sample.state.q[i]);
        interp.emplace_back(s, qi);
    }
    return interp;
}

} // namespace detail

inline FdSpreadSeries fd_geodesic_spread(const SystemSpec& spec, const PhaseState& initial,
                                         const Direction& direction, const RunConfig& config,
                                         ArcKind arc = ArcKind::jacobi,
                                         FdScheme scheme = FdScheme::central) {
    validate_unit_direction(spec, direction);
    auto offset_state = [&](double eps) {
        PhaseState s = initial;
        for (std::size_t i = 0; i < spec.n_dof; ++i) s.q[i] += eps * direction.dq[i];
        for (std::size_t i = 0; i < spec.n_dof; ++i) s.p[i] += eps * direction.dp[i];
        return s;
    };
    const double h = config.dtau;
    const double guard = config.resolved_guard(total_energy(spec, initial));

    TrajectoryRecord base = run_trajectory(spec, initial, config, Integrator::rk4);
    TrajectoryRecord plus = run_trajectory(spec, offset_state(h), config, Integrator::rk4);
    auto plus_interp = detail::spread_interpolants(plus, arc, spec.n_dof, guard);

    std::vector<CubicSpline> minus_interp;
    if (scheme == FdScheme::central) {
        TrajectoryRecord minus = run_trajectory(spec, offset_state(-h), config, Integrator::rk4);
        minus_interp = detail::spread_interpolants(minus, arc, spec.n_dof, guard);
    } else {
        for (const auto& sample : base.samples)
            if (arc == ArcKind::jacobi && sample.kinetic < guard)
                throw ConfigError("fd_geodesic_spread: kinetic energy fell below the guard");
    }
    const double denom = scheme == FdScheme::central ? 2.0 * h : h;

    double s_hi = plus_interp.front().x_back();
    if (scheme == FdScheme::central) s_hi = std::min(s_hi, minus_interp.front().x_back());

    FdSpreadSeries out;
    for (const auto& sample : base.samples) {
        const double s = arc_length_of(sample, arc);
        if (s > s_hi) break;
        Vec xi(spec.n_dof);
        for (std::size_t i = 0; i < spec.n_dof; ++i) {
            const double q_plus = plus_interp[i](s);
            const double q_ref =
                scheme == FdScheme::central ? minus_interp[i](s) : sample.state.q[i];
            xi[i] = (q_plus - q_ref) / denom;
        }
        out.s.push_back(s);
        out.times.push_back(sample.state.t);
        out.xi.push_back(std::move(xi));
    }
    return out;
}

/// Per-time certification of the spread identity
///   xi_G = xi_T - qdot (ds/dtau)_t (ds/dt)_tau^{-1},
/// with (ds/dt)_tau = 2T for the Jacobi arc and kappa for the Eisenhart arc.
struct SpreadComparison {
    Vec times;
    Vec s_jacobi;
    std::vector<Vec> xi_t;
    std::vector<Vec> xi_g_fd;
    Vec ds_dtau;
    Vec residuals;
    Vec correction_norm;
    Vec xi_t_norm;
    Vec xi_g_fd_norm;

    double max_residual() const {
        double m = 0.0;
        for (double r : residuals) m = std::max(m, r);
        return m;
    }

    /// Residual of the deliberately wrong identity with xi_G substituted for
    /// xi_T on the right-hand side; reduces to the correction norm over the
    /// tangent norm. Serves as the negative control.
    double max_control_residual(double eps = 1e-12) const {
        double m = 0.0;
        for (std::size_t k = 0; k < residuals.size(); ++k)
            m = std::max(m, correction_norm[k] / std::max(xi_t_norm[k], eps));
        return m;
    }
};

inline SpreadComparison relation_residual(const SystemSpec& spec, const PhaseState& initial,
                                          const Direction& direction, const RunConfig& config,
                                          ArcKind arc = ArcKind::jacobi,
                                          FdScheme scheme = FdScheme::central,
                                          double eps = 1e-12) {
    TrajectoryRecord base = run_trajectory(spec, initial, config, Integrator::rk4);
    auto [xi0, xi_dot0] = tangent_initial_from_direction(spec, direction);
    TangentTrack tangent = integrate_tangent(spec, initial, xi0, xi_dot0, config);
    DsDtauSeries dsd = ds_dtau_fixed_t(spec, initial, direction, config, arc);
    FdSpreadSeries spread = fd_geodesic_spread(spec, initial, direction, config, arc, scheme);

    const std::size_t n = std::min({base.samples.size(), tangent.times.size(),
                                    dsd.times.size(), spread.times.size()});
    SpreadComparison cmp;
    for (std::size_t k = 0; k < n; ++k) {
        const TrajectorySample& sample = base.samples[k];
        const double rate = arc == ArcKind::jacobi ? 2.0 * sample.kinetic : config.kappa;
        Vec corr(spec.n_dof);
        for (std::size_t i = 0; i < spec.n_dof; ++i) {
            const double qdot = sample.state.p[i] / spec.masses[i];
            corr[i] = qdot * dsd.ds_dtau[k] / rate;
        }
        double diff2 = 0.0, corr2 = 0.0;
        for (std::size_t i = 0; i < spec.n_dof; ++i) {
            const double d = spread.xi[k][i] - (tangent.xi[k][i] - corr[i]);
            diff2 += d * d;
            corr2 += corr[i] * corr[i];
        }
        const double xt_norm = norm2(tangent.xi[k]);
        cmp.times.push_back(sample.state.t);
        cmp.s_jacobi.push_back(sample.arc.s_jacobi);
        cmp.xi_t.push_back(tangent.xi[k]);
        cmp.xi_g_fd.push_back(spread.xi[k]);
        cmp.ds_dtau.push_back(dsd.ds_dtau[k]);
        cmp.residuals.push_back(std::sqrt(diff2) / std::max(xt_norm, eps));
        cmp.correction_norm.push_back(std::sqrt(corr2));
        cmp.xi_t_norm.push_back(xt_norm);
        cmp.xi_g_fd_norm.push_back(norm2(spread.xi[k]));
    }
    return cmp;
}

/// Discrete Fourier magnitude spectrum of a uniformly sampled real signal.
struct SpectrumReport {
    Vec frequencies; // angular
    Vec amplitudes;
    double peak_frequency = 0.0;
    bool dc_only = false;
};

inline SpectrumReport spectrum_peak(const Vec& signal, double dt, Window window = Window::none) {
    if (signal.size() < 1024)
        throw ConfigError("spectrum_peak: need at least 1024 samples, got " +
                          std::to_string(signal.size()));
    if (!(dt > 0.0)) throw ConfigError("spectrum_peak: dt must be positive");
    const std::size_t n = signal.size();

    Vec windowed(n);
    double weight = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        double w = 1.0;
        if (window == Window::hann)
            w = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * static_cast<double>(j) /
                                      static_cast<double>(n - 1)));
        windowed[j] = signal[j] * w;
        weight += w;
    }

    const auto spectrum = dft(windowed);
    SpectrumReport report;
    const std::size_t n_half = n / 2;
    report.frequencies.reserve(n_half + 1);
    report.amplitudes.reserve(n_half + 1);
    for (std::size_t k = 0; k <= n_half; ++k) {
        report.frequencies.push_back(2.0 * std::numbers::pi * static_cast<double>(k) /
                                     (static_cast<double>(n) * dt));
        const double mag = std::abs(spectrum[k]);
        report.amplitudes.push_back(k == 0 ? mag / weight : 2.0 * mag / weight);
    }

    std::size_t peak = 1;
    for (std::size_t k = 2; k <= n_half; ++k)
        if (report.amplitudes[k] > report.amplitudes[peak]) peak = k;
    const double floor = 1e-9 * std::max(report.amplitudes[0],
                                         std::numeric_limits<double>::min());
    if (report.amplitudes[peak] <= floor) {
        report.dc_only = true;
        report.peak_frequency = 0.0;
    } else {
        report.peak_frequency = report.frequencies[peak];
    }
    return report;
}

} // namespace geospread
