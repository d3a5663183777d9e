#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "geospread/integrate.hpp"
#include "test_oracles.hpp"

using namespace geospread;
using Catch::Approx;

namespace {
const double pi = std::numbers::pi;
}

TEST_CASE("verlet step against the analytic oscillator") {
    auto spec = make_harmonic({1.0});
    PhaseState s{0.0, {1.0}, {0.0}};
    PhaseState next = verlet_step(spec, s, 0.01);
    CHECK(next.q[0] == Approx(std::cos(0.01)).margin(1e-8));
    CHECK(next.p[0] == Approx(-std::sin(0.01)).margin(1e-8));
}

TEST_CASE("verlet step on a free particle is exact") {
    auto spec = make_quadratic(1, 0.0);
    PhaseState s{0.0, {0.0}, {1.0}};
    PhaseState next = verlet_step(spec, s, 0.5);
    CHECK(next.q[0] == 0.5);
    CHECK(next.p[0] == 1.0);
}

TEST_CASE("verlet step with dt = 0 is the identity") {
    auto spec = make_harmonic({1.0});
    PhaseState s{0.0, {0.3}, {-0.2}};
    PhaseState next = verlet_step(spec, s, 0.0);
    CHECK(next.q[0] == s.q[0]);
    CHECK(next.p[0] == s.p[0]);
}

TEST_CASE("rk4 augmented step with empty aux matches the analytic flow") {
    auto spec = make_harmonic({1.0});
    PhaseState s{0.0, {1.0}, {0.0}};
    auto [next, aux] = rk4_augmented_step(
        spec, s, Vec{}, [](const PhaseState&, const Vec&, Vec&) {}, 0.01);
    CHECK(aux.empty());
    CHECK(next.q[0] == Approx(std::cos(0.01)).margin(1e-12));
}

TEST_CASE("rk4 augmented step leaves aux constant when its derivative is zero") {
    auto spec = make_harmonic({1.0});
    PhaseState s{0.0, {0.5}, {0.5}};
    Vec aux{1.0, -2.0};
    auto [next, aux2] = rk4_augmented_step(
        spec, s, aux,
        [](const PhaseState&, const Vec&, Vec& d) { d.assign(2, 0.0); }, 0.1);
    CHECK(aux2[0] == 1.0);
    CHECK(aux2[1] == -2.0);
}

TEST_CASE("rk4 augmented oscillator aux stays on the unit circle") {
    // base frozen at the equilibrium, aux obeying xi'' = -xi
    auto spec = make_harmonic({1.0});
    PhaseState s{0.0, {0.0}, {0.0}};
    Vec aux{1.0, 0.0};
    const double dt = 0.01;
    const auto n = static_cast<std::size_t>(std::llround(2.0 * pi / dt));
    for (std::size_t k = 0; k < n; ++k) {
        auto [next, aux2] = rk4_augmented_step(
            spec, s, aux,
            [](const PhaseState&, const Vec& a, Vec& d) {
                d.resize(2);
                d[0] = a[1];
                d[1] = -a[0];
            },
            dt);
        s = next;
        aux = aux2;
    }
    CHECK(std::abs(std::hypot(aux[0], aux[1]) - 1.0) < 1e-10);
}

TEST_CASE("arc accumulation matches the analytic harmonic arc length") {
    // q = cos t: s_jacobi(2 pi) = integral of 2T = pi for amplitude 1
    auto spec = make_harmonic({1.0});
    RunConfig cfg;
    cfg.dt = 1e-3;
    cfg.t_max = 2.0 * pi;
    cfg.record_stride = 100;
    auto rec = run_trajectory(spec, {0.0, {1.0}, {0.0}}, cfg);
    CHECK(rec.samples.back().arc.s_jacobi == Approx(pi).margin(1e-4));
}

TEST_CASE("arc accumulator unit updates") {
    ArcAccumulator acc;
    acc = accumulate_arc(acc, 0.0, 0.0, -1.0, -1.0, 0.25, 1.0);
    CHECK(acc.s_jacobi == 0.0);               // T = 0 throughout
    CHECK(acc.s_eisenhart == Approx(0.25));   // kappa dt exactly
    CHECK(acc.q_extra == Approx(0.25 / 2.0 + 0.25));
    CHECK_THROWS_AS(accumulate_arc(acc, -0.1, 0.0, 0.0, 0.0, 0.1, 1.0), ConfigError);
}

TEST_CASE("run_trajectory matches the analytic solution at t = 10") {
    auto spec = make_harmonic({1.0});
    RunConfig cfg;
    cfg.dt = 1e-3;
    cfg.t_max = 10.0;
    cfg.record_stride = 1000;
    auto rec = run_trajectory(spec, {0.0, {1.0}, {0.0}}, cfg);
    CHECK(rec.samples.back().state.q[0] == Approx(std::cos(10.0)).margin(1e-6));
}

TEST_CASE("run_trajectory with t_max = 0 returns only the initial sample") {
    auto spec = make_harmonic({1.0});
    RunConfig cfg;
    cfg.t_max = 0.0;
    auto rec = run_trajectory(spec, {0.0, {1.0}, {0.0}}, cfg);
    REQUIRE(rec.samples.size() == 1);
    CHECK(rec.samples[0].state.t == 0.0);
}

TEST_CASE("long Henon-Heiles run has no secular energy drift") {
    auto spec = make_henon_heiles();
    // E = 1/12 regular orbit
    Vec q{0.0, 0.1};
    const double v = potential_value(spec, q);
    PhaseState init{0.0, q, {std::sqrt(2.0 * (1.0 / 12.0 - v)), 0.0}};
    RunConfig cfg;
    cfg.dt = 1e-3;
    cfg.t_max = 1000.0;
    cfg.record_stride = 1000;
    auto rec = run_trajectory(spec, init, cfg);
    CHECK(rec.secular_energy_drift < 1e-8);
    // the half-step rerun agrees and its bounded oscillation shrinks ~4x
    RunConfig half = cfg;
    half.dt = 5e-4;
    auto rec2 = run_trajectory(spec, init, half);
    CHECK(rec2.secular_energy_drift < 1e-8);
    CHECK(rec2.max_energy_deviation < rec.max_energy_deviation);
}

TEST_CASE("symplectic check over one million verlet steps") {
    auto spec = make_harmonic({1.0});
    RunConfig cfg;
    cfg.dt = 1e-3;
    cfg.t_max = 1000.0;
    cfg.record_stride = 10000;
    auto rec = run_trajectory(spec, {0.0, {1.0}, {0.0}}, cfg);
    CHECK(rec.secular_energy_drift < 1e-8);
    CHECK(rec.max_energy_deviation < 1e-6); // bounded O(dt^2) oscillation
}

TEST_CASE("step halving: verlet error shrinks ~4x, rk4 ~16x") {
    auto spec = make_harmonic({1.0});
    PhaseState init{0.0, {1.0}, {0.0}};
    auto final_error = [&](double dt, Integrator integ) {
        RunConfig cfg;
        cfg.dt = dt;
        cfg.t_max = 10.0;
        cfg.record_stride = 1u << 30;
        auto rec = run_trajectory(spec, init, cfg, integ);
        const auto& last = rec.samples.back();
        return std::hypot(last.state.q[0] - std::cos(last.state.t),
                          last.state.p[0] + std::sin(last.state.t));
    };
    const double v1 = final_error(2e-3, Integrator::verlet);
    const double v2 = final_error(1e-3, Integrator::verlet);
    CHECK(v1 / v2 == Approx(4.0).epsilon(0.15));
    const double r1 = final_error(2e-2, Integrator::rk4);
    const double r2 = final_error(1e-2, Integrator::rk4);
    CHECK(r1 / r2 == Approx(16.0).epsilon(0.15));
}

TEST_CASE("s_jacobi is non-decreasing on recorded trajectories") {
    std::vector<SystemSpec> catalog;
    catalog.push_back(make_harmonic({1.0, 2.0}));
    catalog.push_back(make_henon_heiles());
    catalog.push_back(make_anharmonic_chain(3, 1.0, 1.0));
    std::mt19937_64 gen(5);
    for (const auto& spec : catalog) {
        PhaseState init{0.0, testing_oracles::random_vec(gen, spec.n_dof, -0.3, 0.3),
                        testing_oracles::random_vec(gen, spec.n_dof, -0.3, 0.3)};
        RunConfig cfg;
        cfg.dt = 1e-3;
        cfg.t_max = 20.0;
        cfg.record_stride = 10;
        auto rec = run_trajectory(spec, init, cfg);
        for (std::size_t k = 1; k < rec.samples.size(); ++k) {
            CHECK(rec.samples[k].arc.s_jacobi >= rec.samples[k - 1].arc.s_jacobi);
            CHECK(rec.samples[k].state.t > rec.samples[k - 1].state.t);
        }
        // E is exactly T + V everywhere (single source of truth)
        for (const auto& s : rec.samples) {
            CHECK(s.energy == s.kinetic + s.potential);
            CHECK(s.kinetic == kinetic_energy(spec, s.state));
            CHECK(s.potential == potential_value(spec, s.state.q));
        }
    }
}

TEST_CASE("eisenhart affineness holds on every recorded sample") {
    auto spec = make_harmonic({1.0, 2.0});
    RunConfig cfg;
    cfg.dt = 1e-3;
    cfg.t_max = 100.0;
    cfg.record_stride = 10;
    auto rec = run_trajectory(spec, {0.0, {1.0, 0.0}, {0.0, 1.0}}, cfg);
    for (const auto& s : rec.samples) {
        const double qdot_extra = cfg.kappa * cfg.kappa / 2.0 - (s.kinetic - s.potential);
        const double val = -2.0 * s.potential + 2.0 * s.kinetic + 2.0 * qdot_extra;
        CHECK(std::abs(val / (cfg.kappa * cfg.kappa) - 1.0) < 1e-8);
    }
}

TEST_CASE("trapezoid accumulator is consistent with differenced q_extra at stride 1") {
    auto spec = make_henon_heiles();
    Vec q{0.0, 0.1};
    const double v = potential_value(spec, q);
    PhaseState init{0.0, q, {std::sqrt(2.0 * (1.0 / 12.0 - v)), 0.0}};
    RunConfig cfg;
    cfg.dt = 1e-3;
    cfg.t_max = 10.0;
    cfg.record_stride = 1;
    auto rec = run_trajectory(spec, init, cfg);
    for (std::size_t k = 0; k + 1 < rec.samples.size(); ++k) {
        const auto& a = rec.samples[k];
        const auto& b = rec.samples[k + 1];
        const double dq = (b.arc.q_extra - a.arc.q_extra) / (b.state.t - a.state.t);
        const double lbar = 0.5 * ((a.kinetic - a.potential) + (b.kinetic - b.potential));
        CHECK(dq == Approx(cfg.kappa * cfg.kappa / 2.0 - lbar).margin(1e-10));
    }
}

TEST_CASE("energy warning flags runs beyond the declared tolerance") {
    auto spec = make_harmonic({1.0});
    RunConfig cfg;
    cfg.dt = 0.1; // coarse step: bounded energy oscillation ~2.5e-3
    cfg.t_max = 10.0;
    cfg.energy_tol = 1e-6;
    auto rec = run_trajectory(spec, {0.0, {1.0}, {0.0}}, cfg);
    CHECK(rec.energy_warning);
    cfg.energy_tol = 1.0;
    auto rec2 = run_trajectory(spec, {0.0, {1.0}, {0.0}}, cfg);
    CHECK_FALSE(rec2.energy_warning);
}

TEST_CASE("anharmonic chain conserves energy and accumulates arc length") {
    auto spec = make_anharmonic_chain(8, 1.0, 1.0);
    std::mt19937_64 gen(17);
    PhaseState init{0.0, testing_oracles::random_vec(gen, 8, -0.4, 0.4),
                    testing_oracles::random_vec(gen, 8, -0.4, 0.4)};
    RunConfig cfg;
    cfg.dt = 1e-3;
    cfg.t_max = 200.0;
    cfg.record_stride = 100;
    auto rec = run_trajectory(spec, init, cfg);
    CHECK(rec.secular_energy_drift < 1e-8);
    CHECK(rec.max_energy_deviation < 1e-5);
    CHECK(rec.samples.back().arc.s_jacobi > 0.0);
}

TEST_CASE("numerical blowup raises an error carrying the time") {
    // inverted potential: the trajectory escapes and overflows
    auto spec = make_quadratic(1, -4.0);
    RunConfig cfg;
    cfg.dt = 0.1;
    cfg.t_max = 1000.0;
    cfg.record_stride = 100;
    cfg.energy_tol = 1e100;
    try {
        run_trajectory(spec, {0.0, {1.0}, {1.0}}, cfg);
        FAIL("expected NumericalError");
    } catch (const NumericalError& e) {
        CHECK(std::isfinite(e.at_time()));
        CHECK(e.at_time() > 0.0);
    }
}

TEST_CASE("run config validation") {
    RunConfig cfg;
    cfg.dt = -1.0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = RunConfig{};
    cfg.record_stride = 0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = RunConfig{};
    cfg.t_min_guard = -0.5;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
}
