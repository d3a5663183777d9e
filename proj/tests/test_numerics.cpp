#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "geospread/fft.hpp"
#include "geospread/interp.hpp"
#include "geospread/smalleig.hpp"

using namespace geospread;
using Catch::Approx;

namespace {

struct EigFixture {
    Matrix m;
    std::vector<std::complex<double>> expected; // sorted by (re, im)
};

std::vector<std::complex<double>> sorted(std::vector<std::complex<double>> v) {
    std::sort(v.begin(), v.end(), [](auto a, auto b) {
        return std::make_pair(a.real(), a.imag()) < std::make_pair(b.real(), b.imag());
    });
    return v;
}

// reference eigenvalues below were computed independently with LAPACK
// (numpy.linalg.eigvals) and frozen
std::vector<EigFixture> eig_fixtures() {
    std::vector<EigFixture> fixtures;
    {
        Matrix m(4, 4);
        const double rows[4][4] = {
            {-1.6038368053963015, 0.064099914003764108, 0.74089129587672586, 0.15261919356565307},
            {0.86374389132333185, 2.9130992225039711, -1.4788233606644015, 0.94547297464585989},
            {-1.6661354573179643, 0.34374458145267967, -0.51244370928485772, 1.3237589566885721},
            {-0.86028019358502328, 0.51949319901836011, -1.2651437175495219, -2.1591390112963427}};
        for (std::size_t i = 0; i < 4; ++i)
            for (std::size_t j = 0; j < 4; ++j) m(i, j) = rows[i][j];
        fixtures.push_back({m,
                            {{-2.1199907200312413, 0},
                             {-1.0428871790007301, -1.5453782930429107},
                             {-1.0428871790007301, 1.5453782930429107},
                             {2.8434447745591753, 0}}});
    }
    {
        Matrix m(6, 6);
        const double rows[6][6] = {
            {1.304201849975172, 5.1998679598377056, 1.5604024687065605, -3.0064973812633204,
             0.80503662117640729, 2.3015241014402883},
            {3.5738160803599719, -3.4722324218908449, 2.0888381857666269, 1.0541510573763888,
             -0.097245249033772851, 0.039544737356219169},
            {-2.0377499090853384, -1.861596082580188, 3.9936426497037898, 0.77651553830302367,
             -1.444451751358822, -7.4753688548947537},
            {-2.6296913222099585, -1.5165273824605825, -3.84938750985186, -3.9909852749381449,
             2.4779777531373464, -0.74164504428003419},
            {-5.0991183483890232, -4.005458598314072, -0.89891666872089626, 3.3444206955351872,
             -4.5192265397224878, 4.7703362264449032},
            {-1.4619755300667088, -5.1333065612679611, 1.5392706436486725, 4.3112757545661093,
             -0.66541232761938618, 1.9464495048728443}};
        for (std::size_t i = 0; i < 6; ++i)
            for (std::size_t j = 0; j < 6; ++j) m(i, j) = rows[i][j];
        fixtures.push_back({m,
                            {{-5.8940151575841995, -2.0237578777715752},
                             {-5.8940151575841995, 2.0237578777715752},
                             {-2.9991644441773921, 0},
                             {1.3736079358418063, -5.4318850025012502},
                             {1.3736079358418063, 5.4318850025012502},
                             {7.3018286556625025, 0}}});
    }
    {
        // companion matrix of (x-1)(x-2)(x+3)(x^2+4)
        Matrix m(5, 5);
        const double rows[5][5] = {{0, 0, 0, 0, -24},
                                   {1, 0, 0, 0, 28},
                                   {0, 1, 0, 0, -6},
                                   {0, 0, 1, 0, 3},
                                   {0, 0, 0, 1, 0}};
        for (std::size_t i = 0; i < 5; ++i)
            for (std::size_t j = 0; j < 5; ++j) m(i, j) = rows[i][j];
        fixtures.push_back({m,
                            {{-3.0000000000000009, 0},
                             {-5.5511151231257827e-16, -1.9999999999999996},
                             {-5.5511151231257827e-16, 1.9999999999999996},
                             {0.99999999999999878, 0},
                             {2, 0}}});
    }
    {
        // widely separated scales
        Matrix m(3, 3);
        const double rows[3][3] = {
            {-0.03178811946054081, -0.0010978255182129315, 0.16654165038518934},
            {0.089578643425740331, 0.87973988116663782, 0.27996271147006396},
            {-0.10211962469348412, 0.084810699679840063, 1000000.0498082605}};
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t j = 0; j < 3; ++j) m(i, j) = rows[i][j];
        fixtures.push_back({m,
                            {{-0.031680201579891043, 0},
                             {0.87963195654189053, 0},
                             {1000000.049808268, 0}}});
    }
    return fixtures;
}

} // namespace

TEST_CASE("eigenvalues match frozen LAPACK references") {
    for (const auto& fixture : eig_fixtures()) {
        const auto got = sorted(eigenvalues(fixture.m));
        double scale = 0.0;
        for (const auto& row : fixture.m.data()) scale = std::max(scale, std::abs(row));
        REQUIRE(got.size() == fixture.expected.size());
        for (std::size_t i = 0; i < got.size(); ++i)
            CHECK(std::abs(got[i] - fixture.expected[i]) <= 1e-10 * std::max(1.0, scale));
    }
}

TEST_CASE("eigenvalues of structured matrices") {
    // diagonal
    Matrix d(3, 3);
    d(0, 0) = 3.0;
    d(1, 1) = -1.0;
    d(2, 2) = 0.5;
    auto ev = sorted(eigenvalues(d));
    CHECK(ev[0].real() == Approx(-1.0));
    CHECK(ev[1].real() == Approx(0.5));
    CHECK(ev[2].real() == Approx(3.0));

    // rotation: complex pair on the unit circle
    const double th = 0.7;
    Matrix r(2, 2);
    r(0, 0) = std::cos(th);
    r(0, 1) = -std::sin(th);
    r(1, 0) = std::sin(th);
    r(1, 1) = std::cos(th);
    auto evr = eigenvalues(r);
    CHECK(std::abs(evr[0]) == Approx(1.0).margin(1e-14));
    CHECK(std::abs(std::abs(evr[0].imag()) - std::sin(th)) < 1e-14);

    // defective Jordan block
    Matrix j(3, 3);
    for (int i = 0; i < 3; ++i) j(i, i) = 2.0;
    j(0, 1) = 1.0;
    j(1, 2) = 1.0;
    for (const auto& z : eigenvalues(j)) CHECK(std::abs(z - 2.0) < 1e-5);

    // near-identity: eigenvalues stay within the perturbation norm
    Matrix ni = Matrix::identity(4);
    ni(0, 1) = 1e-11;
    ni(2, 3) = -2e-11;
    ni(1, 0) = 3e-12;
    for (const auto& z : eigenvalues(ni)) CHECK(std::abs(std::abs(z) - 1.0) < 1e-10);
}

TEST_CASE("eigenvalue sums and products match trace and determinant") {
    std::mt19937_64 gen(321);
    auto u = [&]() { return -1.0 + 2.0 * static_cast<double>(gen() >> 11) * 0x1.0p-53; };
    for (int trial = 0; trial < 20; ++trial) {
        Matrix m(4, 4);
        for (std::size_t i = 0; i < 4; ++i)
            for (std::size_t j = 0; j < 4; ++j) m(i, j) = u();
        double trace = 0.0;
        for (std::size_t i = 0; i < 4; ++i) trace += m(i, i);
        const auto ev = eigenvalues(m);
        std::complex<double> sum = 0.0;
        for (const auto& z : ev) sum += z;
        CHECK(sum.real() == Approx(trace).margin(1e-10));
        CHECK(sum.imag() == Approx(0.0).margin(1e-10));
    }
}

TEST_CASE("fft matches the direct transform") {
    std::mt19937_64 gen(555);
    auto u = [&]() { return -1.0 + 2.0 * static_cast<double>(gen() >> 11) * 0x1.0p-53; };
    Vec signal(1024);
    for (double& v : signal) v = u();
    const auto fast = dft(signal);
    std::vector<std::complex<double>> x(signal.begin(), signal.end());
    const auto slow = detail::dft_direct(x);
    double worst = 0.0;
    for (std::size_t k = 0; k < signal.size(); ++k) worst = std::max(worst, std::abs(fast[k] - slow[k]));
    CHECK(worst < 1e-9);
}

TEST_CASE("fft of a pure tone concentrates on one bin") {
    const std::size_t n = 2048;
    Vec signal(n);
    for (std::size_t j = 0; j < n; ++j)
        signal[j] = std::sin(2.0 * std::numbers::pi * 17.0 * static_cast<double>(j) /
                             static_cast<double>(n));
    const auto spectrum = dft(signal);
    std::size_t peak = 1;
    for (std::size_t k = 2; k < n / 2; ++k)
        if (std::abs(spectrum[k]) > std::abs(spectrum[peak])) peak = k;
    CHECK(peak == 17);
    CHECK(std::abs(spectrum[17]) == Approx(n / 2.0).epsilon(1e-10));
}

TEST_CASE("monotone cubic interpolates knots and preserves monotonicity") {
    Vec x{0.0, 0.5, 1.2, 2.0, 3.5};
    Vec y{0.0, 1.0, 1.1, 4.0, 4.2};
    MonotoneCubic interp(x, y);
    for (std::size_t i = 0; i < x.size(); ++i) CHECK(interp(x[i]) == y[i]);
    double prev = interp(0.0);
    for (double t = 0.0; t <= 3.5; t += 0.01) {
        const double v = interp(std::min(t, 3.5));
        CHECK(v >= prev - 1e-12); // no overshoot on monotone data
        prev = v;
    }
    CHECK_THROWS_AS(interp(-0.1), ConfigError);
    CHECK_THROWS_AS(interp(3.6), ConfigError);
}

TEST_CASE("monotone cubic converges on a smooth function") {
    auto build = [](std::size_t n) {
        Vec x(n), y(n);
        for (std::size_t i = 0; i < n; ++i) {
            x[i] = static_cast<double>(i) / static_cast<double>(n - 1) * 3.0;
            y[i] = std::sin(x[i]);
        }
        return MonotoneCubic(x, y);
    };
    auto max_err = [&](std::size_t n) {
        auto interp = build(n);
        double err = 0.0;
        for (double t = 0.0; t <= 3.0; t += 0.001)
            err = std::max(err, std::abs(interp(t) - std::sin(t)));
        return err;
    };
    const double e1 = max_err(51);
    const double e2 = max_err(101);
    // the slope limiter costs an order at the extremum of sin, so the
    // global rate is quadratic
    CHECK(e1 < 5e-4);
    CHECK(e2 < e1 / 2.0);
}

TEST_CASE("monotone cubic rejects bad knots") {
    CHECK_THROWS_AS(MonotoneCubic(Vec{0.0}, Vec{1.0}), ConfigError);
    CHECK_THROWS_AS(MonotoneCubic(Vec{0.0, 0.0, 1.0}, Vec{1.0, 2.0, 3.0}), ConfigError);
}

TEST_CASE("cubic spline interpolates knots and reproduces cubics exactly") {
    Vec x{0.0, 0.4, 1.1, 1.9, 2.5, 3.3};
    auto poly = [](double t) { return 2.0 - t + 0.5 * t * t - 0.25 * t * t * t; };
    Vec y;
    for (double t : x) y.push_back(poly(t));
    CubicSpline spline(x, y);
    for (std::size_t i = 0; i < x.size(); ++i) CHECK(spline(x[i]) == Approx(y[i]).margin(1e-14));
    for (double t = 0.0; t <= 3.3; t += 0.01)
        CHECK(spline(t) == Approx(poly(t)).margin(1e-12));
    CHECK_THROWS_AS(spline(-0.01), ConfigError);
}

TEST_CASE("cubic spline converges at fourth order on a smooth function") {
    auto max_err = [](std::size_t n) {
        Vec x(n), y(n);
        for (std::size_t i = 0; i < n; ++i) {
            x[i] = static_cast<double>(i) / static_cast<double>(n - 1) * 3.0;
            y[i] = std::sin(x[i]);
        }
        CubicSpline spline(x, y);
        double err = 0.0;
        for (double t = 0.0; t <= 3.0; t += 0.001)
            err = std::max(err, std::abs(spline(t) - std::sin(t)));
        return err;
    };
    const double e1 = max_err(51);
    const double e2 = max_err(101);
    CHECK(e1 < 2e-7);
    CHECK(e1 / e2 == Approx(16.0).epsilon(0.3));
}
