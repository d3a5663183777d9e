#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "geospread/errors.hpp"
#include "geospread/linalg.hpp"

namespace geospread {
namespace detail {

inline bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

/// In-place iterative radix-2 Cooley-Tukey transform (power-of-two length).
inline void fft_radix2(std::vector<std::complex<double>>& x) {
    const std::size_t n = x.size();
    for (std::size_t i = 1, j = 0; i < n; ++i) { // bit-reversal permutation
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(x[i], x[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = -2.0 * std::numbers::pi / static_cast<double>(len);
        const std::complex<double> wl(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                const std::complex<double> u = x[i + k];
                const std::complex<double> v = x[i + k + len / 2] * w;
                x[i + k] = u + v;
                x[i + k + len / 2] = u - v;
                w *= wl;
            }
        }
    }
}

/// Direct O(n^2) transform for lengths that are not powers of two.
inline std::vector<std::complex<double>> dft_direct(const std::vector<std::complex<double>>& x) {
    const std::size_t n = x.size();
    std::vector<std::complex<double>> out(n);
    for (std::size_t k = 0; k < n; ++k) {
        std::complex<double> s(0.0, 0.0);
        for (std::size_t j = 0; j < n; ++j) {
            const double ang =
                -2.0 * std::numbers::pi * static_cast<double>(k) * static_cast<double>(j) /
                static_cast<double>(n);
            s += x[j] * std::complex<double>(std::cos(ang), std::sin(ang));
        }
        out[k] = s;
    }
    return out;
}

} // namespace detail

/// Forward discrete Fourier transform of a real sequence.
inline std::vector<std::complex<double>> dft(const Vec& signal) {
    std::vector<std::complex<double>> x(signal.begin(), signal.end());
    if (detail::is_power_of_two(x.size())) {
        detail::fft_radix2(x);
        return x;
    }
    return detail::dft_direct(x);
}

} // namespace geospread
