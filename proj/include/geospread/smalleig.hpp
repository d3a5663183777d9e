#pragma once

#include <cfloat>
#include <cmath>
#include <complex>
#include <vector>

#include "geospread/errors.hpp"
#include "geospread/linalg.hpp"

namespace geospread {
namespace detail {

/// Householder similarity reduction of a square matrix to upper Hessenberg
/// form, in place.
inline void hessenberg_reduce(Matrix& a) {
    const int n = static_cast<int>(a.rows());
    std::vector<double> v(n, 0.0);
    for (int k = 0; k + 2 < n; ++k) {
        double scale = 0.0;
        for (int i = k + 1; i < n; ++i) scale += std::abs(a(i, k));
        if (scale == 0.0) continue;
        double h = 0.0;
        for (int i = k + 1; i < n; ++i) {
            v[i] = a(i, k) / scale;
            h += v[i] * v[i];
        }
        double g = std::sqrt(h);
        if (v[k + 1] > 0.0) g = -g;
        h -= v[k + 1] * g; // now h = |v|^2 - x1 g  (half the squared norm of the reflector)
        v[k + 1] -= g;
        for (int j = 0; j < n; ++j) { // left multiply by P = I - v v^T / h
            double f = 0.0;
            for (int i = k + 1; i < n; ++i) f += v[i] * a(i, j);
            f /= h;
            for (int i = k + 1; i < n; ++i) a(i, j) -= f * v[i];
        }
        for (int i = 0; i < n; ++i) { // right multiply
            double f = 0.0;
            for (int j = k + 1; j < n; ++j) f += a(i, j) * v[j];
            f /= h;
            for (int j = k + 1; j < n; ++j) a(i, j) -= f * v[j];
        }
        a(k + 1, k) = scale * g;
        for (int i = k + 2; i < n; ++i) a(i, k) = 0.0;
    }
}

inline double sign_of(double magnitude, double sign_source) {
    return sign_source >= 0.0 ? std::abs(magnitude) : -std::abs(magnitude);
}

/// Eigenvalues of an upper Hessenberg matrix by the implicit double-shift QR
/// iteration with deflation (the classical Francis algorithm). Destroys a.
inline std::vector<std::complex<double>> hessenberg_eigenvalues(Matrix& a) {
    const int n = static_cast<int>(a.rows());
    std::vector<std::complex<double>> eig(n);
    if (n == 0) return eig;

    double anorm = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = std::max(i - 1, 0); j < n; ++j) anorm += std::abs(a(i, j));
    if (anorm == 0.0) anorm = 1.0;

    const double eps = DBL_EPSILON;
    int hi = n - 1;
    double t_accum = 0.0;
    double p = 0.0, q = 0.0, r = 0.0, x, y, z, w, s, u, v;

    while (hi >= 0) {
        int its = 0;
        int lo;
        do {
            for (lo = hi; lo >= 1; --lo) {
                s = std::abs(a(lo - 1, lo - 1)) + std::abs(a(lo, lo));
                if (s == 0.0) s = anorm;
                if (std::abs(a(lo, lo - 1)) <= eps * s) {
                    a(lo, lo - 1) = 0.0;
                    break;
                }
            }
            x = a(hi, hi);
            if (lo == hi) { // one real eigenvalue
                eig[hi--] = x + t_accum;
            } else {
                y = a(hi - 1, hi - 1);
                w = a(hi, hi - 1) * a(hi - 1, hi);
                if (lo == hi - 1) { // a 2x2 block
                    p = 0.5 * (y - x);
                    q = p * p + w;
                    z = std::sqrt(std::abs(q));
                    x += t_accum;
                    if (q >= 0.0) { // real pair
                        z = p + sign_of(z, p);
                        eig[hi - 1] = eig[hi] = x + z;
                        if (z != 0.0) eig[hi] = x - w / z;
                    } else { // complex conjugate pair
                        eig[hi - 1] = std::complex<double>(x + p, z);
                        eig[hi] = std::conj(eig[hi - 1]);
                    }
                    hi -= 2;
                } else {
                    if (its == 50)
                        throw NumericalError("eigenvalues: QR iteration did not converge");
                    if (its == 10 || its == 20 || its == 30 || its == 40) {
                        // exceptional shift
                        t_accum += x;
                        for (int i = 0; i <= hi; ++i) a(i, i) -= x;
                        s = std::abs(a(hi, hi - 1)) + std::abs(a(hi - 1, hi - 2));
                        y = x = 0.75 * s;
                        w = -0.4375 * s * s;
                    }
                    ++its;
                    int m;
                    for (m = hi - 2; m >= lo; --m) { // look for two consecutive small subdiagonals
                        z = a(m, m);
                        r = x - z;
                        s = y - z;
                        p = (r * s - w) / a(m + 1, m) + a(m, m + 1);
                        q = a(m + 1, m + 1) - z - r - s;
                        r = a(m + 2, m + 1);
                        s = std::abs(p) + std::abs(q) + std::abs(r);
                        p /= s;
                        q /= s;
                        r /= s;
                        if (m == lo) break;
                        u = std::abs(a(m, m - 1)) * (std::abs(q) + std::abs(r));
                        v = std::abs(p) *
                            (std::abs(a(m - 1, m - 1)) + std::abs(z) + std::abs(a(m + 1, m + 1)));
                        if (u <= eps * v) break;
                    }
                    for (int i = m + 2; i <= hi; ++i) {
                        a(i, i - 2) = 0.0;
                        if (i != m + 2) a(i, i - 3) = 0.0;
                    }
                    for (int k = m; k <= hi - 1; ++k) { // double QR sweep over the block
                        if (k != m) {
                            p = a(k, k - 1);
                            q = a(k + 1, k - 1);
                            r = (k != hi - 1) ? a(k + 2, k - 1) : 0.0;
                            x = std::abs(p) + std::abs(q) + std::abs(r);
                            if (x != 0.0) {
                                p /= x;
                                q /= x;
                                r /= x;
                            }
                        }
                        s = sign_of(std::sqrt(p * p + q * q + r * r), p);
                        if (s != 0.0) {
                            if (k == m) {
                                if (lo != m) a(k, k - 1) = -a(k, k - 1);
                            } else {
                                a(k, k - 1) = -s * x;
                            }
                            p += s;
                            x = p / s;
                            y = q / s;
                            z = r / s;
                            q /= p;
                            r /= p;
                            for (int j = k; j <= hi; ++j) { // row modification
                                p = a(k, j) + q * a(k + 1, j);
                                if (k != hi - 1) {
                                    p += r * a(k + 2, j);
                                    a(k + 2, j) -= p * z;
                                }
                                a(k + 1, j) -= p * y;
                                a(k, j) -= p * x;
                            }
                            const int mmin = hi < k + 3 ? hi : k + 3;
                            for (int i = lo; i <= mmin; ++i) { // column modification
                                p = x * a(i, k) + y * a(i, k + 1);
                                if (k != hi - 1) {
                                    p += z * a(i, k + 2);
                                    a(i, k + 2) -= p * r;
                                }
                                a(i, k + 1) -= p * q;
                                a(i, k) -= p;
                            }
                        }
                    }
                }
            }
        } while (lo < hi - 1);
    }
    return eig;
}

} // namespace detail

/// Eigenvalues of a real dense square matrix.
inline std::vector<std::complex<double>> eigenvalues(Matrix a) {
    if (a.rows() != a.cols()) throw ConfigError("eigenvalues: matrix must be square");
    detail::hessenberg_reduce(a);
    return detail::hessenberg_eigenvalues(a);
}

} // namespace geospread
