#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "geospread/errors.hpp"
#include "geospread/linalg.hpp"

namespace geospread {

/// C2 cubic spline with endpoint slopes from one-sided cubic fits. Used for
/// fixed-arc-length resampling: its interpolation error varies smoothly with
/// the knot positions, so the error largely cancels between the two nearby
/// trajectories of a finite difference. A shape-preserving interpolant does
/// not have that property (the slope limiter kinks the error field), which
/// shows up directly as a non-vanishing residual floor.
class CubicSpline {
public:
    CubicSpline() = default;

    CubicSpline(Vec x, Vec y) : x_(std::move(x)), y_(std::move(y)) {
        const std::size_t n = x_.size();
        if (n < 2 || y_.size() != n)
            throw ConfigError("CubicSpline: need at least two knots with matching values");
        for (std::size_t i = 0; i + 1 < n; ++i)
            if (!(x_[i + 1] > x_[i]))
                throw ConfigError("CubicSpline: knots must be strictly increasing");
        m_.resize(n);
        if (n == 2) {
            m_[0] = m_[1] = (y_[1] - y_[0]) / (x_[1] - x_[0]);
            return;
        }
        if (n == 3) {
            for (std::size_t i = 0; i < 3; ++i) m_[i] = quadratic_slope(x_[i]);
            return;
        }
        // complete spline: interior C2 conditions, endpoint slopes from the
        // cubic through the four nearest knots
        const double m_first = cubic_end_slope(0, 1, 2, 3, x_.front());
        const double m_last = cubic_end_slope(n - 1, n - 2, n - 3, n - 4, x_.back());
        Vec diag(n, 1.0), rhs(n, 0.0), sub(n, 0.0), sup(n, 0.0);
        rhs[0] = m_first;
        rhs[n - 1] = m_last;
        for (std::size_t i = 1; i + 1 < n; ++i) {
            const double hl = x_[i] - x_[i - 1];
            const double hr = x_[i + 1] - x_[i];
            const double dl = (y_[i] - y_[i - 1]) / hl;
            const double dr = (y_[i + 1] - y_[i]) / hr;
            sub[i] = 1.0 / hl;
            diag[i] = 2.0 * (1.0 / hl + 1.0 / hr);
            sup[i] = 1.0 / hr;
            rhs[i] = 3.0 * (dl / hl + dr / hr);
        }
        for (std::size_t i = 1; i < n; ++i) { // Thomas sweep
            const double w = sub[i] / diag[i - 1];
            diag[i] -= w * sup[i - 1];
            rhs[i] -= w * rhs[i - 1];
        }
        m_[n - 1] = rhs[n - 1] / diag[n - 1];
        for (std::size_t i = n - 1; i-- > 0;) m_[i] = (rhs[i] - sup[i] * m_[i + 1]) / diag[i];
    }

    double x_front() const { return x_.front(); }
    double x_back() const { return x_.back(); }

    double operator()(double x) const { return eval_hermite(x_, y_, m_, x); }

private:
    double quadratic_slope(double x) const {
        // derivative of the parabola through the three knots
        const double x0 = x_[0], x1 = x_[1], x2 = x_[2];
        const double y0 = y_[0], y1 = y_[1], y2 = y_[2];
        const double d01 = (y1 - y0) / (x1 - x0);
        const double d12 = (y2 - y1) / (x2 - x1);
        const double dd = (d12 - d01) / (x2 - x0);
        return d01 + dd * (2.0 * x - x0 - x1);
    }

    double cubic_end_slope(std::size_t a, std::size_t b, std::size_t c, std::size_t d,
                           double at) const {
        // derivative at `at` of the Newton cubic through four knots
        const double xa = x_[a], xb = x_[b], xc = x_[c], xd = x_[d];
        const double f_ab = (y_[b] - y_[a]) / (xb - xa);
        const double f_bc = (y_[c] - y_[b]) / (xc - xb);
        const double f_cd = (y_[d] - y_[c]) / (xd - xc);
        const double f_abc = (f_bc - f_ab) / (xc - xa);
        const double f_bcd = (f_cd - f_bc) / (xd - xb);
        const double f_abcd = (f_bcd - f_abc) / (xd - xa);
        return f_ab + f_abc * (2.0 * at - xa - xb) +
               f_abcd * ((at - xb) * (at - xc) + (at - xa) * (at - xc) +
                         (at - xa) * (at - xb));
    }

    static double eval_hermite(const Vec& xs, const Vec& ys, const Vec& ms, double x) {
        if (x < xs.front() || x > xs.back())
            throw ConfigError("CubicSpline: evaluation outside the knot range");
        const auto it = std::upper_bound(xs.begin(), xs.end(), x);
        std::size_t i = static_cast<std::size_t>(it - xs.begin());
        if (i == 0) return ys.front();
        if (i >= xs.size()) i = xs.size() - 1;
        --i;
        const double h = xs[i + 1] - xs[i];
        const double t = (x - xs[i]) / h;
        const double t2 = t * t, t3 = t2 * t;
        return (2.0 * t3 - 3.0 * t2 + 1.0) * ys[i] + (t3 - 2.0 * t2 + t) * h * ms[i] +
               (-2.0 * t3 + 3.0 * t2) * ys[i + 1] + (t3 - t2) * h * ms[i + 1];
    }

    Vec x_, y_, m_;
};

/// Shape-preserving cubic Hermite interpolant (Fritsch-Carlson slopes).
/// Interpolates the knot values exactly and never overshoots monotone data.
class MonotoneCubic {
public:
    MonotoneCubic() = default;

    MonotoneCubic(Vec x, Vec y) : x_(std::move(x)), y_(std::move(y)) {
        const std::size_t n = x_.size();
        if (n < 2 || y_.size() != n)
            throw ConfigError("MonotoneCubic: need at least two knots with matching values");
        for (std::size_t i = 0; i + 1 < n; ++i)
            if (!(x_[i + 1] > x_[i]))
                throw ConfigError("MonotoneCubic: knots must be strictly increasing");
        m_.resize(n);
        if (n == 2) {
            m_[0] = m_[1] = (y_[1] - y_[0]) / (x_[1] - x_[0]);
            return;
        }
        Vec h(n - 1), delta(n - 1);
        for (std::size_t i = 0; i + 1 < n; ++i) {
            h[i] = x_[i + 1] - x_[i];
            delta[i] = (y_[i + 1] - y_[i]) / h[i];
        }
        for (std::size_t i = 1; i + 1 < n; ++i) {
            if (delta[i - 1] * delta[i] <= 0.0) {
                m_[i] = 0.0;
            } else {
                // weighted harmonic mean of neighboring secant slopes
                const double w1 = 2.0 * h[i] + h[i - 1];
                const double w2 = h[i] + 2.0 * h[i - 1];
                m_[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
            }
        }
        m_[0] = end_slope(h[0], h[1], delta[0], delta[1]);
        m_[n - 1] = end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
    }

    double x_front() const { return x_.front(); }
    double x_back() const { return x_.back(); }

    double operator()(double x) const {
        if (x < x_.front() || x > x_.back())
            throw ConfigError("MonotoneCubic: evaluation outside the knot range");
        const auto it = std::upper_bound(x_.begin(), x_.end(), x);
        std::size_t i = static_cast<std::size_t>(it - x_.begin());
        if (i == 0) return y_.front();
        if (i >= x_.size()) i = x_.size() - 1;
        --i;
        const double h = x_[i + 1] - x_[i];
        const double t = (x - x_[i]) / h;
        const double t2 = t * t, t3 = t2 * t;
        const double h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        const double h10 = t3 - 2.0 * t2 + t;
        const double h01 = -2.0 * t3 + 3.0 * t2;
        const double h11 = t3 - t2;
        return h00 * y_[i] + h10 * h * m_[i] + h01 * y_[i + 1] + h11 * h * m_[i + 1];
    }

private:
    // three-point end-slope estimate, clipped for shape preservation
    static double end_slope(double h0, double h1, double d0, double d1) {
        double m = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
        if (m * d0 <= 0.0) m = 0.0;
        else if (d0 * d1 <= 0.0 && std::abs(m) > 3.0 * std::abs(d0)) m = 3.0 * d0;
        return m;
    }

    Vec x_, y_, m_;
};

} // namespace geospread
