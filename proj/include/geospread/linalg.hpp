#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace geospread {

using Vec = std::vector<double>;

/// Small dense row-major matrix. All matrices in this library are tiny
/// (Hessians, monodromy blocks), so no effort is spent on blocking.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), a_(rows * cols, fill) {}

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

    void resize(std::size_t rows, std::size_t cols) {
        rows_ = rows;
        cols_ = cols;
        a_.assign(rows * cols, 0.0);
    }

    const std::vector<double>& data() const { return a_; }
    std::vector<double>& data() { return a_; }

    friend Matrix operator*(const Matrix& x, const Matrix& y) {
        Matrix z(x.rows_, y.cols_);
        for (std::size_t i = 0; i < x.rows_; ++i)
            for (std::size_t k = 0; k < x.cols_; ++k) {
                const double xik = x(i, k);
                for (std::size_t j = 0; j < y.cols_; ++j) z(i, j) += xik * y(k, j);
            }
        return z;
    }

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<double> a_;
};

inline double dot(const Vec& x, const Vec& y) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
    return s;
}

inline double norm2(const Vec& x) { return std::sqrt(dot(x, x)); }

/// Euclidean norm of the concatenation (x, y).
inline double norm2_pair(const Vec& x, const Vec& y) {
    return std::sqrt(dot(x, x) + dot(y, y));
}

inline void scale(Vec& x, double a) {
    for (double& v : x) v *= a;
}

inline Vec matvec(const Matrix& m, const Vec& x) {
    Vec y(m.rows(), 0.0);
    for (std::size_t i = 0; i < m.rows(); ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < m.cols(); ++j) s += m(i, j) * x[j];
        y[i] = s;
    }
    return y;
}

inline bool all_finite(const Vec& x) {
    for (double v : x)
        if (!std::isfinite(v)) return false;
    return true;
}

} // namespace geospread
