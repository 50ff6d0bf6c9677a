#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "mfgclaw/errors.hpp"

namespace mfgclaw {

using Vec = std::vector<double>;

inline double dot(const Vec& a, const Vec& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm(const Vec& a) { return std::sqrt(dot(a, a)); }

inline Vec add(const Vec& a, const Vec& b) {
    Vec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
    return r;
}

inline Vec sub(const Vec& a, const Vec& b) {
    Vec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
    return r;
}

inline Vec scale(double c, const Vec& a) {
    Vec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = c * a[i];
    return r;
}

inline bool all_finite(const Vec& a) {
    for (double v : a)
        if (!std::isfinite(v)) return false;
    return true;
}

// Small dense row-major matrix. State dimensions here are tiny (d <= 3 in
// every preset), so a plain Gaussian solve is all we need.
class Mat {
public:
    Mat() = default;
    Mat(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static Mat identity(std::size_t n) {
        Mat m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    Mat operator*(const Mat& o) const {
        Mat r(rows_, o.cols_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t k = 0; k < cols_; ++k) {
                const double a = (*this)(i, k);
                if (a == 0.0) continue;
                for (std::size_t j = 0; j < o.cols_; ++j) r(i, j) += a * o(k, j);
            }
        return r;
    }

    Vec operator*(const Vec& v) const {
        Vec r(rows_, 0.0);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) r[i] += (*this)(i, j) * v[j];
        return r;
    }

    Mat operator+(const Mat& o) const {
        Mat r = *this;
        for (std::size_t i = 0; i < data_.size(); ++i) r.data_[i] += o.data_[i];
        return r;
    }

    Mat scaled(double c) const {
        Mat r = *this;
        for (double& v : r.data_) v *= c;
        return r;
    }

    double max_abs() const {
        double m = 0.0;
        for (double v : data_) m = std::max(m, std::abs(v));
        return m;
    }

    // Solve A x = b by Gaussian elimination with partial pivoting.
    Vec solve(Vec b) const {
        const std::size_t n = rows_;
        Mat a = *this;
        for (std::size_t col = 0; col < n; ++col) {
            std::size_t piv = col;
            for (std::size_t r = col + 1; r < n; ++r)
                if (std::abs(a(r, col)) > std::abs(a(piv, col))) piv = r;
            if (std::abs(a(piv, col)) < 1e-14 * (1.0 + max_abs()))
                throw SingularSensitivity("singular matrix in linear solve");
            if (piv != col) {
                for (std::size_t j = 0; j < n; ++j) std::swap(a(piv, j), a(col, j));
                std::swap(b[piv], b[col]);
            }
            for (std::size_t r = col + 1; r < n; ++r) {
                const double factor = a(r, col) / a(col, col);
                if (factor == 0.0) continue;
                for (std::size_t j = col; j < n; ++j) a(r, j) -= factor * a(col, j);
                b[r] -= factor * b[col];
            }
        }
        Vec x(n, 0.0);
        for (std::size_t i = n; i-- > 0;) {
            double s = b[i];
            for (std::size_t j = i + 1; j < n; ++j) s -= a(i, j) * x[j];
            x[i] = s / a(i, i);
        }
        return x;
    }

    Mat inverse() const {
        const std::size_t n = rows_;
        Mat inv(n, n);
        for (std::size_t col = 0; col < n; ++col) {
            Vec e(n, 0.0);
            e[col] = 1.0;
            Vec x = solve(e);
            for (std::size_t i = 0; i < n; ++i) inv(i, col) = x[i];
        }
        return inv;
    }

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<double> data_;
};

} // namespace mfgclaw
