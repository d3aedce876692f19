#pragma once

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <vector>

#include "volnmf/errors.hpp"

namespace volnmf {

/// Dense real matrix, row-major, double precision. The single carrier type
/// for observations X, basis M, coefficients H and the small Gram matrices
/// derived from them. Value semantics throughout; all operations on it are
/// free functions returning fresh values.
class Matrix {
  public:
    Matrix() = default;

    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
        : rows_(rows), cols_(cols), data_(std::move(data)) {
        if (rows_ * cols_ != data_.size())
            throw ShapeMismatch("matrix data length does not match rows*cols");
    }

    /// Row-major brace construction: Matrix{{1,2},{3,4}}.
    Matrix(std::initializer_list<std::initializer_list<double>> rows) {
        rows_ = rows.size();
        cols_ = rows_ == 0 ? 0 : rows.begin()->size();
        data_.reserve(rows_ * cols_);
        for (const auto& r : rows) {
            if (r.size() != cols_)
                throw ShapeMismatch("ragged initializer for Matrix");
            data_.insert(data_.end(), r.begin(), r.end());
        }
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }

    const std::vector<double>& values() const { return data_; }

    /// Pointer to the start of row i (rows are contiguous).
    double* row(std::size_t i) { return data_.data() + i * cols_; }
    const double* row(std::size_t i) const { return data_.data() + i * cols_; }

    bool same_shape(const Matrix& o) const { return rows_ == o.rows_ && cols_ == o.cols_; }

    bool operator==(const Matrix& o) const {
        return rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
    }

  private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

inline Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

inline bool all_finite(const Matrix& a) {
    for (double v : a.values())
        if (!std::isfinite(v)) return false;
    return true;
}

inline Matrix transpose(const Matrix& a) {
    Matrix t(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j)
            t(j, i) = a(i, j);
    return t;
}

/// c = a * b. Loop order i-k-j keeps the inner loop contiguous for both
/// operands; summation order is fixed so repeated runs are bit-identical.
inline Matrix multiply(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows())
        throw ShapeMismatch("multiply: inner dimensions disagree");
    Matrix c(a.rows(), b.cols());
    const std::size_t n = a.cols(), p = b.cols();
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double* ci = c.row(i);
        const double* ai = a.row(i);
        for (std::size_t k = 0; k < n; ++k) {
            const double aik = ai[k];
            if (aik == 0.0) continue;
            const double* bk = b.row(k);
            for (std::size_t j = 0; j < p; ++j) ci[j] += aik * bk[j];
        }
    }
    return c;
}

/// a' * a without forming the transpose.
inline Matrix gram_of_columns(const Matrix& a) {
    Matrix g(a.cols(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        const double* r = a.row(i);
        for (std::size_t p = 0; p < a.cols(); ++p)
            for (std::size_t q = 0; q < a.cols(); ++q)
                g(p, q) += r[p] * r[q];
    }
    return g;
}

/// a * a' without forming the transpose.
inline Matrix gram_of_rows(const Matrix& a) {
    Matrix g(a.rows(), a.rows());
    for (std::size_t p = 0; p < a.rows(); ++p)
        for (std::size_t q = p; q < a.rows(); ++q) {
            double s = 0.0;
            const double* rp = a.row(p);
            const double* rq = a.row(q);
            for (std::size_t j = 0; j < a.cols(); ++j) s += rp[j] * rq[j];
            g(p, q) = s;
            g(q, p) = s;
        }
    return g;
}

inline Matrix subtract(const Matrix& a, const Matrix& b) {
    if (!a.same_shape(b)) throw ShapeMismatch("subtract: shapes disagree");
    Matrix c = a;
    for (std::size_t i = 0; i < c.size(); ++i) c.data()[i] -= b.data()[i];
    return c;
}

inline Matrix add(const Matrix& a, const Matrix& b) {
    if (!a.same_shape(b)) throw ShapeMismatch("add: shapes disagree");
    Matrix c = a;
    for (std::size_t i = 0; i < c.size(); ++i) c.data()[i] += b.data()[i];
    return c;
}

inline Matrix scale(const Matrix& a, double s) {
    Matrix c = a;
    for (std::size_t i = 0; i < c.size(); ++i) c.data()[i] *= s;
    return c;
}

/// Sum of entrywise products, row-major accumulation.
inline double dot(const Matrix& a, const Matrix& b) {
    if (!a.same_shape(b)) throw ShapeMismatch("dot: shapes disagree");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a.data()[i] * b.data()[i];
    return s;
}

inline double mean(const Matrix& a) {
    if (a.size() == 0) return 0.0;
    double s = 0.0;
    for (double v : a.values()) s += v;
    return s / static_cast<double>(a.size());
}

} // namespace volnmf
