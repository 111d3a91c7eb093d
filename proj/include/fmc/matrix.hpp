#pragma once

// Small dense complex linear algebra: just enough for blockwise operator
// calculus on model spaces of a few hundred dimensions. Storage is row-major.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "fmc/error.hpp"

namespace fmc {

using Complex = std::complex<double>;
using CVector = std::vector<Complex>;

/// Hybrid closeness test |a - b| <= tol * max(1, |a|, |b|).
inline bool approx_equal(double a, double b, double tol) {
    return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

inline bool approx_equal(Complex a, Complex b, double tol) {
    return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

/// (f, g) = sum_i f_i conj(g_i); linear in the first slot.
inline Complex inner(std::span<const Complex> f, std::span<const Complex> g) {
    if (f.size() != g.size()) {
        throw ShapeError("inner product of vectors of length " + std::to_string(f.size()) +
                         " and " + std::to_string(g.size()));
    }
    Complex acc{};
    for (std::size_t i = 0; i < f.size(); ++i) acc += f[i] * std::conj(g[i]);
    return acc;
}

inline double norm_squared(std::span<const Complex> f) {
    double acc = 0.0;
    for (const auto& z : f) acc += std::norm(z);
    return acc;
}

inline double norm(std::span<const Complex> f) { return std::sqrt(norm_squared(f)); }

class CMatrix {
public:
    CMatrix() = default;
    CMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

    /// Row-wise literal, e.g. CMatrix{{1, 2}, {3, 4}}.
    CMatrix(std::initializer_list<std::initializer_list<Complex>> rows) {
        rows_ = rows.size();
        cols_ = rows_ == 0 ? 0 : rows.begin()->size();
        data_.reserve(rows_ * cols_);
        for (const auto& r : rows) {
            if (r.size() != cols_) throw ShapeError("ragged matrix literal");
            data_.insert(data_.end(), r.begin(), r.end());
        }
    }

    static CMatrix identity(std::size_t n) {
        CMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    static CMatrix diagonal(std::span<const Complex> d) {
        CMatrix m(d.size(), d.size());
        for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
        return m;
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool is_square() const noexcept { return rows_ == cols_; }
    bool empty() const noexcept { return data_.empty(); }

    Complex& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const Complex& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::span<Complex> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
    std::span<const Complex> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

    CVector column(std::size_t j) const {
        CVector c(rows_);
        for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
        return c;
    }

    void set_column(std::size_t j, std::span<const Complex> c) {
        if (c.size() != rows_) throw ShapeError("column length mismatch");
        for (std::size_t i = 0; i < rows_; ++i) (*this)(i, j) = c[i];
    }

    /// Columns [first, first + count) as a rows() x count matrix.
    CMatrix columns(std::size_t first, std::size_t count) const {
        CMatrix out(rows_, count);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t k = 0; k < count; ++k) out(i, k) = (*this)(i, first + k);
        return out;
    }

    /// Sub-matrix of shape nrows x ncols starting at (row0, col0).
    CMatrix block(std::size_t row0, std::size_t col0, std::size_t nrows, std::size_t ncols) const {
        CMatrix out(nrows, ncols);
        for (std::size_t i = 0; i < nrows; ++i)
            for (std::size_t k = 0; k < ncols; ++k) out(i, k) = (*this)(row0 + i, col0 + k);
        return out;
    }

    std::span<const Complex> data() const noexcept { return data_; }
    std::span<Complex> data() noexcept { return data_; }

    CMatrix adjoint() const {
        CMatrix out(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) out(j, i) = std::conj((*this)(i, j));
        return out;
    }

    double frobenius_norm() const { return norm(data_); }

    double max_abs() const {
        double m = 0.0;
        for (const auto& z : data_) m = std::max(m, std::abs(z));
        return m;
    }

    Complex trace() const {
        if (!is_square()) throw ShapeError("trace of a non-square matrix");
        Complex t{};
        for (std::size_t i = 0; i < rows_; ++i) t += (*this)(i, i);
        return t;
    }

    CMatrix& operator+=(const CMatrix& o) {
        check_same_shape(o, "addition");
        for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
        return *this;
    }

    CMatrix& operator-=(const CMatrix& o) {
        check_same_shape(o, "subtraction");
        for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
        return *this;
    }

    CMatrix& operator*=(Complex s) {
        for (auto& z : data_) z *= s;
        return *this;
    }

    friend CMatrix operator+(CMatrix a, const CMatrix& b) { return a += b; }
    friend CMatrix operator-(CMatrix a, const CMatrix& b) { return a -= b; }
    friend CMatrix operator*(CMatrix a, Complex s) { return a *= s; }
    friend CMatrix operator*(Complex s, CMatrix a) { return a *= s; }

    friend CMatrix operator*(const CMatrix& a, const CMatrix& b) {
        if (a.cols_ != b.rows_) {
            throw ShapeError("matrix product " + a.shape_string() + " * " + b.shape_string());
        }
        CMatrix out(a.rows_, b.cols_);
        for (std::size_t i = 0; i < a.rows_; ++i) {
            for (std::size_t k = 0; k < a.cols_; ++k) {
                const Complex aik = a(i, k);
                if (aik == Complex{}) continue;
                const Complex* brow = b.data_.data() + k * b.cols_;
                Complex* orow = out.data_.data() + i * out.cols_;
                for (std::size_t j = 0; j < b.cols_; ++j) orow[j] += aik * brow[j];
            }
        }
        return out;
    }

    friend CVector operator*(const CMatrix& a, std::span<const Complex> x) {
        if (a.cols_ != x.size()) throw ShapeError("matrix-vector product dimension mismatch");
        CVector y(a.rows_);
        for (std::size_t i = 0; i < a.rows_; ++i) {
            Complex acc{};
            for (std::size_t j = 0; j < a.cols_; ++j) acc += a(i, j) * x[j];
            y[i] = acc;
        }
        return y;
    }

    friend CVector operator*(const CMatrix& a, const CVector& x) {
        return a * std::span<const Complex>(x);
    }

    friend bool operator==(const CMatrix&, const CMatrix&) = default;

    std::string shape_string() const {
        return std::to_string(rows_) + "x" + std::to_string(cols_);
    }

private:
    void check_same_shape(const CMatrix& o, const char* what) const {
        if (rows_ != o.rows_ || cols_ != o.cols_) {
            throw ShapeError(std::string("matrix ") + what + " " + shape_string() + " vs " +
                             o.shape_string());
        }
    }

    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<Complex> data_;
};

/// Largest entrywise modulus of a - b.
inline double max_abs_difference(const CMatrix& a, const CMatrix& b) { return (a - b).max_abs(); }

}  // namespace fmc
