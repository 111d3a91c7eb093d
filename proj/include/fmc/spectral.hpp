#pragma once

// Eigenspace partitions of a Hermitian reference operator: cyclic Jacobi
// eigendecomposition followed by clustering of numerically equal eigenvalues.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numeric>
#include <string>
#include <vector>

#include "fmc/core.hpp"

namespace fmc {

struct ClusteringPolicy {
    double rel_tol = 1e-9;
    double abs_tol = 1e-12;

    void validate() const {
        if (!(rel_tol >= 0.0) || !(abs_tol >= 0.0)) {
            throw ArgumentError("clustering tolerances must be nonnegative");
        }
        if (rel_tol == 0.0 && abs_tol == 0.0) {
            throw ArgumentError("clustering tolerances must not both be zero");
        }
    }

    /// Two neighbouring eigenvalues belong to the same block iff this holds.
    bool merges(double v, double w) const {
        return std::abs(w - v) <= std::max(abs_tol, rel_tol * std::max(std::abs(v), std::abs(w)));
    }
};

struct Eigendecomposition {
    std::vector<double> values;  // ascending
    CMatrix vectors;             // column i belongs to values[i]
};

namespace jacobi {
inline constexpr int max_sweeps = 100;
inline constexpr double off_diagonal_threshold = 1e-12;
}  // namespace jacobi

/// Hermitian part (E + E*)/2 after checking ||E - E*||_max <= 1e-10 max(1, ||E||_max).
inline CMatrix hermitian_part(const DenseOperator& e) {
    const CMatrix& a = e.matrix();
    const CMatrix ah = a.adjoint();
    const double asym = max_abs_difference(a, ah);
    if (asym > tolerance::identity * std::max(1.0, a.max_abs())) {
        throw SymmetryError("operator is not Hermitian: max |E - E*| = " + std::to_string(asym));
    }
    CMatrix h = (a + ah) * Complex(0.5);
    for (std::size_t i = 0; i < h.rows(); ++i) h(i, i) = h(i, i).real();
    return h;
}

namespace detail {

inline double off_diagonal_norm(const CMatrix& a) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j)
            if (i != j) acc += std::norm(a(i, j));
    return std::sqrt(acc);
}

// Replace columns p, q of `m` by [m_p m_q] * g, g a 2x2 matrix.
inline void rotate_columns(CMatrix& m, std::size_t p, std::size_t q, const Complex g[2][2]) {
    for (std::size_t k = 0; k < m.rows(); ++k) {
        const Complex x = m(k, p);
        const Complex y = m(k, q);
        m(k, p) = x * g[0][0] + y * g[1][0];
        m(k, q) = x * g[0][1] + y * g[1][1];
    }
}

// Replace rows p, q of `m` by g^H * [m_p; m_q].
inline void rotate_rows(CMatrix& m, std::size_t p, std::size_t q, const Complex g[2][2]) {
    for (std::size_t k = 0; k < m.cols(); ++k) {
        const Complex x = m(p, k);
        const Complex y = m(q, k);
        m(p, k) = std::conj(g[0][0]) * x + std::conj(g[1][0]) * y;
        m(q, k) = std::conj(g[0][1]) * x + std::conj(g[1][1]) * y;
    }
}

/// In-place modified Gram-Schmidt on columns [first, first + count).
inline void orthonormalize_columns(CMatrix& m, std::size_t first, std::size_t count) {
    for (std::size_t a = first; a < first + count; ++a) {
        for (std::size_t b = first; b < a; ++b) {
            Complex proj{};
            for (std::size_t i = 0; i < m.rows(); ++i) proj += m(i, a) * std::conj(m(i, b));
            for (std::size_t i = 0; i < m.rows(); ++i) m(i, a) -= proj * m(i, b);
        }
        double nrm = 0.0;
        for (std::size_t i = 0; i < m.rows(); ++i) nrm += std::norm(m(i, a));
        nrm = std::sqrt(nrm);
        if (nrm == 0.0) throw ConvergenceError("eigenvector block lost rank during orthonormalization");
        for (std::size_t i = 0; i < m.rows(); ++i) m(i, a) /= nrm;
    }
}

}  // namespace detail

/// Cyclic complex Jacobi. Each rotation first removes the phase of a_pq with
/// diag(1, e^{-i phi}), then applies the real symmetric Jacobi rotation.
inline Eigendecomposition hermitian_eigendecompose(const DenseOperator& e) {
    CMatrix a = hermitian_part(e);
    const std::size_t n = a.rows();
    CMatrix v = CMatrix::identity(n);

    const double target = jacobi::off_diagonal_threshold * a.frobenius_norm();
    int sweep = 0;
    while (detail::off_diagonal_norm(a) > target) {
        if (sweep++ == jacobi::max_sweeps) {
            throw ConvergenceError("Jacobi eigensolver did not converge in " +
                                   std::to_string(jacobi::max_sweeps) + " sweeps");
        }
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const Complex apq = a(p, q);
                const double h = std::abs(apq);
                if (h == 0.0) continue;
                const double app = a(p, p).real();
                const double aqq = a(q, q).real();
                const Complex phase = apq / h;
                const double theta = (aqq - app) / (2.0 * h);
                const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                const Complex g[2][2] = {{c, s}, {-s * std::conj(phase), c * std::conj(phase)}};
                detail::rotate_columns(a, p, q, g);
                detail::rotate_rows(a, p, q, g);
                detail::rotate_columns(v, p, q, g);
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                a(p, p) = a(p, p).real();
                a(q, q) = a(q, q).real();
            }
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return a(x, x).real() < a(y, y).real(); });

    Eigendecomposition out{std::vector<double>(n), CMatrix(n, n)};
    for (std::size_t i = 0; i < n; ++i) {
        out.values[i] = a(order[i], order[i]).real();
        for (std::size_t k = 0; k < n; ++k) out.vectors(k, i) = v(k, order[i]);
    }
    return out;
}

/// Groups an ascending eigenvalue stream into blocks; block eigenvalue is the
/// mean of its members, block basis the matching columns after Gram-Schmidt.
inline EigenPartition cluster_eigenvalues(const std::vector<double>& values, const CMatrix& vectors,
                                          const ClusteringPolicy& policy = {}) {
    policy.validate();
    const std::size_t n = values.size();
    if (n == 0) throw EmptyInputError("no eigenvalues to cluster");
    if (vectors.rows() != n || vectors.cols() != n) {
        throw ShapeError("eigenvector matrix is " + vectors.shape_string() + " for " +
                         std::to_string(n) + " eigenvalues");
    }
    for (std::size_t i = 1; i < n; ++i) {
        if (values[i] < values[i - 1]) throw ArgumentError("eigenvalues must be ascending");
    }

    std::vector<double> lambdas;
    std::vector<std::size_t> sizes;
    std::size_t start = 0;
    for (std::size_t i = 1; i <= n; ++i) {
        if (i == n || !policy.merges(values[i - 1], values[i])) {
            double sum = 0.0;
            for (std::size_t k = start; k < i; ++k) sum += values[k];
            lambdas.push_back(sum / static_cast<double>(i - start));
            sizes.push_back(i - start);
            start = i;
        }
    }

    CMatrix basis = vectors;
    std::size_t offset = 0;
    for (std::size_t d : sizes) {
        if (d > 1) detail::orthonormalize_columns(basis, offset, d);
        offset += d;
    }
    return EigenPartition(AmbientSpace(n), std::move(basis), std::move(lambdas), std::move(sizes));
}

inline EigenPartition partition_from_operator(const DenseOperator& e, const ClusteringPolicy& policy = {}) {
    const auto eig = hermitian_eigendecompose(e);
    return cluster_eigenvalues(eig.values, eig.vectors, policy);
}

}  // namespace fmc
