#pragma once

// Invariant operators relative to an EigenPartition: invariance verdicts,
// matrix symbols, quantization, composition, functional calculus and
// basis-change covariance.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fmc/core.hpp"

namespace fmc {

struct BlockPair {
    std::size_t source;  // j: block the basis vector comes from
    std::size_t target;  // l: block receiving the leaked mass

    friend bool operator==(const BlockPair&, const BlockPair&) = default;
};

struct InvarianceReport {
    bool invariant = true;
    double max_leakage = 0.0;
    std::optional<BlockPair> worst_pair;  // empty when no leakage
    double tolerance_used = 0.0;
};

namespace detail {
// The operator written in the partition basis: M = Q^* T Q, so that
// M(l-block rows, j-block cols) holds (T e_j^k, e_l^m).
inline CMatrix in_partition_basis(const DenseOperator& t, const EigenPartition& p) {
    return p.basis().adjoint() * (t.matrix() * p.basis());
}

inline double block_frobenius(const CMatrix& m, std::size_t r0, std::size_t rn, std::size_t c0,
                              std::size_t cn) {
    double acc = 0.0;
    for (std::size_t i = r0; i < r0 + rn; ++i)
        for (std::size_t k = c0; k < c0 + cn; ++k) acc += std::norm(m(i, k));
    return std::sqrt(acc);
}
}  // namespace detail

/// Leakage of block j into block l is ||B(l, j)||_F / max(1, ||T||_F) with
/// B(l, j)_{mk} = (T e_j^k, e_l^m). Ties keep the smallest (l, j).
inline InvarianceReport is_invariant(const DenseOperator& t, const EigenPartition& p, double tol = 1e-8) {
    t.check_dim(p.dim(), "is_invariant");
    if (!(tol > 0.0)) throw ArgumentError("invariance tolerance must be positive");
    const CMatrix m = detail::in_partition_basis(t, p);
    const double scale = std::max(1.0, t.matrix().frobenius_norm());

    InvarianceReport report;
    report.tolerance_used = tol;
    double worst = 0.0;
    for (std::size_t l = 0; l < p.block_count(); ++l) {
        for (std::size_t j = 0; j < p.block_count(); ++j) {
            if (l == j) continue;
            const double leak =
                detail::block_frobenius(m, p.offset(l), p.multiplicity(l), p.offset(j), p.multiplicity(j)) / scale;
            if (leak > worst) {
                worst = leak;
                report.worst_pair = BlockPair{j, l};
            }
        }
    }
    report.max_leakage = worst;
    report.invariant = report.max_leakage <= tol;
    return report;
}

/// ||TE - ET||_F / max(1, ||T||_F ||E||_F).
inline double commutes_with(const DenseOperator& t, const DenseOperator& e) {
    if (t.dim() != e.dim()) {
        throw ShapeError("commutator of operators of dimension " + std::to_string(t.dim()) + " and " +
                         std::to_string(e.dim()));
    }
    const CMatrix comm = t.matrix() * e.matrix() - e.matrix() * t.matrix();
    return comm.frobenius_norm() /
           std::max(1.0, t.matrix().frobenius_norm() * e.matrix().frobenius_norm());
}

/// sigma(j)_{mk} = (T e_j^k, e_j^m). Defined for every T: the block compression.
inline MatrixSymbol extract_symbol(const DenseOperator& t, const EigenPartition& p) {
    t.check_dim(p.dim(), "extract_symbol");
    std::vector<CMatrix> blocks;
    blocks.reserve(p.block_count());
    for (std::size_t j = 0; j < p.block_count(); ++j) {
        const CMatrix qj = p.block_basis(j);
        blocks.push_back(qj.adjoint() * (t.matrix() * qj));
    }
    return MatrixSymbol(std::move(blocks));
}

/// The operator with T e_j^k = sum_m sigma(j)_{mk} e_j^m.
inline DenseOperator quantize(const MatrixSymbol& sigma, const EigenPartition& p) {
    sigma.check_aligned(p);
    const std::size_t n = p.dim();
    CMatrix out(n, n);
    for (std::size_t j = 0; j < p.block_count(); ++j) {
        const CMatrix qj = p.block_basis(j);
        out += qj * (sigma.block(j) * qj.adjoint());
    }
    return DenseOperator(std::move(out));
}

/// Blockwise product sigma_S(j) sigma_T(j), the symbol of S o T.
inline MatrixSymbol compose_symbols(const MatrixSymbol& s, const MatrixSymbol& t) {
    s.check_aligned(t);
    std::vector<CMatrix> blocks;
    blocks.reserve(s.block_count());
    for (std::size_t j = 0; j < s.block_count(); ++j) blocks.push_back(s.block(j) * t.block(j));
    return MatrixSymbol(std::move(blocks));
}

/// Symbol of F(E): block j is F(lambda_j) I.
template <typename F>
MatrixSymbol symbol_of_function(F&& f, const EigenPartition& p) {
    std::vector<CMatrix> blocks;
    blocks.reserve(p.block_count());
    for (std::size_t j = 0; j < p.block_count(); ++j) {
        const Complex value = static_cast<Complex>(f(p.lambda(j)));
        if (!std::isfinite(value.real()) || !std::isfinite(value.imag())) {
            throw EvaluationError("function is not finite at block " + std::to_string(j) +
                                  " (lambda = " + std::to_string(p.lambda(j)) + ")");
        }
        blocks.push_back(CMatrix::identity(p.multiplicity(j)) * value);
    }
    return MatrixSymbol(std::move(blocks));
}

inline void check_unitary(const DenseOperator& u, double tol = tolerance::identity) {
    const double dev = max_abs_difference(u.matrix() * u.matrix().adjoint(), CMatrix::identity(u.dim()));
    if (dev > tol) throw UnitarityError("operator is not unitary: max |UU* - I| = " + std::to_string(dev));
}

/// U T U*.
inline DenseOperator conjugate_by_unitary(const DenseOperator& t, const DenseOperator& u) {
    if (t.dim() != u.dim()) throw ShapeError("conjugation by a unitary of different dimension");
    check_unitary(u);
    return DenseOperator(u.matrix() * (t.matrix() * u.matrix().adjoint()));
}

/// Same eigenvalues and multiplicities, basis vectors f = U e.
inline EigenPartition transform_partition(const EigenPartition& p, const DenseOperator& u) {
    u.check_dim(p.dim(), "transform_partition");
    check_unitary(u);
    return EigenPartition(p.ambient(), u.matrix() * p.basis(), p.lambdas(), p.multiplicities());
}

/// Max blockwise entry deviation between the symbol of T in {e} and the
/// symbol of U T U* in {U e}; zero in exact arithmetic.
inline double check_basis_covariance(const DenseOperator& t, const DenseOperator& u, const EigenPartition& p) {
    t.check_dim(p.dim(), "check_basis_covariance");
    const DenseOperator moved = conjugate_by_unitary(t, u);
    const MatrixSymbol original = extract_symbol(t, p);
    const MatrixSymbol transported = extract_symbol(moved, transform_partition(p, u));
    double dev = 0.0;
    for (std::size_t j = 0; j < original.block_count(); ++j) {
        dev = std::max(dev, max_abs_difference(original.block(j), transported.block(j)));
    }
    return dev;
}

/// c(Tf)(l) for an invariant T, computed on the symbol side as sigma(l) c(l).
inline CoefficientVector apply_symbol(const MatrixSymbol& sigma, const CoefficientVector& c) {
    if (sigma.block_count() != c.block_count()) throw ShapeError("symbol and coefficients not aligned");
    std::vector<CVector> out;
    out.reserve(c.block_count());
    for (std::size_t l = 0; l < c.block_count(); ++l) {
        if (sigma.block(l).cols() != c.block(l).size()) {
            throw ShapeError("symbol block " + std::to_string(l) + " does not match coefficient block");
        }
        out.push_back(sigma.block(l) * c.block(l));
    }
    return CoefficientVector(std::move(out));
}

}  // namespace fmc
