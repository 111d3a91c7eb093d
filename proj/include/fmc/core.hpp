#pragma once

// Shared domain types: the truncated ambient space, its orthogonal block
// decomposition, blocked coefficient sequences, matrix symbols and dense
// operators. Everything here is immutable once constructed.

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fmc/error.hpp"
#include "fmc/matrix.hpp"

namespace fmc {

namespace tolerance {
inline constexpr double identity = 1e-10;
inline constexpr double svd = 1e-8;
inline constexpr double orthonormality = 1e-10;
}  // namespace tolerance

class AmbientSpace {
public:
    explicit AmbientSpace(std::size_t dim, std::vector<std::string> labels = {})
        : dim_(dim), labels_(std::move(labels)) {
        if (dim_ == 0) throw ArgumentError("ambient dimension must be at least 1");
        if (!labels_.empty() && labels_.size() != dim_) {
            throw ArgumentError("expected " + std::to_string(dim_) + " coordinate labels, got " +
                                std::to_string(labels_.size()));
        }
    }

    std::size_t dim() const noexcept { return dim_; }
    const std::vector<std::string>& labels() const noexcept { return labels_; }

private:
    std::size_t dim_;
    std::vector<std::string> labels_;
};

/// One eigenspace: eigenvalue plus an N x d matrix of orthonormal columns.
struct PartitionBlock {
    double lambda;
    CMatrix basis;
};

/// H = H_0 + H_1 + ... with strictly increasing eigenvalues. The basis vectors
/// of all blocks are stored side by side as the columns of one unitary N x N
/// matrix, block j occupying columns [offset(j), offset(j) + size(j)).
class EigenPartition {
public:
    EigenPartition(AmbientSpace ambient, const std::vector<PartitionBlock>& blocks)
        : ambient_(std::move(ambient)), basis_(ambient_.dim(), ambient_.dim()) {
        const std::size_t n = ambient_.dim();
        std::size_t total = 0;
        for (const auto& b : blocks) {
            if (b.basis.rows() != n) {
                throw ShapeError("block basis has " + std::to_string(b.basis.rows()) +
                                 " rows, ambient dimension is " + std::to_string(n));
            }
            if (b.basis.cols() == 0) throw PartitionError("block with zero multiplicity");
            total += b.basis.cols();
        }
        if (total != n) {
            throw PartitionError("multiplicities sum to " + std::to_string(total) +
                                 ", ambient dimension is " + std::to_string(n));
        }
        std::size_t offset = 0;
        for (const auto& b : blocks) {
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t k = 0; k < b.basis.cols(); ++k) basis_(i, offset + k) = b.basis(i, k);
            lambdas_.push_back(b.lambda);
            sizes_.push_back(b.basis.cols());
            offsets_.push_back(offset);
            offset += b.basis.cols();
        }
        validate();
    }

    /// Columns of `basis` grouped consecutively by `sizes`.
    EigenPartition(AmbientSpace ambient, CMatrix basis, std::vector<double> lambdas,
                   std::vector<std::size_t> sizes)
        : ambient_(std::move(ambient)),
          basis_(std::move(basis)),
          lambdas_(std::move(lambdas)),
          sizes_(std::move(sizes)) {
        const std::size_t n = ambient_.dim();
        if (basis_.rows() != n || basis_.cols() != n) {
            throw ShapeError("partition basis must be " + std::to_string(n) + "x" +
                             std::to_string(n) + ", got " + basis_.shape_string());
        }
        if (lambdas_.size() != sizes_.size()) {
            throw ShapeError("eigenvalue and multiplicity lists differ in length");
        }
        std::size_t offset = 0;
        for (std::size_t d : sizes_) {
            if (d == 0) throw PartitionError("block with zero multiplicity");
            offsets_.push_back(offset);
            offset += d;
        }
        if (offset != n) {
            throw PartitionError("multiplicities sum to " + std::to_string(offset) +
                                 ", ambient dimension is " + std::to_string(n));
        }
        validate();
    }

    const AmbientSpace& ambient() const noexcept { return ambient_; }
    std::size_t dim() const noexcept { return ambient_.dim(); }
    std::size_t block_count() const noexcept { return lambdas_.size(); }

    double lambda(std::size_t j) const { return lambdas_.at(check_index(j)); }
    std::size_t multiplicity(std::size_t j) const { return sizes_.at(check_index(j)); }
    std::size_t offset(std::size_t j) const { return offsets_.at(check_index(j)); }

    const std::vector<double>& lambdas() const noexcept { return lambdas_; }
    const std::vector<std::size_t>& multiplicities() const noexcept { return sizes_; }

    /// The unitary whose columns are e_0^1, ..., e_0^{d_0}, e_1^1, ...
    const CMatrix& basis() const noexcept { return basis_; }

    /// N x d_j matrix with columns e_j^1 .. e_j^{d_j}.
    CMatrix block_basis(std::size_t j) const { return basis_.columns(offset(j), multiplicity(j)); }

    /// e_j^k with 0-based k.
    CVector basis_vector(std::size_t j, std::size_t k) const {
        if (k >= multiplicity(j)) {
            throw BlockIndexError("basis index " + std::to_string(k) + " out of range for block " +
                                  std::to_string(j));
        }
        return basis_.column(offset(j) + k);
    }

    std::size_t check_index(std::size_t j) const {
        if (j >= lambdas_.size()) {
            throw BlockIndexError("block index " + std::to_string(j) + " out of range (" +
                                  std::to_string(lambdas_.size()) + " blocks)");
        }
        return j;
    }

private:
    void validate() const {
        for (std::size_t j = 1; j < lambdas_.size(); ++j) {
            if (!(lambdas_[j - 1] < lambdas_[j])) {
                throw PartitionError("eigenvalues not strictly increasing at block " +
                                     std::to_string(j));
            }
        }
        for (double l : lambdas_) {
            if (!std::isfinite(l)) throw PartitionError("non-finite block eigenvalue");
        }
        const double gram_error = max_abs_difference(basis_.adjoint() * basis_, CMatrix::identity(dim()));
        if (gram_error > tolerance::orthonormality) {
            throw PartitionError("basis not orthonormal: Gram deviation " + std::to_string(gram_error));
        }
    }

    AmbientSpace ambient_;
    CMatrix basis_;
    std::vector<double> lambdas_;
    std::vector<std::size_t> sizes_;
    std::vector<std::size_t> offsets_;
};

/// Blocked sequence c(j) in C^{d_j}.
class CoefficientVector {
public:
    CoefficientVector() = default;
    explicit CoefficientVector(std::vector<CVector> blocks) : blocks_(std::move(blocks)) {}

    static CoefficientVector zeros(const EigenPartition& p) {
        std::vector<CVector> b;
        for (std::size_t d : p.multiplicities()) b.emplace_back(d);
        return CoefficientVector(std::move(b));
    }

    std::size_t block_count() const noexcept { return blocks_.size(); }
    const CVector& block(std::size_t j) const { return blocks_.at(j); }
    CVector& block(std::size_t j) { return blocks_.at(j); }
    const std::vector<CVector>& blocks() const noexcept { return blocks_; }

    /// l2 norm over all blocks and entries, summed in ascending block order.
    double norm() const {
        double acc = 0.0;
        for (const auto& b : blocks_) acc += norm_squared(b);
        return std::sqrt(acc);
    }

    void check_aligned(const EigenPartition& p) const {
        if (blocks_.size() != p.block_count()) {
            throw ShapeError("coefficient vector has " + std::to_string(blocks_.size()) +
                             " blocks, partition has " + std::to_string(p.block_count()));
        }
        for (std::size_t j = 0; j < blocks_.size(); ++j) {
            if (blocks_[j].size() != p.multiplicity(j)) {
                throw ShapeError("coefficient block " + std::to_string(j) + " has length " +
                                 std::to_string(blocks_[j].size()) + ", expected " +
                                 std::to_string(p.multiplicity(j)));
            }
        }
    }

private:
    std::vector<CVector> blocks_;
};

/// l -> sigma(l), a square d_l x d_l matrix per block.
class MatrixSymbol {
public:
    MatrixSymbol() = default;
    explicit MatrixSymbol(std::vector<CMatrix> blocks) : blocks_(std::move(blocks)) {
        for (std::size_t l = 0; l < blocks_.size(); ++l) {
            if (!blocks_[l].is_square() || blocks_[l].rows() == 0) {
                throw ShapeError("symbol block " + std::to_string(l) + " is " +
                                 blocks_[l].shape_string() + ", expected non-empty square");
            }
        }
    }

    static MatrixSymbol identity(const EigenPartition& p) {
        std::vector<CMatrix> b;
        for (std::size_t d : p.multiplicities()) b.push_back(CMatrix::identity(d));
        return MatrixSymbol(std::move(b));
    }

    static MatrixSymbol zeros(const EigenPartition& p) {
        std::vector<CMatrix> b;
        for (std::size_t d : p.multiplicities()) b.emplace_back(d, d);
        return MatrixSymbol(std::move(b));
    }

    std::size_t block_count() const noexcept { return blocks_.size(); }
    bool empty() const noexcept { return blocks_.empty(); }
    const CMatrix& block(std::size_t l) const { return blocks_.at(l); }
    const std::vector<CMatrix>& blocks() const noexcept { return blocks_; }

    std::vector<std::size_t> sizes() const {
        std::vector<std::size_t> s;
        for (const auto& b : blocks_) s.push_back(b.rows());
        return s;
    }

    /// Pointwise linear combination a*this + b*other.
    MatrixSymbol combine(Complex a, const MatrixSymbol& other, Complex b) const {
        check_aligned(other);
        std::vector<CMatrix> out;
        for (std::size_t l = 0; l < blocks_.size(); ++l) out.push_back(a * blocks_[l] + b * other.blocks_[l]);
        return MatrixSymbol(std::move(out));
    }

    void check_aligned(const EigenPartition& p) const {
        if (blocks_.size() != p.block_count()) {
            throw ShapeError("symbol has " + std::to_string(blocks_.size()) +
                             " blocks, partition has " + std::to_string(p.block_count()));
        }
        for (std::size_t l = 0; l < blocks_.size(); ++l) {
            if (blocks_[l].rows() != p.multiplicity(l)) {
                throw ShapeError("symbol block " + std::to_string(l) + " has side " +
                                 std::to_string(blocks_[l].rows()) + ", expected " +
                                 std::to_string(p.multiplicity(l)));
            }
        }
    }

    void check_aligned(const MatrixSymbol& other) const {
        if (sizes() != other.sizes()) throw ShapeError("symbols are not aligned on the same partition");
    }

private:
    std::vector<CMatrix> blocks_;
};

/// Square matrix acting on ambient coordinates.
class DenseOperator {
public:
    DenseOperator() = default;
    explicit DenseOperator(CMatrix entries) : entries_(std::move(entries)) {
        if (!entries_.is_square() || entries_.rows() == 0) {
            throw ShapeError("operator matrix must be non-empty square, got " + entries_.shape_string());
        }
    }

    static DenseOperator identity(std::size_t n) { return DenseOperator(CMatrix::identity(n)); }

    std::size_t dim() const noexcept { return entries_.rows(); }
    const CMatrix& matrix() const noexcept { return entries_; }
    const Complex& operator()(std::size_t i, std::size_t j) const { return entries_(i, j); }

    CVector apply(std::span<const Complex> f) const { return entries_ * f; }

    void check_dim(std::size_t n, const char* what) const {
        if (dim() != n) {
            throw ShapeError(std::string(what) + ": operator is " + entries_.shape_string() +
                             ", ambient dimension is " + std::to_string(n));
        }
    }

    friend DenseOperator operator*(const DenseOperator& a, const DenseOperator& b) {
        return DenseOperator(a.entries_ * b.entries_);
    }

private:
    CMatrix entries_;
};

namespace detail {
inline void check_length(std::span<const Complex> f, const EigenPartition& p) {
    if (f.size() != p.dim()) {
        throw ShapeError("vector of length " + std::to_string(f.size()) +
                         " in ambient space of dimension " + std::to_string(p.dim()));
    }
}
}  // namespace detail

/// P_j f = sum_k (f, e_j^k) e_j^k.
inline CVector project(std::span<const Complex> f, std::size_t j, const EigenPartition& p) {
    p.check_index(j);
    detail::check_length(f, p);
    const CMatrix& q = p.basis();
    const std::size_t n = p.dim();
    CVector out(n);
    for (std::size_t k = p.offset(j); k < p.offset(j) + p.multiplicity(j); ++k) {
        Complex c{};
        for (std::size_t i = 0; i < n; ++i) c += f[i] * std::conj(q(i, k));
        for (std::size_t i = 0; i < n; ++i) out[i] += c * q(i, k);
    }
    return out;
}

/// c(j)_k = (f, e_j^k).
inline CoefficientVector coefficients(std::span<const Complex> f, const EigenPartition& p) {
    detail::check_length(f, p);
    const CMatrix& q = p.basis();
    std::vector<CVector> blocks;
    blocks.reserve(p.block_count());
    for (std::size_t j = 0; j < p.block_count(); ++j) {
        CVector b(p.multiplicity(j));
        for (std::size_t k = 0; k < b.size(); ++k) {
            const std::size_t col = p.offset(j) + k;
            Complex c{};
            for (std::size_t i = 0; i < p.dim(); ++i) c += f[i] * std::conj(q(i, col));
            b[k] = c;
        }
        blocks.push_back(std::move(b));
    }
    return CoefficientVector(std::move(blocks));
}

/// sum_j sum_k c(j)_k e_j^k.
inline CVector synthesize(const CoefficientVector& c, const EigenPartition& p) {
    c.check_aligned(p);
    const CMatrix& q = p.basis();
    CVector out(p.dim());
    for (std::size_t j = 0; j < p.block_count(); ++j) {
        for (std::size_t k = 0; k < p.multiplicity(j); ++k) {
            const Complex ck = c.block(j)[k];
            const std::size_t col = p.offset(j) + k;
            for (std::size_t i = 0; i < p.dim(); ++i) out[i] += ck * q(i, col);
        }
    }
    return out;
}

}  // namespace fmc
