#include <cmath>

#include <gtest/gtest.h>

#include "fmc/multiplier.hpp"
#include "fmc/spectral.hpp"
#include "fmc/torus.hpp"
#include "support/oracles.hpp"
#include "support/random.hpp"

using namespace fmc;
using fmc::testing::Rng;

namespace {

double symbol_distance(const MatrixSymbol& a, const MatrixSymbol& b) {
    EXPECT_EQ(a.sizes(), b.sizes());
    double d = 0.0;
    for (std::size_t l = 0; l < a.block_count(); ++l) d = std::max(d, max_abs_difference(a.block(l), b.block(l)));
    return d;
}

/// Unitary acting as a random unitary inside each block of p, expressed in
/// ambient coordinates: Q diag(V_j) Q*.
DenseOperator block_unitary(const EigenPartition& p, Rng& rng) {
    std::vector<CMatrix> blocks;
    for (auto d : p.multiplicities()) blocks.push_back(fmc::testing::random_unitary(d, rng));
    return quantize(MatrixSymbol(std::move(blocks)), p);
}

}  // namespace

TEST(IsInvariant, QuantizedSymbolsAreInvariant) {
    Rng rng(31);
    const auto p = fmc::testing::random_partition({1, 3, 2, 2}, rng);
    const auto r = is_invariant(quantize(fmc::testing::random_symbol(p, rng), p), p);
    EXPECT_TRUE(r.invariant);
    EXPECT_LE(r.max_leakage, 1e-12);
    EXPECT_EQ(r.tolerance_used, 1e-8);
}

TEST(IsInvariant, CrossBlockRankOneMap) {
    Rng rng(32);
    const auto p = fmc::testing::random_partition({1, 1, 2}, rng);
    // e_0^1 -> e_1^1, i.e. the operator e_1^1 (e_0^1)^*.
    const CVector from = p.basis_vector(0, 0), to = p.basis_vector(1, 0);
    CMatrix t(p.dim(), p.dim());
    for (std::size_t i = 0; i < p.dim(); ++i)
        for (std::size_t k = 0; k < p.dim(); ++k) t(i, k) = to[i] * std::conj(from[k]);
    const auto r = is_invariant(DenseOperator(t), p);
    EXPECT_FALSE(r.invariant);
    ASSERT_TRUE(r.worst_pair.has_value());
    EXPECT_EQ(*r.worst_pair, (BlockPair{0, 1}));
    EXPECT_NEAR(r.max_leakage, 1.0, 1e-12);
}

TEST(IsInvariant, SingleBlockHasNoPair) {
    const EigenPartition p(AmbientSpace(2), CMatrix::identity(2), {0.0}, {2});
    const auto r = is_invariant(DenseOperator(CMatrix{{1, 2}, {3, 4}}), p);
    EXPECT_TRUE(r.invariant);
    EXPECT_FALSE(r.worst_pair.has_value());
    const EigenPartition q(AmbientSpace(2), CMatrix::identity(2), {0.0, 1.0}, {1, 1});
    EXPECT_FALSE(is_invariant(DenseOperator::identity(2), q).worst_pair.has_value());
    EXPECT_THROW(is_invariant(DenseOperator::identity(3), p), ShapeError);
    EXPECT_THROW(is_invariant(DenseOperator::identity(2), p, 0.0), ArgumentError);
}

TEST(IsInvariant, TiesKeepSmallestTargetThenSource) {
    // Equal leakage from block 0 into 1 and from block 1 into 0: (l, j) = (0, 1) comes first.
    const EigenPartition p(AmbientSpace(2), CMatrix::identity(2), {0.0, 1.0}, {1, 1});
    const auto r = is_invariant(DenseOperator(CMatrix{{0, 1}, {1, 0}}), p);
    ASSERT_TRUE(r.worst_pair.has_value());
    EXPECT_EQ(*r.worst_pair, (BlockPair{1, 0}));
}

TEST(IsInvariant, ZeroLeakageExactlyWhenBlockDiagonal) {
    Rng rng(33);
    const auto p = fmc::testing::random_partition({2, 2}, rng);
    // Built directly in the partition basis, so the off-block part is exactly zero there.
    CMatrix inner(4, 4);
    inner(0, 1) = 1.0;
    inner(3, 2) = 2.0;
    const CMatrix q = p.basis();
    const auto r = is_invariant(DenseOperator(q * (inner * q.adjoint())), p);
    EXPECT_LE(r.max_leakage, 1e-15);
    inner(2, 0) = 1e-3;
    EXPECT_GT(is_invariant(DenseOperator(q * (inner * q.adjoint())), p).max_leakage, 1e-4);
}

TEST(IsInvariant, EquivalentToProjectorCommutation) {
    // P_j T = T P_j for all j iff T is invariant.
    Rng rng(34);
    const auto p = fmc::testing::random_partition({2, 1, 3}, rng);
    const auto invariant = fmc::testing::random_invariant_operator(p, rng);
    const DenseOperator generic(fmc::testing::random_matrix(p.dim(), p.dim(), rng));
    for (const auto* t : {&invariant, &generic}) {
        double worst = 0.0;
        for (std::size_t j = 0; j < p.block_count(); ++j) {
            const CMatrix q = p.block_basis(j);
            const CMatrix pj = q * q.adjoint();
            worst = std::max(worst, (pj * t->matrix() - t->matrix() * pj).frobenius_norm());
        }
        EXPECT_EQ(worst <= 1e-10, is_invariant(*t, p).invariant);
    }
}

TEST(CommutesWith, PolynomialInE) {
    Rng rng(35);
    const CMatrix e = fmc::testing::random_hermitian(6, rng);
    const CMatrix poly = e * e * Complex(2.0) - e * Complex(3.0) + CMatrix::identity(6);
    EXPECT_LE(commutes_with(DenseOperator(poly), DenseOperator(e)), 1e-10);
    EXPECT_THROW(commutes_with(DenseOperator::identity(2), DenseOperator::identity(3)), ShapeError);
}

TEST(CommutesWith, CrossBlockMapDoesNot) {
    const CMatrix e = CMatrix::diagonal(CVector{0.0, 1.0});
    CMatrix t(2, 2);
    t(1, 0) = 1.0;
    EXPECT_GT(commutes_with(DenseOperator(t), DenseOperator(e)), 0.1);
}

TEST(CommutesWith, CoarseInvariantTorusOperatorCommutesWithLaplacian) {
    const auto model = torus::build_torus_model(2, 3);
    const auto rot = torus::frequency_rotation(model, {1, 0, 0}, {0, 1, 0}, 0.7);
    EXPECT_LE(commutes_with(rot, torus::laplacian(model)), 1e-10);
    EXPECT_FALSE(is_invariant(rot, torus::fine_partition(model)).invariant);
}

TEST(CommutesWith, AgreesWithInvarianceOnDistinctSpectrum) {
    Rng rng(36);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 40; ++trial) {
        const auto p = fmc::testing::random_partition(fmc::testing::random_block_sizes(10, 3, rng), rng);
        const auto e = quantize(symbol_of_function([](double l) { return l; }, p), p);
        auto t = fmc::testing::random_invariant_operator(p, rng);
        if (trial % 2) {
            t = DenseOperator(t.matrix() + fmc::testing::random_matrix(p.dim(), p.dim(), rng) * Complex(1e-3));
        }
        EXPECT_EQ(commutes_with(t, e) <= 1e-8, is_invariant(t, p).invariant) << "trial " << trial;
    }
}

TEST(ExtractSymbol, IdentityAndReferenceOperator) {
    Rng rng(37);
    const auto p = fmc::testing::random_partition({1, 2, 3}, rng);
    EXPECT_LE(symbol_distance(extract_symbol(DenseOperator::identity(p.dim()), p), MatrixSymbol::identity(p)), 1e-12);

    // E = sum lambda_j P_j has symbol lambda_j I.
    CMatrix e(p.dim(), p.dim());
    for (std::size_t j = 0; j < p.block_count(); ++j) {
        const CMatrix q = p.block_basis(j);
        e += (q * q.adjoint()) * Complex(p.lambda(j));
    }
    const auto sigma = extract_symbol(DenseOperator(e), p);
    for (std::size_t j = 0; j < p.block_count(); ++j) {
        EXPECT_LE(max_abs_difference(sigma.block(j), CMatrix::identity(p.multiplicity(j)) * Complex(p.lambda(j))), 1e-12);
    }
}

TEST(ExtractSymbol, RecoversPrescribedBlocks) {
    Rng rng(38);
    const auto p = fmc::testing::random_partition({2, 4, 1, 3}, rng);
    const auto sigma = fmc::testing::random_symbol(p, rng);
    EXPECT_LE(symbol_distance(extract_symbol(quantize(sigma, p), p), sigma), 1e-10);
}

TEST(ExtractSymbol, DefinedForNonInvariantOperators) {
    const EigenPartition p(AmbientSpace(3), CMatrix::identity(3), {0.0, 1.0}, {1, 2});
    const auto sigma = extract_symbol(DenseOperator(CMatrix{{1, 2, 3}, {4, 5, 6}, {7, 8, 9}}), p);
    EXPECT_EQ(sigma.block(0), (CMatrix{{1}}));
    EXPECT_EQ(sigma.block(1), (CMatrix{{5, 6}, {8, 9}}));
    EXPECT_THROW(extract_symbol(DenseOperator::identity(2), p), ShapeError);
}

TEST(Quantize, IdentityAndSingleEntry) {
    Rng rng(39);
    const auto p = fmc::testing::random_partition({2, 2}, rng);
    EXPECT_LE(max_abs_difference(quantize(MatrixSymbol::identity(p), p).matrix(), CMatrix::identity(4)), 1e-12);

    // sigma(1)_{0,1} = 1: e_1^2 -> e_1^1 and everything else -> 0.
    std::vector<CMatrix> blocks{CMatrix(2, 2), CMatrix(2, 2)};
    blocks[1](0, 1) = 1.0;
    const auto t = quantize(MatrixSymbol(blocks), p);
    const CVector image = t.apply(p.basis_vector(1, 1));
    const CVector target = p.basis_vector(1, 0);
    for (std::size_t i = 0; i < 4; ++i) EXPECT_LE(std::abs(image[i] - target[i]), 1e-12);
    for (auto [j, k] : {std::pair<std::size_t, std::size_t>{0, 0}, {0, 1}, {1, 0}}) {
        EXPECT_LE(norm(t.apply(p.basis_vector(j, k))), 1e-12);
    }
    EXPECT_THROW(quantize(MatrixSymbol({CMatrix(1, 1)}), p), ShapeError);
}

TEST(Quantize, SpectralSymbolReconstructsReferenceOperator) {
    Rng rng(40);
    const CMatrix u = fmc::testing::random_unitary(7, rng);
    const CMatrix e = u * (CMatrix::diagonal(CVector{0, 2, 2, 2, 5, 5, 9}) * u.adjoint());
    const DenseOperator op(e);
    const auto p = partition_from_operator(op);
    const auto t = quantize(symbol_of_function([](double l) { return l; }, p), p);
    EXPECT_LE(max_abs_difference(t.matrix(), hermitian_part(op)), 1e-8);
}

TEST(Quantize, MultiplierActsBlockwiseOnCoefficients) {
    Rng rng(41);
    const auto p = fmc::testing::random_partition({3, 1, 2}, rng);
    const auto t = fmc::testing::random_invariant_operator(p, rng);
    const auto sigma = extract_symbol(t, p);
    const CVector f = fmc::testing::random_vector(p.dim(), rng);
    const auto lhs = coefficients(t.apply(f), p);
    const auto rhs = apply_symbol(sigma, coefficients(f, p));
    for (std::size_t l = 0; l < p.block_count(); ++l)
        for (std::size_t m = 0; m < p.multiplicity(l); ++m) EXPECT_LE(std::abs(lhs.block(l)[m] - rhs.block(l)[m]), 1e-10);
    EXPECT_LE(max_abs_difference(quantize(sigma, p).matrix(), t.matrix()), 1e-10);
}

TEST(ComposeSymbols, IdentityAndScalarBlocks) {
    Rng rng(42);
    const auto p = fmc::testing::random_partition({1, 2, 2}, rng);
    const auto sigma = fmc::testing::random_symbol(p, rng);
    EXPECT_LE(symbol_distance(compose_symbols(sigma, MatrixSymbol::identity(p)), sigma), 0.0);

    const auto a = symbol_of_function([](double l) { return 1.0 + l; }, p);
    const auto b = symbol_of_function([](double l) { return Complex(0.0, l); }, p);
    const auto ab = symbol_of_function([](double l) { return (1.0 + l) * Complex(0.0, l); }, p);
    EXPECT_LE(symbol_distance(compose_symbols(a, b), ab), 1e-14);
    EXPECT_THROW(compose_symbols(a, MatrixSymbol({CMatrix(5, 5)})), ShapeError);
}

TEST(ComposeSymbols, MatchesDenseProduct) {
    Rng rng(43);
    for (int trial = 0; trial < 20; ++trial) {
        const auto p = fmc::testing::random_partition({2, 2, 2}, rng);
        const auto s = fmc::testing::random_symbol(p, rng);
        const auto t = fmc::testing::random_symbol(p, rng);
        const auto dense = quantize(s, p) * quantize(t, p);
        EXPECT_LE(symbol_distance(compose_symbols(s, t), extract_symbol(dense, p)), 1e-10);
        EXPECT_LE(max_abs_difference(quantize(compose_symbols(s, t), p).matrix(), dense.matrix()), 1e-10);
    }
}

TEST(SymbolOfFunction, ConstantAndResolvent) {
    const EigenPartition p(AmbientSpace(3), CMatrix::identity(3), {0.0, 1.0, 4.0}, {1, 1, 1});
    EXPECT_EQ(symbol_distance(symbol_of_function([](double) { return 1.0; }, p), MatrixSymbol::identity(p)), 0.0);
    const auto r = symbol_of_function([](double l) { return 1.0 / (1.0 + l); }, p);
    EXPECT_EQ(r.block(0)(0, 0), Complex(1.0));
    EXPECT_EQ(r.block(1)(0, 0), Complex(0.5));
    EXPECT_EQ(r.block(2)(0, 0), Complex(0.2));
}

TEST(SymbolOfFunction, NonFiniteValueNamesBlock) {
    const EigenPartition p(AmbientSpace(2), CMatrix::identity(2), {0.0, 1.0}, {1, 1});
    try {
        symbol_of_function([](double l) { return 1.0 / l; }, p);
        FAIL() << "expected EvaluationError";
    } catch (const EvaluationError& e) {
        EXPECT_NE(std::string(e.what()).find("block 0"), std::string::npos);
    }
}

TEST(SymbolOfFunction, HeatSemigroupMatchesMatrixExponential) {
    Rng rng(44);
    const CMatrix u = fmc::testing::random_unitary(12, rng);
    CVector d(12);
    for (std::size_t i = 0; i < 12; ++i) d[i] = static_cast<double>(i / 3);
    const CMatrix e = u * (CMatrix::diagonal(d) * u.adjoint());
    const DenseOperator op(e);
    const auto p = partition_from_operator(op);
    const CMatrix h = hermitian_part(op);
    for (double t : {0.1, 1.0}) {
        const auto heat = quantize(symbol_of_function([t](double l) { return std::exp(-t * l); }, p), p);
        EXPECT_LE(max_abs_difference(heat.matrix(), oracle::expm(h * Complex(-t))), 1e-8) << "t = " << t;
    }
}

TEST(ConjugateByUnitary, IdentityAndRejection) {
    Rng rng(45);
    const auto p = fmc::testing::random_partition({2, 1}, rng);
    const DenseOperator t(fmc::testing::random_matrix(3, 3, rng));
    EXPECT_EQ(check_basis_covariance(t, DenseOperator::identity(3), p), 0.0);
    EXPECT_THROW(conjugate_by_unitary(t, DenseOperator(CMatrix::identity(3) * Complex(2.0))), UnitarityError);
    const auto moved = conjugate_by_unitary(t, DenseOperator::identity(3));
    EXPECT_EQ(moved.matrix(), t.matrix());
}

TEST(ConjugateByUnitary, BlockUnitaryCovariance) {
    Rng rng(46);
    for (int trial = 0; trial < 10; ++trial) {
        const auto p = fmc::testing::random_partition({1, 3, 2}, rng);
        const DenseOperator t(fmc::testing::random_matrix(p.dim(), p.dim(), rng));
        EXPECT_LE(check_basis_covariance(t, block_unitary(p, rng), p), 1e-10);
        // Also for a general unitary: the symbol travels with the basis.
        const DenseOperator u(fmc::testing::random_unitary(p.dim(), rng));
        EXPECT_LE(check_basis_covariance(t, u, p), 1e-10);
    }
}

TEST(ConjugateByUnitary, PermutationSwappingEqualBlocks) {
    // Two 2-dim blocks; relabel them by swapping their basis vectors with a
    // permutation. The transported symbol must still equal the original.
    Rng rng(47);
    const EigenPartition p(AmbientSpace(4), CMatrix::identity(4), {1.0, 2.0}, {2, 2});
    CMatrix perm(4, 4);
    perm(2, 0) = perm(3, 1) = perm(0, 2) = perm(1, 3) = 1.0;
    const auto t = fmc::testing::random_invariant_operator(p, rng);
    EXPECT_LE(check_basis_covariance(t, DenseOperator(perm), p), 1e-10);
    // U T U* is invariant relative to the transformed partition.
    const auto moved = conjugate_by_unitary(t, DenseOperator(perm));
    EXPECT_TRUE(is_invariant(moved, transform_partition(p, DenseOperator(perm))).invariant);
}
