#include <gtest/gtest.h>

#include <random>

#include "infprod/block_form.hpp"
#include "infprod/errors.hpp"
#include "oracles.hpp"

using namespace infprod;
using oracle::fro_diff;

TEST(BlockUpperTriangular, ShapeInvariants) {
    EXPECT_THROW(BlockUpperTriangular(0, ComplexMatrix(1, 1), ComplexMatrix(1, 1)), ShapeError);
    EXPECT_THROW(BlockUpperTriangular(1, ComplexMatrix(1, 2), ComplexMatrix(1, 1)), ShapeError);
    EXPECT_THROW(BlockUpperTriangular(2, ComplexMatrix(1, 1), ComplexMatrix(1, 1)), ShapeError);
    EXPECT_THROW(BlockUpperTriangular(1, ComplexMatrix(1, 2), ComplexMatrix(2, 1)), ShapeError);
    const BlockUpperTriangular a(ComplexMatrix(2, 3), ComplexMatrix(3, 3));
    EXPECT_EQ(a.s(), 2u);
    EXPECT_EQ(a.d(), 5u);
}

TEST(ToDense, Examples) {
    EXPECT_EQ(to_dense({ComplexMatrix{{0}}, ComplexMatrix{{0}}}), (ComplexMatrix{{1, 0}, {0, 0}}));
    EXPECT_EQ(to_dense({ComplexMatrix{{1}}, ComplexMatrix{{0.5}}}), (ComplexMatrix{{1, 1}, {0, 0.5}}));
}

TEST(ToDense, RoundTripsExactly) {
    std::mt19937_64 rng(1);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t s = 1 + trial % 4, tail = 1 + (trial / 4) % 4;
        const BlockUpperTriangular a(s, oracle::random_matrix(rng, s, tail),
                                     oracle::random_matrix(rng, tail, tail));
        EXPECT_EQ(from_dense(to_dense(a), s), a);
    }
}

TEST(FromDense, RejectsWrongStructure) {
    EXPECT_THROW(from_dense(ComplexMatrix{{2, 0}, {0, 0}}, 1), ShapeError);
    EXPECT_THROW(from_dense(ComplexMatrix{{1, 0}, {1e-300, 0}}, 1), ShapeError);
    EXPECT_THROW(from_dense(ComplexMatrix::identity(2), 2), ShapeError);
}

TEST(BlockMul, Examples) {
    const BlockUpperTriangular zero(ComplexMatrix{{0}}, ComplexMatrix{{0}});
    EXPECT_EQ(block_mul(zero, zero), zero);

    const BlockUpperTriangular a1(ComplexMatrix{{1}}, ComplexMatrix{{0.5}});
    const BlockUpperTriangular a2(ComplexMatrix{{2}}, ComplexMatrix{{0.5}});
    const auto product = block_mul(a1, a2);
    // [[1,1],[0,.5]] [[1,2],[0,.5]] = [[1,2.5],[0,.25]]
    EXPECT_EQ(product.b(), ComplexMatrix{{2.5}});
    EXPECT_EQ(product.c(), ComplexMatrix{{0.25}});
}

TEST(BlockMul, IsAHomomorphismIntoDenseMatrices) {
    std::mt19937_64 rng(2);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t s = 1 + trial % 4, tail = 1 + (trial / 3) % 4;
        const BlockUpperTriangular a1(s, oracle::random_matrix(rng, s, tail),
                                      oracle::random_matrix(rng, tail, tail));
        const BlockUpperTriangular a2(s, oracle::random_matrix(rng, s, tail),
                                      oracle::random_matrix(rng, tail, tail));
        const auto expected = oracle::triple_loop(oracle::to_grid(to_dense(a1)),
                                                   oracle::to_grid(to_dense(a2)));
        EXPECT_LE(oracle::max_abs_diff(oracle::to_grid(to_dense(block_mul(a1, a2))), expected),
                  1e-13);
    }
}

TEST(BlockMul, ShapeMismatch) {
    const BlockUpperTriangular a(ComplexMatrix(1, 2), ComplexMatrix(2, 2));
    const BlockUpperTriangular b(ComplexMatrix(2, 1), ComplexMatrix(1, 1));
    EXPECT_THROW(block_mul(a, b), ShapeError);
}

TEST(PadToBalanced, BalancedInputUnchanged) {
    const BlockUpperTriangular a(ComplexMatrix{{1, 2}, {3, 4}}, ComplexMatrix{{0.1, 0}, {0, 0.2}});
    EXPECT_EQ(pad_to_balanced(a), a);
}

TEST(PadToBalanced, WideIdentityBlockPadsBAndC) {
    // s = 2, d = 3: B~ = [B | 0], C~ = [[C, 0], [0, 0]].
    const BlockUpperTriangular a(ComplexMatrix{{1}, {2}}, ComplexMatrix{{0.5}});
    const auto padded = pad_to_balanced(a);
    EXPECT_EQ(padded.s(), 2u);
    EXPECT_EQ(padded.tail(), 2u);
    EXPECT_EQ(padded.b(), (ComplexMatrix{{1, 0}, {2, 0}}));
    EXPECT_EQ(padded.c(), (ComplexMatrix{{0.5, 0}, {0, 0}}));
}

TEST(PadToBalanced, NarrowIdentityBlockPadsBOnly) {
    // s = 1, d = 3: B~ = [B ; 0], C~ = C.
    const BlockUpperTriangular a(ComplexMatrix{{1, 2}}, ComplexMatrix{{0.5, 0.1}, {0, 0.25}});
    const auto padded = pad_to_balanced(a);
    EXPECT_EQ(padded.s(), 2u);
    EXPECT_EQ(padded.b(), (ComplexMatrix{{1, 2}, {0, 0}}));
    EXPECT_EQ(padded.c(), a.c());
}

TEST(PadToBalanced, PreservesLimitCandidateAndNorms) {
    std::mt19937_64 rng(4);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t s = 1 + trial % 5, tail = 1 + (trial / 5) % 5;
        const BlockUpperTriangular a(s, oracle::random_matrix(rng, s, tail),
                                     oracle::random_contraction(rng, tail, 0.9));
        const auto padded = pad_to_balanced(a);
        EXPECT_EQ(padded.s(), padded.tail());
        EXPECT_EQ(pad_to_balanced(padded), padded);

        const auto l = solve_right(a.b(), identity_minus(a.c()));
        const auto l_padded = solve_right(padded.b(), identity_minus(padded.c()));
        EXPECT_LE(fro_diff(l_padded.block(0, 0, s, tail), l), 1e-12);
        // Everything outside the original corner is exactly zero.
        EXPECT_LE(oracle::fro(l_padded), oracle::fro(l) * (1 + 1e-12) + 1e-300);
        for (std::size_t i = 0; i < l_padded.rows(); ++i)
            for (std::size_t j = 0; j < l_padded.cols(); ++j)
                if (i >= s || j >= tail) EXPECT_EQ(l_padded(i, j), Complex{});

        EXPECT_DOUBLE_EQ(oracle::inf_norm_oracle(padded.c()), oracle::inf_norm_oracle(a.c()));
    }
}
