#include "corrtest/errors.hpp"
#include "corrtest/matops.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

using namespace corrtest;

TEST(Vech, TwoByTwo) {
    MatrixXd x(2, 2);
    x << 1, 2, 2, 3;
    EXPECT_EQ(vech(x), (VectorXd(3) << 1, 2, 3).finished());
    EXPECT_EQ(vech_minus(x), (VectorXd(1) << 2).finished());
}

TEST(Vech, Identity) {
    EXPECT_EQ(vech(MatrixXd::Identity(3, 3)), (VectorXd(6) << 1, 0, 0, 1, 0, 1).finished());
    EXPECT_TRUE(vech_minus(MatrixXd::Identity(4, 4)).isZero(0.0));
}

TEST(Vech, RejectsBadShapes) {
    EXPECT_THROW(vech(MatrixXd::Zero(2, 3)), DimensionError);
    EXPECT_THROW(vech_minus(MatrixXd::Zero(1, 1)), DimensionError);
    EXPECT_THROW(index_vectors(1), DimensionError);
    EXPECT_THROW(structural(1), DimensionError);
}

TEST(Vech, UnvechRoundTrip) {
    std::mt19937_64 gen(3);
    for (int d = 2; d <= 6; ++d) {
        const MatrixXd x = oracle::random_symmetric(d, gen);
        EXPECT_EQ(unvech(vech(x), d), x);
        MatrixXd r = x;
        r.diagonal().setOnes();
        EXPECT_EQ(unvech_minus_corr(vech_minus(r), d), r);
    }
}

TEST(IndexVectors, SmallCases) {
    EXPECT_EQ(index_vectors(2).a_idx, (std::vector<int>{1, 3}));
    EXPECT_EQ(index_vectors(2).b_idx, (std::vector<int>{2}));
    EXPECT_EQ(index_vectors(3).a_idx, (std::vector<int>{1, 4, 6}));
    EXPECT_EQ(index_vectors(3).b_idx, (std::vector<int>{2, 3, 5}));
}

TEST(IndexVectors, PartitionAndDiagonal) {
    std::mt19937_64 gen(5);
    for (int d = 2; d <= 7; ++d) {
        const IndexVectors iv = index_vectors(d);
        const int p = d * (d + 1) / 2;
        ASSERT_EQ(static_cast<int>(iv.a_idx.size()), d);
        ASSERT_EQ(static_cast<int>(iv.b_idx.size()), p - d);
        EXPECT_EQ(iv.a_idx.front(), 1);
        EXPECT_EQ(iv.a_idx.back(), p);
        std::vector<int> seen(static_cast<std::size_t>(p) + 1, 0);
        for (int a : iv.a_idx) ++seen[static_cast<std::size_t>(a)];
        for (int b : iv.b_idx) ++seen[static_cast<std::size_t>(b)];
        for (int i = 1; i <= p; ++i) EXPECT_EQ(seen[static_cast<std::size_t>(i)], 1);
        EXPECT_TRUE(std::is_sorted(iv.b_idx.begin(), iv.b_idx.end()));
        const MatrixXd x = oracle::random_symmetric(d, gen);
        const VectorXd v = vech(x);
        for (int j = 0; j < d; ++j) EXPECT_EQ(v(iv.a_idx[static_cast<std::size_t>(j)] - 1), x(j, j));
    }
}

TEST(Structural, EliminationForTwo) {
    const StructuralMatrices s = structural(2);
    EXPECT_EQ(s.L, (MatrixXd(1, 3) << 0, 1, 0).finished());
}

TEST(Structural, Identities) {
    std::mt19937_64 gen(11);
    for (int d = 2; d <= 7; ++d) {
        const StructuralMatrices s = structural(d);
        EXPECT_EQ(s.L * s.M4, s.M1) << "d=" << d;
        EXPECT_EQ(s.A_sel, s.M6);
        EXPECT_EQ(s.M4, s.M2 + s.M3);
        EXPECT_EQ(s.M5, vech(MatrixXd::Identity(d, d)).asDiagonal().toDenseMatrix());
        for (int trial = 0; trial < 5; ++trial) {
            const MatrixXd x = oracle::random_symmetric(d, gen);
            EXPECT_EQ(s.L * vech(x), vech_minus(x));
            EXPECT_EQ(s.M6 * vech(x), x.diagonal());
        }
        EXPECT_TRUE(((s.M1.array() == 0) || (s.M1.array() == 1) || (s.M1.array() == 2)).all());
    }
}

TEST(Structural, DiagonalProductIdentity) {
    // vech(U₀R + RU₀) = diag(vech R)·M4·vech(U₀) for diagonal U₀.
    std::mt19937_64 gen(13);
    for (int d = 2; d <= 6; ++d) {
        const StructuralMatrices s = structural(d);
        const MatrixXd R = oracle::random_symmetric(d, gen);
        const MatrixXd U0 = oracle::random_symmetric(d, gen).diagonal().asDiagonal();
        const VectorXd lhs = vech(U0 * R + R * U0);
        const VectorXd rhs = vech(R).asDiagonal() * s.M4 * vech(U0);
        EXPECT_LT((lhs - rhs).cwiseAbs().maxCoeff(), 1e-12);
    }
}

TEST(Structural, Deterministic) {
    const StructuralMatrices a = structural(5);
    const StructuralMatrices b = structural(5);
    EXPECT_EQ(a.M1, b.M1);
    EXPECT_EQ(a.M2, b.M2);
    EXPECT_EQ(a.L, b.L);
}

TEST(DirectSum, Blocks) {
    const MatrixXd one = MatrixXd::Constant(1, 1, 1.0);
    const MatrixXd two = MatrixXd::Constant(1, 1, 2.0);
    const std::vector<MatrixXd> blocks{one, two};
    EXPECT_EQ(direct_sum(blocks), (MatrixXd(2, 2) << 1, 0, 0, 2).finished());
    const std::vector<MatrixXd> single{two};
    EXPECT_EQ(direct_sum(single), two);
    EXPECT_THROW(direct_sum(std::vector<MatrixXd>{}), ArgumentError);

    std::mt19937_64 gen(2);
    const std::vector<MatrixXd> rnd{oracle::random_matrix(3, 3, gen), oracle::random_matrix(3, 3, gen)};
    EXPECT_NEAR(direct_sum(rnd).trace(), rnd[0].trace() + rnd[1].trace(), 1e-12);
}

TEST(CenteringProjector, Properties) {
    EXPECT_EQ(centering_projector(2), (MatrixXd(2, 2) << .5, -.5, -.5, .5).finished());
    EXPECT_THROW(centering_projector(0), ArgumentError);
    for (int k = 2; k <= 10; ++k) {
        const MatrixXd P = centering_projector(k);
        EXPECT_LT((P * VectorXd::Ones(k)).cwiseAbs().maxCoeff(), 1e-12);
        EXPECT_LT((P * P - P).cwiseAbs().maxCoeff(), 1e-12);
        EXPECT_EQ(P, P.transpose());
        Eigen::SelfAdjointEigenSolver<MatrixXd> es(P);
        EXPECT_NEAR(es.eigenvalues()(0), 0.0, 1e-10);
        for (int i = 1; i < k; ++i) EXPECT_NEAR(es.eigenvalues()(i), 1.0, 1e-10);
    }
}

TEST(Dims, Make) {
    const Dims d = Dims::make(5, 2);
    EXPECT_EQ(d.p, 15);
    EXPECT_EQ(d.p_u, 10);
    EXPECT_EQ(d.a, 2);
    EXPECT_THROW(Dims::make(1), DimensionError);
    EXPECT_THROW(Dims::make(3, 0), ArgumentError);
}
