#include "corrtest/combined.hpp"
#include "corrtest/errors.hpp"
#include "oracles.hpp"

#include <boost/math/distributions/normal.hpp>
#include <gtest/gtest.h>

using namespace corrtest;

namespace {

GroupSample sample(int n, int d, std::uint64_t seed, const MatrixXd& mix) {
    std::mt19937_64 gen(seed);
    return GroupSample(oracle::random_matrix(n, d, gen) * mix);
}

// Brute-force FWER scan over the β grid, straight from the definition.
std::vector<double> fwer_by_scan(const MatrixXd& draws) {
    const auto p = draws.rows();
    const auto B = static_cast<int>(draws.cols());
    std::vector<std::vector<double>> sorted(static_cast<std::size_t>(p));
    for (Eigen::Index l = 0; l < p; ++l) {
        sorted[static_cast<std::size_t>(l)].assign(draws.row(l).begin(), draws.row(l).end());
        std::sort(sorted[static_cast<std::size_t>(l)].begin(), sorted[static_cast<std::size_t>(l)].end());
    }
    std::vector<double> fwer;
    for (int k = 0; k < B; ++k) {
        const double beta = static_cast<double>(k) / B;
        int hits = 0;
        for (int b = 0; b < B; ++b) {
            bool any = false;
            for (Eigen::Index l = 0; l < p; ++l) {
                const double q = upper_order_statistic(sorted[static_cast<std::size_t>(l)], 1.0 - beta);
                any = any || draws(l, b) > q;
            }
            hits += any ? 1 : 0;
        }
        fwer.push_back(static_cast<double>(hits) / B);
    }
    return fwer;
}

}  // namespace

TEST(CoordinateLabel, Layout) {
    const Dims dims = Dims::make(4, 2);
    EXPECT_EQ(coordinate_label(dims, 0), "var(1)");
    EXPECT_EQ(coordinate_label(dims, 3), "var(4)");
    EXPECT_EQ(coordinate_label(dims, 4), "corr(1,2)");
    EXPECT_EQ(coordinate_label(dims, 6), "corr(1,4)");
    EXPECT_EQ(coordinate_label(dims, 7), "corr(2,3)");
    EXPECT_EQ(coordinate_label(dims, 9), "corr(3,4)");
    EXPECT_THROW(coordinate_label(dims, 10), ArgumentError);
}

TEST(Classify, Partition) {
    const Dims dims = Dims::make(3, 2);
    EXPECT_EQ(classify(dims, {}), Classification::NoRejection);
    EXPECT_EQ(classify(dims, {0, 2}), Classification::EqualCorrelationDifferentVariances);
    EXPECT_EQ(classify(dims, {1, 4}), Classification::DifferentDependence);
    EXPECT_EQ(classify(dims, {3}), Classification::DifferentDependence);
}

TEST(ContrastStatistic, IdenticalGroupsAndLayout) {
    const GroupSample g = sample(40, 2, 1, MatrixXd::Identity(2, 2));
    const ContrastStatistic cs = contrast_statistic(g, g);
    EXPECT_EQ(cs.T.size(), 3);
    EXPECT_TRUE(cs.T.isZero(0.0));
    EXPECT_TRUE(cs.is_variance(1));
    EXPECT_FALSE(cs.is_variance(2));
    EXPECT_THROW(contrast_statistic(g, sample(40, 3, 2, MatrixXd::Identity(3, 3))), DimensionError);
}

TEST(ContrastStatistic, GammaMatchesComposition) {
    std::mt19937_64 gen(3);
    const MatrixXd mix = oracle::random_spd(4, gen);
    const GroupSample g1 = sample(50, 4, 4, mix);
    const GroupSample g2 = sample(35, 4, 5, mix);
    const ContrastStatistic cs = contrast_statistic(g1, g2);

    MatrixXd gamma = MatrixXd::Zero(10, 10);
    VectorXd t = VectorXd::Zero(10);
    double sign = 1.0;
    for (const GroupSample* g : {&g1, &g2}) {
        const MomentSet m = compute_moments(*g);
        MatrixXd A = MatrixXd::Zero(4, 10);
        const IndexVectors iv = index_vectors(4);
        for (int j = 0; j < 4; ++j) A(j, iv.a_idx[static_cast<std::size_t>(j)] - 1) = 1.0;
        MatrixXd K(10, 10);
        K << A, m.M_hat;
        gamma += (85.0 / g->n()) * K * m.Sigma_hat * K.transpose();
        VectorXd c(10);
        c << m.V_hat.diagonal(), m.r_hat;
        t += sign * std::sqrt(85.0) * c;
        sign = -1.0;
    }
    EXPECT_LT((cs.Gamma_hat - gamma).cwiseAbs().maxCoeff(), 1e-12 * gamma.cwiseAbs().maxCoeff());
    EXPECT_LT((cs.T - t).cwiseAbs().maxCoeff(), 1e-12 * t.cwiseAbs().maxCoeff());

    const ContrastStatistic swapped = contrast_statistic(g2, g1);
    EXPECT_TRUE((swapped.T + cs.T).isZero(0.0));
    EXPECT_LT((swapped.Gamma_hat - cs.Gamma_hat).cwiseAbs().maxCoeff(), 1e-12 * gamma.cwiseAbs().maxCoeff());
}

TEST(Equicoordinate, OneDimensionalQuantile) {
    ContrastStatistic cs;
    cs.dims = Dims::make(2, 2);
    cs.T = VectorXd::Zero(3);
    cs.Gamma_hat = MatrixXd::Identity(3, 3);
    // Three independent coordinates: Šidák closed form.
    const double sidak = boost::math::quantile(boost::math::normal(), 0.5 + 0.5 * std::pow(0.95, 1.0 / 3.0));
    const CombinedVerdict v = equicoordinate_test(cs, 0.05, 1000000, 1);
    EXPECT_NEAR(v.critical_value, sidak, 0.02);
    EXPECT_EQ(v.classification, Classification::NoRejection);
}

TEST(Equicoordinate, SingleCoordinateAndDegenerate) {
    // A coordinate perfectly correlated with the others collapses max|Z| to a single |N(0,1)|.
    ContrastStatistic cs;
    cs.dims = Dims::make(2, 2);
    cs.T = VectorXd::Zero(3);
    cs.Gamma_hat = MatrixXd::Ones(3, 3);
    const CombinedVerdict v = equicoordinate_test(cs, 0.05, 1000000, 2);
    EXPECT_NEAR(v.critical_value, 1.959964, 0.01);

    cs.Gamma_hat(1, 1) = 0.0;
    EXPECT_THROW(equicoordinate_test(cs, 0.05, 1000, 1), DegenerateDataError);
}

TEST(Equicoordinate, ScaleInvariantDecision) {
    std::mt19937_64 gen(6);
    const MatrixXd mix = oracle::random_spd(3, gen);
    const GroupSample g1 = sample(80, 3, 7, mix);
    const GroupSample g2 = sample(60, 3, 8, mix * 1.5);
    ContrastStatistic cs = contrast_statistic(g1, g2);
    const CombinedVerdict a = equicoordinate_test(cs, 0.05, 5000, 3);
    cs.T *= 7.0;
    cs.Gamma_hat *= 49.0;
    const CombinedVerdict b = equicoordinate_test(cs, 0.05, 5000, 3);
    EXPECT_EQ(a.flagged, b.flagged);
    EXPECT_NEAR(a.critical_value, b.critical_value, 1e-12);
}

TEST(BetaSearch, MatchesBruteForceScan) {
    std::mt19937_64 gen(9);
    for (int trial = 0; trial < 4; ++trial) {
        const MatrixXd draws = oracle::random_matrix(4, 150, gen).cwiseAbs();
        const BetaSearch s = beta_search(draws, 0.05);
        const std::vector<double> scan = fwer_by_scan(draws);
        ASSERT_EQ(scan.size(), s.fwer.size());
        for (std::size_t k = 0; k < scan.size(); ++k) EXPECT_DOUBLE_EQ(s.fwer[k], scan[k]);
        int best = 0;
        for (std::size_t k = 0; k < scan.size(); ++k) {
            if (scan[k] <= 0.05) best = static_cast<int>(k);
        }
        EXPECT_EQ(s.k, best);
        EXPECT_LE(s.beta, 0.05);
        EXPECT_TRUE(std::is_sorted(s.fwer.begin(), s.fwer.end()));
    }
}

TEST(TaylorCombined, IdenticalGroupsNeverReject) {
    const GroupSample g = sample(60, 3, 10, MatrixXd::Identity(3, 3));
    const ContrastStatistic cs = contrast_statistic(g, g);
    const CombinedVerdict v = taylor_combined_test(cs, 0.05, 500, 1);
    EXPECT_FALSE(v.reject_any);
    EXPECT_EQ(v.classification, Classification::NoRejection);
    EXPECT_LE(v.beta_tilde, 0.05);
    EXPECT_THROW(taylor_combined_test(cs, 0.05, 50, 1), ConfigError);
}

TEST(TaylorCombined, DetectsScaledColumn) {
    std::mt19937_64 gen(11);
    const MatrixXd mix = oracle::random_spd(3, gen);
    const GroupSample g1 = sample(1500, 3, 12, mix);
    MatrixXd x2 = sample(1500, 3, 13, mix).data();
    x2.col(1) *= 3.0;
    const ContrastStatistic cs = contrast_statistic(g1, GroupSample(x2));
    const CombinedVerdict v = taylor_combined_test(cs, 0.05, 1000, 2);
    EXPECT_EQ(v.classification, Classification::EqualCorrelationDifferentVariances);
    EXPECT_NE(std::find(v.flagged.begin(), v.flagged.end(), 1), v.flagged.end());

    const CombinedVerdict one_sided = taylor_combined_test(cs, 0.05, 1000, 2, false);
    EXPECT_EQ(one_sided.procedure, "taylor-one-sided");
}

TEST(TaylorCombined, Deterministic) {
    const GroupSample g1 = sample(50, 3, 14, MatrixXd::Identity(3, 3));
    const GroupSample g2 = sample(50, 3, 15, MatrixXd::Identity(3, 3));
    const ContrastStatistic cs = contrast_statistic(g1, g2);
    EXPECT_EQ(combined_taylor_draws(cs, 300, 4), combined_taylor_draws(cs, 300, 4));
}
