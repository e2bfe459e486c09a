#include "corrtest/errors.hpp"
#include "corrtest/simlab.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace corrtest;

namespace {

MatrixXd corr_of(const MatrixXd& v) {
    const VectorXd s = v.diagonal().cwiseSqrt().cwiseInverse();
    return s.asDiagonal() * v * s.asDiagonal();
}

SimScenario small_scenario(const std::string& label, int runs) {
    SimScenario sc = make_scenario(label, 60, DistributionSpec::parse("normal"), {.d = 3});
    sc.methods = {MethodSpec::parse("ats-mc")};
    sc.runs = runs;
    sc.options.mc_reps = 500;
    sc.options.seed = 7;
    return sc;
}

}  // namespace

class GeneratorMoments : public ::testing::TestWithParam<std::string> {};

TEST_P(GeneratorMoments, Standardized) {
    const GeneratorCheck c = generator_self_test(DistributionSpec::parse(GetParam()), 1000000, 3);
    EXPECT_LT(std::abs(c.mean), 5e-3);
    EXPECT_LT(std::abs(c.variance - 1.0), 1e-2);
}

INSTANTIATE_TEST_SUITE_P(Families, GeneratorMoments,
                         ::testing::Values("normal", "t9", "skew-normal", "gamma"));

TEST(Distribution, ParseRoundTrip) {
    for (const char* t : {"normal", "t9", "skew-normal", "gamma"}) {
        EXPECT_EQ(DistributionSpec::parse(t).tag(), t);
    }
    EXPECT_THROW(DistributionSpec::parse("cauchy"), ConfigError);
}

TEST(Covariances, PositiveDefinite) {
    for (int d = 2; d <= 8; ++d) {
        for (const MatrixXd& v : {toeplitz_cov(d), ar_cov(d, 0.6), diag_scale_cov(d),
                                  identity_plus_j(d, 0.75), rescaled_cov(toeplitz_cov(d))}) {
            Eigen::SelfAdjointEigenSolver<MatrixXd> es(v);
            EXPECT_GT(es.eigenvalues().minCoeff(), 0.0);
            EXPECT_EQ(v, v.transpose());
        }
    }
    EXPECT_THROW(ar_cov(3, 1.0), ConfigError);
    EXPECT_DOUBLE_EQ(toeplitz_cov(5)(0, 4), 1.0 - 4.0 / 10.0);
}

TEST(Covariances, RescalingKeepsCorrelation) {
    const MatrixXd v = ar_cov(5, 0.6);
    const MatrixXd w = rescaled_cov(v);
    EXPECT_LT((corr_of(v) - corr_of(w)).cwiseAbs().maxCoeff(), 1e-14);
    EXPECT_GT((v.diagonal() - w.diagonal()).cwiseAbs().maxCoeff(), 0.1);
}

TEST(DrawGroup, LawOfLargeNumbers) {
    const MatrixXd v = toeplitz_cov(4);
    const VectorXd mu = default_mean(4);
    const GroupSample g = draw_group(200000, mu, v, DistributionSpec::parse("gamma"), 11);
    const MatrixXd& x = g.data();
    const VectorXd mean = x.colwise().mean().transpose();
    const MatrixXd xc = x.rowwise() - mean.transpose();
    const MatrixXd cov = xc.transpose() * xc / (x.rows() - 1.0);
    EXPECT_LT((mean - mu).cwiseAbs().maxCoeff(), 0.02);
    EXPECT_LT((cov - v).cwiseAbs().maxCoeff(), 0.03);
}

TEST(DrawGroup, DeterministicAndValidated) {
    const MatrixXd v = identity_plus_j(3, 0.3);
    const DistributionSpec dist = DistributionSpec::parse("t9");
    EXPECT_EQ(draw_group(20, VectorXd::Zero(3), v, dist, 5).data(),
              draw_group(20, VectorXd::Zero(3), v, dist, 5).data());
    EXPECT_NE(draw_group(20, VectorXd::Zero(3), v, dist, 5).data(),
              draw_group(20, VectorXd::Zero(3), v, dist, 6).data());
    MatrixXd bad = v;
    bad(0, 0) = -1.0;
    EXPECT_THROW(draw_group(20, VectorXd::Zero(3), bad, dist, 5), ConfigError);
}

TEST(Scenarios, NullHoldsAtPopulationLevel) {
    const DistributionSpec dist = DistributionSpec::parse("normal");
    const SimScenario a = make_scenario("A_r", 100, dist);
    ASSERT_EQ(a.sizes, (std::vector<int>{60, 40}));
    EXPECT_LT((corr_of(a.covariances[0]) - corr_of(a.covariances[1])).cwiseAbs().maxCoeff(), 1e-14);
    const SimScenario ar = make_scenario("A_r", 100, dist, {.covariance = "ar"});
    EXPECT_DOUBLE_EQ(corr_of(ar.covariances[0])(0, 1), 0.6);
    for (const char* label : {"B_r", "C_r", "E"}) {
        const SimScenario sc = make_scenario(label, 50, dist);
        EXPECT_TRUE(sc.null_holds) << label;
    }
    EXPECT_EQ(make_scenario("E", 50, dist).sizes, (std::vector<int>{50, 50}));
    EXPECT_FALSE(make_scenario("power-B", 50, dist, {.delta = 0.3}).null_holds);
    EXPECT_THROW(make_scenario("Z", 50, dist), ConfigError);
    EXPECT_THROW(make_scenario("B_r", 50, dist, {.delta = -1.0}), ConfigError);
}

TEST(TypeOneExperiment, ConfigErrors) {
    SimScenario sc = small_scenario("B_r", 0);
    EXPECT_THROW(type1_experiment(sc), ConfigError);
    sc.runs = 10;
    sc.methods.clear();
    EXPECT_THROW(type1_experiment(sc), ConfigError);
    sc = small_scenario("B_r", 10);
    sc.covariances[0] = identity_plus_j(3, 0.5);
    EXPECT_THROW(type1_experiment(sc), ConfigError);
}

TEST(TypeOneExperiment, AlphaOneRejectsEverything) {
    SimScenario sc = small_scenario("C_r", 20);
    sc.options.alpha = 1.0;
    const auto rows = type1_experiment(sc);
    ASSERT_EQ(rows.size(), 1u);
    EXPECT_EQ(rows[0].rejections, 20);
    EXPECT_DOUBLE_EQ(rows[0].rate, 1.0);
}

TEST(TypeOneExperiment, ReproducibleCsv) {
    SimScenario sc = small_scenario("A_r", 30);
    sc.methods.push_back(MethodSpec::parse("ats-tay"));
    std::ostringstream a;
    std::ostringstream b;
    write_rates_csv(a, type1_experiment(sc));
    write_rates_csv(b, type1_experiment(sc));
    EXPECT_EQ(a.str(), b.str());
    EXPECT_EQ(a.str().rfind("scenario,method,dist,N,delta,runs,rejections,rate,se,in_band\n", 0), 0u);

    const auto rows = type1_experiment(sc);
    EXPECT_EQ(rows[1].method, "ats-tay");
    EXPECT_EQ(rows[0].N, 60);
    EXPECT_NEAR(rows[0].se, std::sqrt(rows[0].rate * (1 - rows[0].rate) / 30), 1e-15);
}

TEST(PowerCurve, RowsPerDelta) {
    RunOptions opt;
    opt.mc_reps = 300;
    const auto rows = power_curve("power-B", 60, DistributionSpec::parse("normal"), {0.0, 1.5},
                                  {MethodSpec::parse("ats-mc")}, 40, opt, {.d = 3});
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_DOUBLE_EQ(rows[1].delta, 1.5);
    EXPECT_GT(rows[1].rate, rows[0].rate);
    EXPECT_THROW(power_curve("B_r", 60, DistributionSpec::parse("normal"), {0.0},
                             {MethodSpec::parse("ats-mc")}, 10, opt),
                 ConfigError);
}
