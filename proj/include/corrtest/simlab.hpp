#pragma once

#include "corrtest/engine.hpp"
#include "corrtest/estimators.hpp"
#include "corrtest/hypotheses.hpp"
#include "corrtest/rng.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace corrtest {

enum class Family { Normal, T9, SkewNormal, Gamma };

/// Error law of the simulated observations, always standardized to mean 0 and variance 1.
struct DistributionSpec {
    Family family = Family::Normal;
    double skew_alpha = 4.0;   // skew-normal shape
    double gamma_shape = 2.0;  // gamma shape, scale 1

    /// normal | t9 | skew-normal | gamma
    static DistributionSpec parse(const std::string& tag);
    std::string tag() const;

    /// Fills `z` with i.i.d. standardized draws.
    void fill(Engine& gen, MatrixXd& z) const;
};

/// Covariance builders; every builder returns an SPD matrix.
MatrixXd toeplitz_cov(int d);                  // 1 − |i−j|/(2d)
MatrixXd ar_cov(int d, double rho);            // ρ^{|i−j|}
MatrixXd diag_scale_cov(int d);                // diag(1, 1.2, …, 1 + 0.2(d−1))
MatrixXd identity_plus_j(int d, double delta); // I_d + δ J_d

/// D^{1/2} V D^{1/2} with D = diag(1, 1.2, …): same correlation matrix, other variances.
MatrixXd rescaled_cov(const MatrixXd& V);

/// (1², 2², …, d²)/4.
VectorXd default_mean(int d);

/// Rows μ + V^{1/2} z with the symmetric square root of V. Throws ConfigError unless V is SPD.
GroupSample draw_group(int n, const VectorXd& mu, const MatrixXd& V,
                       const DistributionSpec& dist, Engine& gen, std::string label = {});

GroupSample draw_group(int n, const VectorXd& mu, const MatrixXd& V,
                       const DistributionSpec& dist, std::uint64_t seed);

struct SimScenario {
    std::string label;
    std::vector<int> sizes;
    std::vector<MatrixXd> covariances;  // one per group
    DistributionSpec dist;
    HypothesisSpec hypothesis;
    std::vector<MethodSpec> methods;
    int runs = 2000;
    RunOptions options;  // alpha, engine replicate counts and master seed
    bool null_holds = true;
};

struct ScenarioOptions {
    int d = 5;
    std::string covariance = "toeplitz";  // toeplitz | ar (scenario A only)
    double delta = 0.0;                   // power scenarios only
};

/// Builds one of A_r, B_r, C_r, E, power-A, power-B for total size `n`
/// (two-group designs split 0.6/0.4, except E which is balanced).
SimScenario make_scenario(const std::string& label, int n, const DistributionSpec& dist,
                          const ScenarioOptions& opt = {});

struct RateRow {
    std::string scenario;
    std::string method;
    std::string dist;
    int N = 0;
    double delta = 0.0;
    int runs = 0;
    int rejections = 0;
    double rate = 0.0;
    double se = 0.0;
    bool in_band = false;  // inside the 95% binomial band around α at 10⁴ runs
};

inline constexpr double kBandLow = 0.0458;
inline constexpr double kBandHigh = 0.0543;

/// Runs every method on `runs` generated datasets. Run r uses seed stream (seed, r);
/// every method sees the same datasets.
std::vector<RateRow> type1_experiment(const SimScenario& sc);

/// Rejection rates for each δ of a power scenario.
std::vector<RateRow> power_curve(const std::string& label, int n, const DistributionSpec& dist,
                                 const std::vector<double>& deltas,
                                 const std::vector<MethodSpec>& methods, int runs,
                                 const RunOptions& options, const ScenarioOptions& opt = {});

void write_rates_csv(std::ostream& os, const std::vector<RateRow>& rows);

struct GeneratorCheck {
    double mean = 0.0;
    double variance = 0.0;
};

/// Empirical mean and variance of `draws` standardized scalars.
GeneratorCheck generator_self_test(const DistributionSpec& dist, int draws, std::uint64_t seed);

}  // namespace corrtest
