#pragma once

#include "corrtest/estimators.hpp"
#include "corrtest/hypotheses.hpp"
#include "corrtest/quadform.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace corrtest {

enum class ResamplingEngine { Parametric, Wild, Taylor };

enum class WildWeight { Rademacher, Gaussian };

WildWeight parse_wild_weight(const std::string& tag);

struct ResamplingConfig {
    int B = 1000;
    std::uint64_t seed = 0;
    ResamplingEngine engine = ResamplingEngine::Parametric;
    WildWeight wild_weight = WildWeight::Rademacher;
    bool taylor_second_order = true;  // false forces f ≡ 0 in the Taylor engine
    bool small_sample_factor = false;  // (N−3)/N on the data statistic

    /// Throws ConfigError when B < 100.
    void validate() const;
};

inline constexpr int kDefaultBootstrapReps = 1000;

/// Precomputed per-group quantities for the second-order expansion.
struct TaylorContext {
    Dims dims;
    int n = 0;
    VectorXd lambda;      // diagonal of Λ(v̂), length p
    VectorXd r_hat;       // p_u
    MatrixXd R_hat;       // d×d
    MatrixXd M_hat;       // p_u×p
    MatrixXd Sigma_root;  // p×p, Sigma_root·Sigma_rootᵀ = Σ̂
    std::vector<int> diag_pos;                  // 0-based vech positions of X_jj
    std::vector<int> off_pos;                   // 0-based vech positions of X_jk, j<k
    std::vector<std::pair<int, int>> pairs;     // (j,k) of each correlation coordinate

    static TaylorContext make(const MomentSet& m);
};

/// Quadratic correction term of the correlation map:
/// f(y) = ¼ L diag(vech(w wᵀ)) vech(R̂) − ½ L diag(Λy) M4 M5 Λy + ⅜ diag(r̂) M1 vech(w wᵀ),
/// with w = M6 Λ y. Evaluated coordinatewise.
VectorXd taylor_f(const TaylorContext& ctx, const VectorXd& y);

/// Reference draws of Q† (parametric bootstrap), B values, unsorted.
std::vector<double> parametric_bootstrap_draws(const PooledMoments& pm, const HypothesisSpec& h,
                                               const ResamplingConfig& cfg);

/// Reference draws of Q* (wild bootstrap). `groups` must be the data behind `pm`.
std::vector<double> wild_bootstrap_draws(std::span<const GroupSample> groups,
                                         const PooledMoments& pm, const HypothesisSpec& h,
                                         const ResamplingConfig& cfg);

/// Reference draws of Q^Tay with Υ̂ fixed from the data.
std::vector<double> taylor_draws(const PooledMoments& pm, const HypothesisSpec& h,
                                 const ResamplingConfig& cfg);

TestReport parametric_bootstrap_test(const PooledMoments& pm, const HypothesisSpec& h,
                                     double alpha, const ResamplingConfig& cfg);

TestReport wild_bootstrap_test(std::span<const GroupSample> groups, const PooledMoments& pm,
                               const HypothesisSpec& h, double alpha, const ResamplingConfig& cfg);

TestReport taylor_mc_test(const PooledMoments& pm, const HypothesisSpec& h, double alpha,
                          const ResamplingConfig& cfg);

}  // namespace corrtest
