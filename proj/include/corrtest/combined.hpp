#pragma once

#include "corrtest/estimators.hpp"
#include "corrtest/resampling.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace corrtest {

/// Two-group contrast of variances and correlations.
///
/// The first d coordinates of T are variance differences, the last p_u are
/// correlation differences in vech⁻ order.
struct ContrastStatistic {
    Dims dims;
    int N = 0;
    VectorXd T;         // √N((diag V̂₁, r̂₁) − (diag V̂₂, r̂₂))
    MatrixXd Gamma_hat; // Σ_i (N/n_i) K_i Σ̂_i K_iᵀ, K_i = [A_sel; M̂_i]
    std::vector<MomentSet> groups;

    bool is_variance(int coord) const { return coord < dims.d; }
};

enum class Classification { NoRejection, EqualCorrelationDifferentVariances, DifferentDependence };

std::string to_string(Classification c);

struct CombinedVerdict {
    bool reject_any = false;
    Classification classification = Classification::NoRejection;
    std::vector<int> flagged;                     // 0-based coordinates
    std::vector<double> per_coordinate_quantiles; // on the scale of T
    double critical_value = 0.0;                  // z for the equicoordinate route
    double beta_tilde = 0.0;                      // Taylor route only
    std::string procedure;
};

/// Human-readable label of a coordinate, e.g. "var(2)" or "corr(1,3)" (1-based).
std::string coordinate_label(const Dims& dims, int coord);

/// Stacked map [A_sel; M̂] of one group, p×p.
MatrixXd stacked_map(const MomentSet& m);

ContrastStatistic contrast_statistic(const GroupSample& g1, const GroupSample& g2);

/// Verdict implied by a set of flagged coordinates.
Classification classify(const Dims& dims, const std::vector<int>& flagged);

/// Max-|Z| equicoordinate quantile of N(0, Γ̃) by Monte Carlo, Γ̃ the correlation of Γ̂.
CombinedVerdict equicoordinate_test(const ContrastStatistic& cs, double alpha, int W,
                                    std::uint64_t seed);

/// Replicates T^{b,Tay} as columns of a p×B matrix.
MatrixXd combined_taylor_draws(const ContrastStatistic& cs, int B, std::uint64_t seed);

struct BetaSearch {
    int k = 0;                  // β̃ = k/B
    double beta = 0.0;
    std::vector<double> fwer;   // empirical FWER at every grid point k = 0..B−1
    MatrixXd sorted;            // p×B, each row ascending
};

/// β̃ = max{k/B : FWER(k) ≤ α}, FWER(k) = (1/B) Σ_b max_ℓ 1{T^b_ℓ > q_{ℓ,k/B}},
/// with q_{ℓ,k/B} the upper order statistic at ⌈B−k⌉. Draws are used as given.
BetaSearch beta_search(const MatrixXd& draws, double alpha);

/// Taylor-based multiple contrast test. Two-sided by default: quantiles of |T^Tay|
/// and exceedance of |T|; `two_sided = false` uses raw signed values.
CombinedVerdict taylor_combined_test(const ContrastStatistic& cs, double alpha, int B,
                                     std::uint64_t seed, bool two_sided = true);

}  // namespace corrtest
