#pragma once

#include "corrtest/estimators.hpp"
#include "corrtest/hypotheses.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace corrtest {

/// Critical-value engine of a test.
enum class Method {
    AtsMc,    // plain Monte-Carlo weighted χ² limit
    AtsPar,   // parametric bootstrap
    AtsWild,  // wild bootstrap
    AtsTay,   // second-order Taylor Monte-Carlo
    AtsFzMc,  // Fisher-z transformed statistic, Monte-Carlo limit
};

/// Engine plus the optional (N−3)/N small-sample factor ("-m" suffix).
struct MethodSpec {
    Method method = Method::AtsMc;
    bool small_sample_factor = false;

    /// Accepts ats-mc, ats (alias of ats-mc), ats-par, ats-wild, ats-tay, atsfz-mc (alias atsfz),
    /// each optionally followed by "-m". Throws ArgumentError otherwise.
    static MethodSpec parse(const std::string& tag);
    std::string tag() const;

    bool operator==(const MethodSpec&) const = default;
};

struct TestReport {
    double statistic = 0.0;
    double critical_value = 0.0;
    double p_value = 1.0;
    double alpha = 0.05;
    std::string method;
    bool reject = false;
    int reps = 0;
    std::uint64_t seed = 0;
};

/// Default Monte-Carlo size for weighted χ² and Taylor reference draws.
inline constexpr int kDefaultMcReps = 10000;

/// Upper order statistic at position ⌈level·W⌉ (1-based) of ascending `sorted`.
/// Returns −∞ when that position is 0 (level = 0).
double upper_order_statistic(std::span<const double> sorted, double level);

/// (1 + #{draws ≥ statistic}) / (1 + W) for ascending `sorted`.
double mc_p_value(std::span<const double> sorted, double statistic);

/// Builds a report from a statistic and unsorted reference draws (sorted in place).
TestReport make_report(double statistic, std::vector<double>& draws, double alpha,
                       const MethodSpec& method, std::uint64_t seed);

/// (N−3)/N.
double small_sample_factor(int N);

/// tr(C Υ Cᵀ).
double ats_trace(const MatrixXd& C, const MatrixXd& upsilon);

/// N (C r̂ − ζ)ᵀ(C r̂ − ζ) / tr(C Υ̂ Cᵀ), optionally times (N−3)/N.
double ats_statistic(const PooledMoments& pm, const HypothesisSpec& h, bool factor = false);

/// Eigenvalues (nonincreasing) of Υ^{1/2} Cᵀ E C Υ^{1/2} for a symmetric weight E.
std::vector<double> limit_eigenvalues(const MatrixXd& upsilon, const MatrixXd& C,
                                      const MatrixXd& E);

/// Limit weights of the ATS: E = I_m / tr(C Υ̂ Cᵀ). They sum to one.
std::vector<double> limit_eigenvalues(const PooledMoments& pm, const HypothesisSpec& h);

struct WeightedChisqResult {
    double quantile = 0.0;
    std::vector<double> draws;  // ascending
};

/// Monte-Carlo (1−α) quantile of Σ λ_ℓ B_ℓ, B_ℓ i.i.d. χ²₁, from W draws.
WeightedChisqResult weighted_chisq_quantile(std::span<const double> lambdas, double alpha, int W,
                                            std::uint64_t seed);

struct FisherZResult {
    double statistic = 0.0;
    MatrixXd limit_cov;  // Ĵ C Υ̂ Cᵀ Ĵ, Ĵ = diag(1 − (C r̂)²)⁻¹
    std::vector<double> lambdas;  // eigenvalues of limit_cov / tr(limit_cov)
};

/// Fisher-z ATS: N‖atanh(C r̂) − atanh(ζ)‖² / tr(Ĵ C Υ̂ Cᵀ Ĵ).
FisherZResult fisherz_ats(const PooledMoments& pm, const HypothesisSpec& h, bool factor = false);

/// ATS or ATSFz compared against the Monte-Carlo weighted χ² quantile.
TestReport mc_test(const PooledMoments& pm, const HypothesisSpec& h, const MethodSpec& method,
                   double alpha, int W, std::uint64_t seed);

/// Throws unless the hypothesis matches the pooled moments' dimensions.
void check_compatible(const PooledMoments& pm, const HypothesisSpec& h);

}  // namespace corrtest
