#pragma once

#include "corrtest/matops.hpp"

#include <string>

namespace corrtest {

/// Linear hypothesis C·r = ζ on the pooled vector of upper-half-vectorized correlations.
struct HypothesisSpec {
    MatrixXd C;     // m × (a·p_u)
    VectorXd zeta;  // m
    std::string label;
    int a = 1;
    Dims dims;

    int m() const { return static_cast<int>(C.rows()); }

    /// Rank of C (SVD, tolerance 1e−10·σ_max); diagnostic only.
    int rank() const;
};

/// R_1 = … = R_a:  C = P_a ⊗ I_{p_u}, ζ = 0.
HypothesisSpec equal_correlation_matrices(int a, const Dims& dims);

/// R_1 = I_d (one group):  C = I_{p_u}, ζ = 0.
HypothesisSpec identity_correlation(const Dims& dims);

/// R_1 = R for a given correlation matrix R:  C = I_{p_u}, ζ = vech⁻(R).
HypothesisSpec given_correlation(const MatrixXd& R);

/// All off-diagonal correlations of one group equal:  C = P_{p_u}, ζ = 0.
HypothesisSpec equal_correlations(const Dims& dims);

/// Arbitrary user hypothesis; shapes are validated, C need not be a projection.
HypothesisSpec custom(const MatrixXd& C, const VectorXd& zeta, int a, const Dims& dims,
                      std::string label = "custom");

}  // namespace corrtest
