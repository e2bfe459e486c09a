#pragma once

#include <Eigen/Dense>

#include <string_view>

namespace corrtest {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Relative tolerance below which negative eigenvalues of a PSD estimate count as round-off.
inline constexpr double kPsdRelTol = 1e-8;

/// Eigenvalues (ascending) of the symmetrized input.
VectorXd sym_eigenvalues(const MatrixXd& a);

/// Symmetric square root of a positive semidefinite matrix via eigendecomposition.
///
/// Eigenvalues in [−rel_tol·λ_max, 0) are clipped to zero; anything more negative
/// raises NumericalError naming `what`.
MatrixXd psd_sqrt(const MatrixXd& a, std::string_view what = "matrix",
                  double rel_tol = kPsdRelTol);

/// Same clipping rule as psd_sqrt, returning the repaired matrix.
MatrixXd psd_repair(const MatrixXd& a, std::string_view what = "matrix",
                    double rel_tol = kPsdRelTol);

/// Rank from singular values above rel_tol·σ_max.
int numerical_rank(const MatrixXd& a, double rel_tol = 1e-10);

}  // namespace corrtest
