#pragma once

#include <Eigen/Dense>

#include <span>
#include <vector>

namespace corrtest {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Problem dimensions: observation dimension d, vech length p, vech⁻ length p_u, group count a.
struct Dims {
    int d = 2;
    int p = 3;
    int p_u = 1;
    int a = 1;

    /// Throws DimensionError for d < 2 and ArgumentError for a < 1.
    static Dims make(int d, int a = 1);

    bool operator==(const Dims&) const = default;
};

/// 1-based positions of the diagonal (a_idx) and off-diagonal (b_idx) entries inside vech.
struct IndexVectors {
    std::vector<int> a_idx;
    std::vector<int> b_idx;
};

/// 0/1 selector matrices used by the delta-method and Taylor expansions.
///
/// L     p_u×p  picks the off-diagonal entries of vech (L·vech(X) = vech⁻(X))
/// M1    p_u×p  for pair (j,k) sums the vech positions of X_jj and X_kk
/// M2    p×p    for vech position (j,k) picks the position of X_jj
/// M3    p×p    for vech position (j,k) picks the position of X_kk
/// M4    p×p    M2 + M3
/// M5    p×p    diag(vech(I_d)), zeroes off-diagonal positions
/// M6    d×p    picks the diagonal of X out of vech(X)
/// A_sel d×p    diagonal selector of the combined test (equal to M6)
struct StructuralMatrices {
    MatrixXd L;
    MatrixXd M1;
    MatrixXd M2;
    MatrixXd M3;
    MatrixXd M4;
    MatrixXd M5;
    MatrixXd M6;
    MatrixXd A_sel;
};

/// Row-wise upper triangle including the diagonal: (1,1),(1,2),…,(1,d),(2,2),…,(d,d).
VectorXd vech(const MatrixXd& x);

/// Strict upper triangle in the order (1,2),…,(1,d),(2,3),…,(d−1,d).
VectorXd vech_minus(const MatrixXd& x);

/// Inverse of vech for symmetric matrices.
MatrixXd unvech(const VectorXd& v, int d);

/// Correlation matrix with unit diagonal rebuilt from its vech⁻.
MatrixXd unvech_minus_corr(const VectorXd& r, int d);

IndexVectors index_vectors(int d);

StructuralMatrices structural(int d);

/// Block-diagonal arrangement of square blocks.
MatrixXd direct_sum(std::span<const MatrixXd> blocks);

/// I_k − (1/k)·1_k·1_kᵀ.
MatrixXd centering_projector(int k);

MatrixXd kronecker(const MatrixXd& a, const MatrixXd& b);

}  // namespace corrtest
