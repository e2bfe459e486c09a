#pragma once

#include "corrtest/matops.hpp"

#include <Eigen/Dense>

#include <span>
#include <string>
#include <vector>

namespace corrtest {

/// One group's raw observations: rows are subjects, columns are variables.
///
/// Construction validates the data: at least two rows, at least two columns,
/// finite entries and strictly positive sample variance in every column.
class GroupSample {
public:
    explicit GroupSample(MatrixXd data, std::string label = {});

    const MatrixXd& data() const { return data_; }
    int n() const { return static_cast<int>(data_.rows()); }
    int d() const { return static_cast<int>(data_.cols()); }
    const std::string& label() const { return label_; }

private:
    MatrixXd data_;
    std::string label_;
};

struct SampleMoments {
    VectorXd mean;
    MatrixXd V_hat;  // divisor n − 1
    VectorXd v_hat;  // vech(V_hat)
    MatrixXd R_hat;
    VectorXd r_hat;  // vech⁻(R_hat)
};

/// Per-group moment estimates feeding every test in the library.
struct MomentSet {
    int n = 0;
    Dims dims;
    VectorXd mean;
    MatrixXd V_hat;
    VectorXd v_hat;
    MatrixXd R_hat;
    VectorXd r_hat;
    MatrixXd Sigma_hat;    // p×p fourth-moment covariance of vech(x̃ x̃ᵀ)
    MatrixXd M_hat;        // p_u×p delta-method Jacobian M(v̂, r̂)
    MatrixXd Upsilon_hat;  // p_u×p_u, M̂ Σ̂ M̂ᵀ
};

struct PooledMoments {
    Dims dims;  // dims.a is the number of groups
    int N = 0;
    std::vector<MomentSet> groups;
    VectorXd r_hat_pooled;     // (r̂_1ᵀ, …, r̂_aᵀ)ᵀ
    MatrixXd Upsilon_pooled;   // ⊕ (N/n_i)·Υ̂_i
};

SampleMoments sample_moments(const GroupSample& g);

/// Rows vech(x̃_k x̃_kᵀ) − (1/n)Σ_l vech(x̃_l x̃_lᵀ), with x̃_k = x_k − x̄.
MatrixXd centered_products(const GroupSample& g);

/// (1/(n−1)) Σ_k c_k c_kᵀ over the rows c_k of centered_products.
MatrixXd sigma_hat(const GroupSample& g);

/// Diagonal of Λ(v) = diag(vech(w wᵀ))^{−1/2}, w = (v_11, …, v_dd).
VectorXd lambda_scaling(const VectorXd& v_hat, const Dims& dims);

/// M(v, r) = [L − ½ diag(r) M1] · Λ(v).
MatrixXd m_transform(const VectorXd& v_hat, const VectorXd& r_hat, const Dims& dims);

MomentSet compute_moments(const GroupSample& g);

PooledMoments pooled_moments(std::span<const GroupSample> groups);

/// Pools precomputed per-group moments (all must share d).
PooledMoments pool(std::vector<MomentSet> groups);

}  // namespace corrtest
