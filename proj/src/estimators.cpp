#include "corrtest/estimators.hpp"

#include "corrtest/errors.hpp"

#include <cmath>
#include <string>

namespace corrtest {

namespace {

std::string column_name(const GroupSample& g, Eigen::Index j) {
    std::string name = "column " + std::to_string(j + 1);
    if (!g.label().empty()) name += " of " + g.label();
    return name;
}

}  // namespace

GroupSample::GroupSample(MatrixXd data, std::string label)
    : data_(std::move(data)), label_(std::move(label)) {
    const std::string where = label_.empty() ? std::string("group") : label_;
    if (data_.cols() < 2) {
        throw DimensionError(where + ": need at least 2 variables, got " +
                             std::to_string(data_.cols()));
    }
    if (data_.rows() < 2) {
        throw DegenerateDataError(where + ": need at least 2 observations, got " +
                                  std::to_string(data_.rows()));
    }
    if (!data_.allFinite()) throw DegenerateDataError(where + ": non-finite value in data");
    const VectorXd mean = data_.colwise().mean();
    for (Eigen::Index j = 0; j < data_.cols(); ++j) {
        const double ss = (data_.col(j).array() - mean(j)).square().sum();
        if (!(ss > 0.0)) {
            throw DegenerateDataError(column_name(*this, j) + " has zero sample variance");
        }
    }
}

SampleMoments sample_moments(const GroupSample& g) {
    const MatrixXd& x = g.data();
    SampleMoments m;
    m.mean = x.colwise().mean().transpose();
    const MatrixXd xc = x.rowwise() - m.mean.transpose();
    m.V_hat = (xc.transpose() * xc) / static_cast<double>(g.n() - 1);
    m.V_hat = 0.5 * (m.V_hat + m.V_hat.transpose());
    m.v_hat = vech(m.V_hat);
    const VectorXd sd = m.V_hat.diagonal().cwiseSqrt();
    for (Eigen::Index j = 0; j < sd.size(); ++j) {
        if (!(sd(j) > 0.0)) throw DegenerateDataError(column_name(g, j) + " has zero sample variance");
    }
    m.R_hat = sd.cwiseInverse().asDiagonal() * m.V_hat * sd.cwiseInverse().asDiagonal();
    m.R_hat.diagonal().setOnes();
    m.R_hat = m.R_hat.cwiseMax(-1.0).cwiseMin(1.0);
    m.r_hat = vech_minus(m.R_hat);
    return m;
}

MatrixXd centered_products(const GroupSample& g) {
    const MatrixXd& x = g.data();
    const int n = g.n();
    const int d = g.d();
    const int p = d * (d + 1) / 2;
    const VectorXd mean = x.colwise().mean().transpose();
    MatrixXd prod(n, p);
    for (int k = 0; k < n; ++k) {
        const VectorXd xt = x.row(k).transpose() - mean;
        int pos = 0;
        for (int j = 0; j < d; ++j) {
            for (int l = j; l < d; ++l) prod(k, pos++) = xt(j) * xt(l);
        }
    }
    const Eigen::RowVectorXd avg = prod.colwise().mean();
    prod.rowwise() -= avg;
    return prod;
}

MatrixXd sigma_hat(const GroupSample& g) {
    if (g.n() < 2) throw DegenerateDataError("sigma_hat: need at least 2 observations");
    const MatrixXd c = centered_products(g);
    MatrixXd s = (c.transpose() * c) / static_cast<double>(g.n() - 1);
    return 0.5 * (s + s.transpose());
}

VectorXd lambda_scaling(const VectorXd& v_hat, const Dims& dims) {
    if (v_hat.size() != dims.p) throw DimensionError("lambda_scaling: v_hat has wrong length");
    const IndexVectors iv = index_vectors(dims.d);
    VectorXd w(dims.d);
    for (int j = 0; j < dims.d; ++j) {
        w(j) = v_hat(iv.a_idx[j] - 1);
        if (!(w(j) > 0.0)) {
            throw DegenerateDataError("variance of variable " + std::to_string(j + 1) +
                                      " is not positive");
        }
    }
    const VectorXd outer = vech(w * w.transpose());
    return outer.cwiseSqrt().cwiseInverse();
}

MatrixXd m_transform(const VectorXd& v_hat, const VectorXd& r_hat, const Dims& dims) {
    if (r_hat.size() != dims.p_u) throw DimensionError("m_transform: r_hat has wrong length");
    const VectorXd lambda = lambda_scaling(v_hat, dims);
    const StructuralMatrices s = structural(dims.d);
    const MatrixXd inner = s.L - 0.5 * r_hat.asDiagonal() * s.M1;
    return inner * lambda.asDiagonal();
}

MomentSet compute_moments(const GroupSample& g) {
    const SampleMoments sm = sample_moments(g);
    MomentSet m;
    m.n = g.n();
    m.dims = Dims::make(g.d(), 1);
    m.mean = sm.mean;
    m.V_hat = sm.V_hat;
    m.v_hat = sm.v_hat;
    m.R_hat = sm.R_hat;
    m.r_hat = sm.r_hat;
    m.Sigma_hat = sigma_hat(g);
    m.M_hat = m_transform(m.v_hat, m.r_hat, m.dims);
    m.Upsilon_hat = m.M_hat * m.Sigma_hat * m.M_hat.transpose();
    m.Upsilon_hat = 0.5 * (m.Upsilon_hat + m.Upsilon_hat.transpose());
    return m;
}

PooledMoments pool(std::vector<MomentSet> groups) {
    if (groups.empty()) throw ArgumentError("pooled_moments: no groups");
    const int d = groups.front().dims.d;
    int total = 0;
    for (const auto& g : groups) {
        if (g.dims.d != d) {
            throw DimensionError("all groups must have the same number of variables (" +
                                 std::to_string(d) + " vs " + std::to_string(g.dims.d) + ")");
        }
        total += g.n;
    }
    PooledMoments pm;
    pm.dims = Dims::make(d, static_cast<int>(groups.size()));
    pm.N = total;
    const int p_u = pm.dims.p_u;
    pm.r_hat_pooled.resize(static_cast<Eigen::Index>(groups.size()) * p_u);
    std::vector<MatrixXd> blocks;
    blocks.reserve(groups.size());
    for (std::size_t i = 0; i < groups.size(); ++i) {
        pm.r_hat_pooled.segment(static_cast<Eigen::Index>(i) * p_u, p_u) = groups[i].r_hat;
        blocks.push_back((static_cast<double>(total) / groups[i].n) * groups[i].Upsilon_hat);
    }
    pm.Upsilon_pooled = direct_sum(blocks);
    pm.groups = std::move(groups);
    return pm;
}

PooledMoments pooled_moments(std::span<const GroupSample> groups) {
    if (groups.empty()) throw ArgumentError("pooled_moments: no groups");
    std::vector<MomentSet> sets;
    sets.reserve(groups.size());
    const int d = groups.front().d();
    for (const auto& g : groups) {
        if (g.d() != d) {
            throw DimensionError("all groups must have the same number of variables (" +
                                 std::to_string(d) + " vs " + std::to_string(g.d()) + ")");
        }
        sets.push_back(compute_moments(g));
    }
    return pool(std::move(sets));
}

}  // namespace corrtest
