#include "corrtest/hypotheses.hpp"

#include "corrtest/errors.hpp"
#include "corrtest/linalg.hpp"

#include <cmath>

namespace corrtest {

int HypothesisSpec::rank() const {
    return numerical_rank(C);
}

HypothesisSpec equal_correlation_matrices(int a, const Dims& dims) {
    if (a < 2) throw ArgumentError("equal-correlation-matrices hypothesis needs at least 2 groups");
    HypothesisSpec h;
    h.a = a;
    h.dims = Dims::make(dims.d, a);
    h.C = kronecker(centering_projector(a), MatrixXd::Identity(dims.p_u, dims.p_u));
    h.zeta = VectorXd::Zero(a * dims.p_u);
    h.label = "equal-corr-matrices";
    return h;
}

HypothesisSpec identity_correlation(const Dims& dims) {
    if (dims.a != 1) throw ArgumentError("identity-correlation hypothesis is a one-group hypothesis");
    HypothesisSpec h;
    h.a = 1;
    h.dims = Dims::make(dims.d, 1);
    h.C = MatrixXd::Identity(dims.p_u, dims.p_u);
    h.zeta = VectorXd::Zero(dims.p_u);
    h.label = "identity-corr";
    return h;
}

HypothesisSpec given_correlation(const MatrixXd& R) {
    if (R.rows() != R.cols()) throw ArgumentError("given correlation matrix must be square");
    const int d = static_cast<int>(R.rows());
    if (d < 2) throw ArgumentError("given correlation matrix must be at least 2x2");
    for (int j = 0; j < d; ++j) {
        if (std::abs(R(j, j) - 1.0) > 1e-12) {
            throw ArgumentError("given correlation matrix must have a unit diagonal");
        }
        for (int k = 0; k < d; ++k) {
            if (std::abs(R(j, k) - R(k, j)) > 1e-12) {
                throw ArgumentError("given correlation matrix must be symmetric");
            }
            if (std::abs(R(j, k)) > 1.0) {
                throw ArgumentError("given correlation matrix has an entry outside [-1, 1]");
            }
        }
    }
    const Dims dims = Dims::make(d, 1);
    HypothesisSpec h;
    h.a = 1;
    h.dims = dims;
    h.C = MatrixXd::Identity(dims.p_u, dims.p_u);
    h.zeta = vech_minus(R);
    h.label = "given-corr";
    return h;
}

HypothesisSpec equal_correlations(const Dims& dims) {
    if (dims.a != 1) throw ArgumentError("equal-correlations hypothesis is a one-group hypothesis");
    if (dims.p_u < 2) throw ArgumentError("equal-correlations hypothesis needs d >= 3");
    HypothesisSpec h;
    h.a = 1;
    h.dims = Dims::make(dims.d, 1);
    h.C = centering_projector(dims.p_u);
    h.zeta = VectorXd::Zero(dims.p_u);
    h.label = "equal-correlations";
    return h;
}

HypothesisSpec custom(const MatrixXd& C, const VectorXd& zeta, int a, const Dims& dims,
                      std::string label) {
    if (a < 1) throw ArgumentError("custom hypothesis: group count must be positive");
    if (C.rows() < 1) throw ArgumentError("custom hypothesis: C needs at least one row");
    if (C.cols() != static_cast<Eigen::Index>(a) * dims.p_u) {
        throw ArgumentError("custom hypothesis: C has " + std::to_string(C.cols()) +
                            " columns, expected a*p_u = " + std::to_string(a * dims.p_u));
    }
    if (zeta.size() != C.rows()) {
        throw ArgumentError("custom hypothesis: zeta has length " + std::to_string(zeta.size()) +
                            ", expected " + std::to_string(C.rows()));
    }
    if (!C.allFinite() || !zeta.allFinite()) {
        throw ArgumentError("custom hypothesis: non-finite entries");
    }
    if ((C.array() == 0.0).all()) throw ArgumentError("custom hypothesis: C is identically zero");
    HypothesisSpec h;
    h.C = C;
    h.zeta = zeta;
    h.a = a;
    h.dims = Dims::make(dims.d, a);
    h.label = std::move(label);
    return h;
}

}  // namespace corrtest
