#include "corrtest/linalg.hpp"

#include "corrtest/errors.hpp"

#include <cmath>
#include <string>

namespace corrtest {

namespace {

Eigen::SelfAdjointEigenSolver<MatrixXd> clipped_eigen(const MatrixXd& a, std::string_view what,
                                                      double rel_tol, VectorXd& clipped) {
    if (a.rows() != a.cols()) throw DimensionError(std::string(what) + ": not square");
    const MatrixXd sym = 0.5 * (a + a.transpose());
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(sym);
    if (es.info() != Eigen::Success) {
        throw NumericalError(std::string(what) + ": eigendecomposition failed");
    }
    clipped = es.eigenvalues();
    const double scale = clipped.size() ? clipped.cwiseAbs().maxCoeff() : 0.0;
    const double floor = -rel_tol * scale;
    for (Eigen::Index i = 0; i < clipped.size(); ++i) {
        if (clipped(i) < 0.0) {
            if (clipped(i) < floor) {
                throw NumericalError(std::string(what) + " is not positive semidefinite (eigenvalue " +
                                     std::to_string(clipped(i)) + ", largest magnitude " +
                                     std::to_string(scale) + ")");
            }
            clipped(i) = 0.0;
        }
    }
    return es;
}

}  // namespace

VectorXd sym_eigenvalues(const MatrixXd& a) {
    if (a.rows() != a.cols()) throw DimensionError("sym_eigenvalues: not square");
    const MatrixXd sym = 0.5 * (a + a.transpose());
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(sym, Eigen::EigenvaluesOnly);
    return es.eigenvalues();
}

MatrixXd psd_sqrt(const MatrixXd& a, std::string_view what, double rel_tol) {
    VectorXd lambda;
    const auto es = clipped_eigen(a, what, rel_tol, lambda);
    const MatrixXd& q = es.eigenvectors();
    return q * lambda.cwiseSqrt().asDiagonal() * q.transpose();
}

MatrixXd psd_repair(const MatrixXd& a, std::string_view what, double rel_tol) {
    VectorXd lambda;
    const auto es = clipped_eigen(a, what, rel_tol, lambda);
    const MatrixXd& q = es.eigenvectors();
    return q * lambda.asDiagonal() * q.transpose();
}

int numerical_rank(const MatrixXd& a, double rel_tol) {
    if (a.size() == 0) return 0;
    Eigen::JacobiSVD<MatrixXd> svd(a);
    const VectorXd& s = svd.singularValues();
    if (s.size() == 0 || s(0) <= 0.0) return 0;
    int rank = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i) {
        if (s(i) > rel_tol * s(0)) ++rank;
    }
    return rank;
}

}  // namespace corrtest
