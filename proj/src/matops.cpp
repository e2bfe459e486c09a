#include "corrtest/matops.hpp"

#include "corrtest/errors.hpp"

#include <string>

namespace corrtest {

namespace {

void require_square(const MatrixXd& x) {
    if (x.rows() != x.cols()) {
        throw DimensionError("expected a square matrix, got " + std::to_string(x.rows()) + "x" +
                             std::to_string(x.cols()));
    }
}

void require_dim(int d) {
    if (d < 2) {
        throw DimensionError("dimension d must be at least 2, got " + std::to_string(d));
    }
}

// vech of an integer matrix, kept as ints so they can be used as indices.
std::vector<int> vech_int(const std::vector<std::vector<int>>& h) {
    const int d = static_cast<int>(h.size());
    std::vector<int> out;
    out.reserve(static_cast<std::size_t>(d * (d + 1) / 2));
    for (int j = 0; j < d; ++j) {
        for (int k = j; k < d; ++k) out.push_back(h[j][k]);
    }
    return out;
}

std::vector<int> vech_minus_int(const std::vector<std::vector<int>>& h) {
    const int d = static_cast<int>(h.size());
    std::vector<int> out;
    for (int j = 0; j < d; ++j) {
        for (int k = j + 1; k < d; ++k) out.push_back(h[j][k]);
    }
    return out;
}

}  // namespace

Dims Dims::make(int d, int a) {
    require_dim(d);
    if (a < 1) throw ArgumentError("group count a must be at least 1");
    Dims dims;
    dims.d = d;
    dims.p = d * (d + 1) / 2;
    dims.p_u = d * (d - 1) / 2;
    dims.a = a;
    return dims;
}

VectorXd vech(const MatrixXd& x) {
    require_square(x);
    const int d = static_cast<int>(x.rows());
    require_dim(d);
    VectorXd out(d * (d + 1) / 2);
    int pos = 0;
    for (int j = 0; j < d; ++j) {
        for (int k = j; k < d; ++k) out(pos++) = x(j, k);
    }
    return out;
}

VectorXd vech_minus(const MatrixXd& x) {
    require_square(x);
    const int d = static_cast<int>(x.rows());
    require_dim(d);
    VectorXd out(d * (d - 1) / 2);
    int pos = 0;
    for (int j = 0; j < d; ++j) {
        for (int k = j + 1; k < d; ++k) out(pos++) = x(j, k);
    }
    return out;
}

MatrixXd unvech(const VectorXd& v, int d) {
    require_dim(d);
    if (v.size() != d * (d + 1) / 2) throw DimensionError("unvech: length does not match d");
    MatrixXd x(d, d);
    int pos = 0;
    for (int j = 0; j < d; ++j) {
        for (int k = j; k < d; ++k) {
            x(j, k) = v(pos);
            x(k, j) = v(pos);
            ++pos;
        }
    }
    return x;
}

MatrixXd unvech_minus_corr(const VectorXd& r, int d) {
    require_dim(d);
    if (r.size() != d * (d - 1) / 2) throw DimensionError("unvech_minus: length does not match d");
    MatrixXd x = MatrixXd::Identity(d, d);
    int pos = 0;
    for (int j = 0; j < d; ++j) {
        for (int k = j + 1; k < d; ++k) {
            x(j, k) = r(pos);
            x(k, j) = r(pos);
            ++pos;
        }
    }
    return x;
}

IndexVectors index_vectors(int d) {
    require_dim(d);
    const int p = d * (d + 1) / 2;
    IndexVectors iv;
    iv.a_idx.reserve(static_cast<std::size_t>(d));
    for (int k = 1; k <= d; ++k) {
        int a_k = 1;
        for (int j = 1; j <= k - 1; ++j) a_k += d + 1 - j;
        iv.a_idx.push_back(a_k);
    }
    std::size_t next = 0;
    for (int pos = 1; pos <= p; ++pos) {
        if (next < iv.a_idx.size() && iv.a_idx[next] == pos) {
            ++next;
        } else {
            iv.b_idx.push_back(pos);
        }
    }
    return iv;
}

StructuralMatrices structural(int d) {
    require_dim(d);
    const int p = d * (d + 1) / 2;
    const int p_u = d * (d - 1) / 2;
    const IndexVectors iv = index_vectors(d);

    // H = 1_d · aᵀ, i.e. H_jk = a_k.
    std::vector<std::vector<int>> h(d, std::vector<int>(d));
    std::vector<std::vector<int>> ht(d, std::vector<int>(d));
    for (int j = 0; j < d; ++j) {
        for (int k = 0; k < d; ++k) {
            h[j][k] = iv.a_idx[k];
            ht[k][j] = iv.a_idx[k];
        }
    }
    const std::vector<int> h1 = vech_minus_int(h);
    const std::vector<int> h2 = vech_minus_int(ht);
    const std::vector<int> h3 = vech_int(h);
    const std::vector<int> h4 = vech_int(ht);

    StructuralMatrices s;
    s.L = MatrixXd::Zero(p_u, p);
    s.M1 = MatrixXd::Zero(p_u, p);
    for (int l = 0; l < p_u; ++l) {
        s.L(l, iv.b_idx[l] - 1) = 1.0;
        s.M1(l, h1[l] - 1) += 1.0;
        s.M1(l, h2[l] - 1) += 1.0;
    }
    s.M2 = MatrixXd::Zero(p, p);
    s.M3 = MatrixXd::Zero(p, p);
    for (int l = 0; l < p; ++l) {
        s.M2(l, h4[l] - 1) = 1.0;
        s.M3(l, h3[l] - 1) = 1.0;
    }
    s.M4 = s.M2 + s.M3;
    s.M5 = vech(MatrixXd::Identity(d, d)).asDiagonal();
    s.M6 = MatrixXd::Zero(d, p);
    for (int l = 0; l < d; ++l) s.M6(l, iv.a_idx[l] - 1) = 1.0;
    s.A_sel = s.M6;
    return s;
}

MatrixXd direct_sum(std::span<const MatrixXd> blocks) {
    if (blocks.empty()) throw ArgumentError("direct_sum: empty block list");
    Eigen::Index rows = 0;
    for (const auto& b : blocks) {
        require_square(b);
        rows += b.rows();
    }
    MatrixXd out = MatrixXd::Zero(rows, rows);
    Eigen::Index off = 0;
    for (const auto& b : blocks) {
        out.block(off, off, b.rows(), b.cols()) = b;
        off += b.rows();
    }
    return out;
}

MatrixXd centering_projector(int k) {
    if (k < 1) throw ArgumentError("centering_projector: k must be at least 1");
    return MatrixXd::Identity(k, k) - MatrixXd::Constant(k, k, 1.0 / k);
}

MatrixXd kronecker(const MatrixXd& a, const MatrixXd& b) {
    MatrixXd out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

}  // namespace corrtest
