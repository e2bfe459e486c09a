#include "corrtest/combined.hpp"

#include "corrtest/errors.hpp"
#include "corrtest/linalg.hpp"
#include "corrtest/parallel.hpp"
#include "corrtest/quadform.hpp"
#include "corrtest/rng.hpp"

#include <algorithm>
#include <cmath>

namespace corrtest {

namespace {

constexpr std::size_t kChunk = 64;

void check_alpha(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw ArgumentError("alpha must lie in (0, 1)");
}

}  // namespace

std::string to_string(Classification c) {
    switch (c) {
        case Classification::NoRejection: return "no-rejection";
        case Classification::EqualCorrelationDifferentVariances:
            return "equal-correlation-different-variances";
        case Classification::DifferentDependence: return "different-dependence";
    }
    return "unknown";
}

std::string coordinate_label(const Dims& dims, int coord) {
    if (coord < 0 || coord >= dims.p) throw ArgumentError("coordinate out of range");
    if (coord < dims.d) return "var(" + std::to_string(coord + 1) + ")";
    int l = coord - dims.d;
    for (int j = 0; j < dims.d; ++j) {
        const int row = dims.d - j - 1;
        if (l < row) return "corr(" + std::to_string(j + 1) + "," + std::to_string(j + l + 2) + ")";
        l -= row;
    }
    return {};
}

MatrixXd stacked_map(const MomentSet& m) {
    const StructuralMatrices s = structural(m.dims.d);
    MatrixXd k(m.dims.p, m.dims.p);
    k.topRows(m.dims.d) = s.A_sel;
    k.bottomRows(m.dims.p_u) = m.M_hat;
    return k;
}

ContrastStatistic contrast_statistic(const GroupSample& g1, const GroupSample& g2) {
    if (g1.d() != g2.d()) {
        throw DimensionError("combined test: groups have " + std::to_string(g1.d()) + " and " +
                             std::to_string(g2.d()) + " variables");
    }
    ContrastStatistic cs;
    cs.groups = {compute_moments(g1), compute_moments(g2)};
    cs.dims = Dims::make(g1.d(), 2);
    cs.N = g1.n() + g2.n();
    const int d = cs.dims.d;
    auto coords = [d](const MomentSet& m) {
        VectorXd c(m.dims.p);
        c.head(d) = m.V_hat.diagonal();
        c.tail(m.dims.p_u) = m.r_hat;
        return c;
    };
    cs.T = std::sqrt(static_cast<double>(cs.N)) * (coords(cs.groups[0]) - coords(cs.groups[1]));
    cs.Gamma_hat = MatrixXd::Zero(cs.dims.p, cs.dims.p);
    for (const auto& m : cs.groups) {
        const MatrixXd k = stacked_map(m);
        cs.Gamma_hat += (static_cast<double>(cs.N) / m.n) * k * m.Sigma_hat * k.transpose();
    }
    cs.Gamma_hat = 0.5 * (cs.Gamma_hat + cs.Gamma_hat.transpose());
    return cs;
}

Classification classify(const Dims& dims, const std::vector<int>& flagged) {
    if (flagged.empty()) return Classification::NoRejection;
    for (int c : flagged) {
        if (c >= dims.d) return Classification::DifferentDependence;
    }
    return Classification::EqualCorrelationDifferentVariances;
}

CombinedVerdict equicoordinate_test(const ContrastStatistic& cs, double alpha, int W,
                                    std::uint64_t seed) {
    check_alpha(alpha);
    if (W < 100) throw ConfigError("Monte-Carlo size W must be at least 100");
    const int p = cs.dims.p;
    const VectorXd diag = cs.Gamma_hat.diagonal();
    for (int l = 0; l < p; ++l) {
        if (!(diag(l) > 0.0)) {
            throw DegenerateDataError("equicoordinate test needs a positive variance for " +
                                      coordinate_label(cs.dims, l) +
                                      "; use the Taylor procedure instead");
        }
    }
    const VectorXd inv_sd = diag.cwiseSqrt().cwiseInverse();
    const MatrixXd corr = inv_sd.asDiagonal() * cs.Gamma_hat * inv_sd.asDiagonal();
    const MatrixXd root = psd_sqrt(corr, "standardized Gamma_hat");

    std::vector<double> maxima(static_cast<std::size_t>(W));
    const std::size_t chunks = (maxima.size() + kChunk * 16 - 1) / (kChunk * 16);
    parallel_for(chunks, [&](std::size_t c) {
        Engine gen = stream(seed, c);
        StdNormal normal;
        VectorXd xi(p);
        const std::size_t end = std::min(maxima.size(), (c + 1) * kChunk * 16);
        for (std::size_t w = c * kChunk * 16; w < end; ++w) {
            for (int l = 0; l < p; ++l) xi(l) = normal(gen);
            maxima[w] = (root * xi).cwiseAbs().maxCoeff();
        }
    });
    std::sort(maxima.begin(), maxima.end());
    const double z = upper_order_statistic(maxima, 1.0 - alpha);

    CombinedVerdict v;
    v.procedure = "equicoordinate";
    v.critical_value = z;
    const VectorXd t_std = inv_sd.cwiseProduct(cs.T);
    for (int l = 0; l < p; ++l) {
        v.per_coordinate_quantiles.push_back(z / inv_sd(l));
        if (std::abs(t_std(l)) > z) v.flagged.push_back(l);
    }
    v.reject_any = !v.flagged.empty();
    v.classification = classify(cs.dims, v.flagged);
    v.beta_tilde = std::nan("");
    return v;
}

MatrixXd combined_taylor_draws(const ContrastStatistic& cs, int B, std::uint64_t seed) {
    if (B < 100) throw ConfigError("combined test needs at least 100 replicates, got " +
                                   std::to_string(B));
    const int p = cs.dims.p;
    const int d = cs.dims.d;
    std::vector<TaylorContext> ctx;
    std::vector<MatrixXd> maps;
    for (const auto& m : cs.groups) {
        ctx.push_back(TaylorContext::make(m));
        maps.push_back(stacked_map(m));
    }
    const double root_N = std::sqrt(static_cast<double>(cs.N));
    MatrixXd draws(p, B);
    const std::size_t chunks = (static_cast<std::size_t>(B) + kChunk - 1) / kChunk;
    parallel_for(chunks, [&](std::size_t c) {
        Engine gen = stream(seed, c);
        StdNormal normal;
        VectorXd z(p);
        const auto end = std::min<std::size_t>(static_cast<std::size_t>(B), (c + 1) * kChunk);
        for (std::size_t b = c * kChunk; b < end; ++b) {
            VectorXd t = VectorXd::Zero(p);
            for (std::size_t i = 0; i < ctx.size(); ++i) {
                for (int l = 0; l < p; ++l) z(l) = normal(gen);
                const VectorXd y = ctx[i].Sigma_root * z;
                const double root_n = std::sqrt(static_cast<double>(ctx[i].n));
                VectorXd tay = maps[i] * y;
                tay.tail(p - d) += taylor_f(ctx[i], y) / root_n;
                const double sign = i == 0 ? 1.0 : -1.0;
                t += sign * tay / root_n;
            }
            draws.col(static_cast<Eigen::Index>(b)) = root_N * t;
        }
    });
    return draws;
}

BetaSearch beta_search(const MatrixXd& draws, double alpha) {
    check_alpha(alpha);
    const auto p = draws.rows();
    const auto B = static_cast<int>(draws.cols());
    if (B < 1) throw ArgumentError("beta_search: no draws");
    BetaSearch out;
    out.sorted = draws;
    for (Eigen::Index l = 0; l < p; ++l) {
        auto row = out.sorted.row(l);
        std::vector<double> v(row.begin(), row.end());
        std::sort(v.begin(), v.end());
        for (int b = 0; b < B; ++b) row(b) = v[static_cast<std::size_t>(b)];
    }
    // Draw b first exceeds coordinate ℓ's quantile at grid index k ≥ B − #{values < T^b_ℓ};
    // its family-wise onset is the minimum over ℓ.
    std::vector<int> onset_count(static_cast<std::size_t>(B) + 1, 0);
    for (int b = 0; b < B; ++b) {
        int onset = B;
        for (Eigen::Index l = 0; l < p; ++l) {
            const auto row = out.sorted.row(l);
            const double x = draws(l, b);
            const auto less = std::lower_bound(row.begin(), row.end(), x) - row.begin();
            onset = std::min(onset, B - static_cast<int>(less));
        }
        ++onset_count[static_cast<std::size_t>(onset)];
    }
    out.fwer.resize(static_cast<std::size_t>(B));
    int cumulative = 0;
    out.k = 0;
    for (int k = 0; k < B; ++k) {
        cumulative += onset_count[static_cast<std::size_t>(k)];
        out.fwer[static_cast<std::size_t>(k)] = static_cast<double>(cumulative) / B;
        if (out.fwer[static_cast<std::size_t>(k)] <= alpha) out.k = k;
    }
    out.beta = static_cast<double>(out.k) / B;
    return out;
}

CombinedVerdict taylor_combined_test(const ContrastStatistic& cs, double alpha, int B,
                                     std::uint64_t seed, bool two_sided) {
    check_alpha(alpha);
    MatrixXd draws = combined_taylor_draws(cs, B, seed);
    if (two_sided) draws = draws.cwiseAbs();
    const BetaSearch search = beta_search(draws, alpha);

    CombinedVerdict v;
    v.procedure = two_sided ? "taylor" : "taylor-one-sided";
    v.beta_tilde = search.beta;
    const int idx = B - search.k - 1;
    double worst = 0.0;
    for (int l = 0; l < cs.dims.p; ++l) {
        const double q = search.sorted(l, idx);
        const double t = two_sided ? std::abs(cs.T(l)) : cs.T(l);
        const double ratio = (t == 0.0 && q == 0.0) ? 1.0 : t / q;
        v.per_coordinate_quantiles.push_back(q);
        if (ratio > 1.0) v.flagged.push_back(l);
        worst = std::max(worst, ratio);
    }
    v.critical_value = 1.0;
    v.reject_any = worst > 1.0;
    v.classification = classify(cs.dims, v.flagged);
    return v;
}

}  // namespace corrtest
