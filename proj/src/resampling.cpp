#include "corrtest/resampling.hpp"

#include "corrtest/errors.hpp"
#include "corrtest/linalg.hpp"
#include "corrtest/parallel.hpp"
#include "corrtest/rng.hpp"

#include <cmath>

namespace corrtest {

namespace {

constexpr std::size_t kChunk = 64;

// Pieces of N‖C y‖² / tr(C S Cᵀ) split by group column block.
struct BlockedForm {
    int N = 0;
    std::vector<MatrixXd> C_blocks;  // m×p_u each
    std::vector<MatrixXd> gram;      // C_iᵀ C_i
    std::vector<double> weight;      // N/n_i
};

BlockedForm blocked_form(const PooledMoments& pm, const HypothesisSpec& h) {
    check_compatible(pm, h);
    BlockedForm bf;
    bf.N = pm.N;
    const int p_u = pm.dims.p_u;
    for (int i = 0; i < pm.dims.a; ++i) {
        const MatrixXd ci = h.C.middleCols(static_cast<Eigen::Index>(i) * p_u, p_u);
        bf.gram.push_back(ci.transpose() * ci);
        bf.C_blocks.push_back(ci);
        bf.weight.push_back(static_cast<double>(pm.N) / pm.groups[static_cast<std::size_t>(i)].n);
    }
    return bf;
}

double quad_ratio(int N, const VectorXd& cy, double trace) {
    // A resample with no spread in the hypothesis direction carries no evidence.
    if (!(trace > 0.0)) return 0.0;
    return static_cast<double>(N) * cy.squaredNorm() / trace;
}

template <typename Draw>
std::vector<double> chunked_draws(int B, std::uint64_t seed, Draw draw) {
    std::vector<double> out(static_cast<std::size_t>(B));
    const std::size_t chunks = (out.size() + kChunk - 1) / kChunk;
    parallel_for(chunks, [&](std::size_t c) {
        Engine gen = stream(seed, c);
        const std::size_t end = std::min(out.size(), (c + 1) * kChunk);
        for (std::size_t b = c * kChunk; b < end; ++b) out[b] = draw(gen);
    });
    return out;
}

void fill_normal(Engine& gen, StdNormal& normal, MatrixXd& z) {
    double* x = z.data();
    for (Eigen::Index i = 0; i < z.size(); ++i) x[i] = normal(gen);
}

MethodSpec method_of(ResamplingEngine engine, bool factor) {
    MethodSpec spec;
    spec.small_sample_factor = factor;
    switch (engine) {
        case ResamplingEngine::Parametric: spec.method = Method::AtsPar; break;
        case ResamplingEngine::Wild: spec.method = Method::AtsWild; break;
        case ResamplingEngine::Taylor: spec.method = Method::AtsTay; break;
    }
    return spec;
}

}  // namespace

WildWeight parse_wild_weight(const std::string& tag) {
    if (tag == "rademacher") return WildWeight::Rademacher;
    if (tag == "gaussian") return WildWeight::Gaussian;
    throw ArgumentError("unknown wild-bootstrap weight '" + tag + "' (rademacher | gaussian)");
}

void ResamplingConfig::validate() const {
    if (B < 100) {
        throw ConfigError("resampling needs at least 100 replicates, got " + std::to_string(B));
    }
}

TaylorContext TaylorContext::make(const MomentSet& m) {
    TaylorContext ctx;
    ctx.dims = m.dims;
    ctx.n = m.n;
    ctx.lambda = lambda_scaling(m.v_hat, m.dims);
    ctx.r_hat = m.r_hat;
    ctx.R_hat = m.R_hat;
    ctx.M_hat = m.M_hat;
    // Root of the standardized Σ̂, scaled back: equivariant under rescaling of the
    // variables, so draws on rescaled data are the rescaled draws.
    VectorXd sd = m.Sigma_hat.diagonal().cwiseMax(0.0).cwiseSqrt();
    for (Eigen::Index i = 0; i < sd.size(); ++i) {
        if (!(sd(i) > 0.0)) sd(i) = 1.0;
    }
    const VectorXd inv = sd.cwiseInverse();
    ctx.Sigma_root = sd.asDiagonal() *
                     psd_sqrt(inv.asDiagonal() * m.Sigma_hat * inv.asDiagonal(), "Sigma_hat");
    const int d = m.dims.d;
    int pos = 0;
    for (int j = 0; j < d; ++j) {
        for (int k = j; k < d; ++k) {
            if (j == k) {
                ctx.diag_pos.push_back(pos);
            } else {
                ctx.off_pos.push_back(pos);
                ctx.pairs.emplace_back(j, k);
            }
            ++pos;
        }
    }
    return ctx;
}

VectorXd taylor_f(const TaylorContext& ctx, const VectorXd& y) {
    if (y.size() != ctx.dims.p) {
        throw DimensionError("taylor_f: y has length " + std::to_string(y.size()) + ", expected " +
                             std::to_string(ctx.dims.p));
    }
    const VectorXd u = ctx.lambda.cwiseProduct(y);
    VectorXd w(ctx.dims.d);
    for (int j = 0; j < ctx.dims.d; ++j) w(j) = u(ctx.diag_pos[static_cast<std::size_t>(j)]);
    VectorXd f(ctx.dims.p_u);
    for (int l = 0; l < ctx.dims.p_u; ++l) {
        const auto [j, k] = ctx.pairs[static_cast<std::size_t>(l)];
        const double r = ctx.r_hat(l);
        const double ujk = u(ctx.off_pos[static_cast<std::size_t>(l)]);
        f(l) = 0.25 * w(j) * w(k) * ctx.R_hat(j, k) - 0.5 * ujk * (w(j) + w(k)) +
               0.375 * r * (w(j) * w(j) + w(k) * w(k));
    }
    return f;
}

std::vector<double> parametric_bootstrap_draws(const PooledMoments& pm, const HypothesisSpec& h,
                                               const ResamplingConfig& cfg) {
    cfg.validate();
    const BlockedForm bf = blocked_form(pm, h);
    const int p_u = pm.dims.p_u;
    // Y = Υ̂^{1/2} z, so C_i Ȳ = (C_i Υ̂^{1/2}) z̄ and tr(C_i S_Y C_iᵀ) = tr(Υ̂^{1/2} C_iᵀC_i Υ̂^{1/2} S_z).
    std::vector<MatrixXd> c_root;
    std::vector<MatrixXd> h_root;
    for (std::size_t i = 0; i < pm.groups.size(); ++i) {
        const MatrixXd root = psd_sqrt(pm.groups[i].Upsilon_hat, "Upsilon_hat");
        c_root.push_back(bf.C_blocks[i] * root);
        h_root.push_back(root * bf.gram[i] * root);
    }
    return chunked_draws(cfg.B, cfg.seed, [&](Engine& gen) {
        StdNormal normal;
        VectorXd cy = VectorXd::Zero(h.m());
        double trace = 0.0;
        for (std::size_t i = 0; i < pm.groups.size(); ++i) {
            const int n = pm.groups[i].n;
            MatrixXd z(p_u, n);
            fill_normal(gen, normal, z);
            const VectorXd zbar = z.rowwise().mean();
            z.colwise() -= zbar;
            MatrixXd sz = MatrixXd::Zero(p_u, p_u);
            sz.selfadjointView<Eigen::Lower>().rankUpdate(z);
            sz = sz.selfadjointView<Eigen::Lower>();
            cy.noalias() += c_root[i] * zbar;
            trace += bf.weight[i] * h_root[i].cwiseProduct(sz).sum() / (n - 1);
        }
        return quad_ratio(bf.N, cy, trace);
    });
}

std::vector<double> wild_bootstrap_draws(std::span<const GroupSample> groups,
                                         const PooledMoments& pm, const HypothesisSpec& h,
                                         const ResamplingConfig& cfg) {
    cfg.validate();
    if (groups.size() != pm.groups.size()) {
        throw ArgumentError("wild bootstrap: group data and moments disagree");
    }
    const BlockedForm bf = blocked_form(pm, h);
    // Rows D_ik = M̂_i·(centered product k); the bootstrap rows are W_ik·D_ik.
    std::vector<MatrixXd> cd;     // (C_i D_iᵀ), m×n_i
    std::vector<VectorXd> quad;   // D_ikᵀ C_iᵀC_i D_ik
    std::vector<MatrixXd> gd;     // C_iᵀC_i D_iᵀ, p_u×n_i
    std::vector<MatrixXd> dt;     // D_iᵀ, p_u×n_i
    for (std::size_t i = 0; i < groups.size(); ++i) {
        if (groups[i].n() != pm.groups[i].n) {
            throw ArgumentError("wild bootstrap: group data and moments disagree");
        }
        const MatrixXd d_t = pm.groups[i].M_hat * centered_products(groups[i]).transpose();
        cd.push_back(bf.C_blocks[i] * d_t);
        gd.push_back(bf.gram[i] * d_t);
        quad.push_back(d_t.cwiseProduct(gd.back()).colwise().sum().transpose());
        dt.push_back(d_t);
    }
    const bool rademacher = cfg.wild_weight == WildWeight::Rademacher;
    return chunked_draws(cfg.B, cfg.seed, [&](Engine& gen) {
        StdNormal normal;
        std::bernoulli_distribution coin(0.5);
        VectorXd cy = VectorXd::Zero(h.m());
        double trace = 0.0;
        for (std::size_t i = 0; i < groups.size(); ++i) {
            const int n = pm.groups[i].n;
            VectorXd wts(n);
            for (int k = 0; k < n; ++k) wts(k) = rademacher ? (coin(gen) ? 1.0 : -1.0) : normal(gen);
            const VectorXd ybar = dt[i] * wts / n;
            // (n−1)·tr(G S*) = Σ W_k² D_kᵀ G D_k − n Ȳᵀ G Ȳ
            const double ss = wts.cwiseAbs2().dot(quad[i]) - n * ybar.dot(bf.gram[i] * ybar);
            cy.noalias() += cd[i] * wts / n;
            trace += bf.weight[i] * ss / (n - 1);
        }
        return quad_ratio(bf.N, cy, trace);
    });
}

std::vector<double> taylor_draws(const PooledMoments& pm, const HypothesisSpec& h,
                                 const ResamplingConfig& cfg) {
    cfg.validate();
    const BlockedForm bf = blocked_form(pm, h);
    const double trace = ats_trace(h.C, pm.Upsilon_pooled);
    if (!(trace > 0.0)) {
        throw DegenerateHypothesisError("tr(C Upsilon C^T) is zero: the hypothesis has no variation");
    }
    std::vector<TaylorContext> ctx;
    for (const auto& g : pm.groups) ctx.push_back(TaylorContext::make(g));
    const int p = pm.dims.p;
    return chunked_draws(cfg.B, cfg.seed, [&](Engine& gen) {
        StdNormal normal;
        VectorXd cy = VectorXd::Zero(h.m());
        MatrixXd z(p, 1);
        for (std::size_t i = 0; i < ctx.size(); ++i) {
            fill_normal(gen, normal, z);
            const VectorXd y = ctx[i].Sigma_root * z.col(0);
            const double root_n = std::sqrt(static_cast<double>(ctx[i].n));
            VectorXd tay = ctx[i].M_hat * y;
            if (cfg.taylor_second_order) tay += taylor_f(ctx[i], y) / root_n;
            cy.noalias() += bf.C_blocks[i] * tay / root_n;
        }
        return static_cast<double>(bf.N) * cy.squaredNorm() / trace;
    });
}

TestReport parametric_bootstrap_test(const PooledMoments& pm, const HypothesisSpec& h,
                                     double alpha, const ResamplingConfig& cfg) {
    const double stat = ats_statistic(pm, h, cfg.small_sample_factor);
    std::vector<double> draws = parametric_bootstrap_draws(pm, h, cfg);
    return make_report(stat, draws, alpha,
                       method_of(ResamplingEngine::Parametric, cfg.small_sample_factor), cfg.seed);
}

TestReport wild_bootstrap_test(std::span<const GroupSample> groups, const PooledMoments& pm,
                               const HypothesisSpec& h, double alpha, const ResamplingConfig& cfg) {
    const double stat = ats_statistic(pm, h, cfg.small_sample_factor);
    std::vector<double> draws = wild_bootstrap_draws(groups, pm, h, cfg);
    return make_report(stat, draws, alpha,
                       method_of(ResamplingEngine::Wild, cfg.small_sample_factor), cfg.seed);
}

TestReport taylor_mc_test(const PooledMoments& pm, const HypothesisSpec& h, double alpha,
                          const ResamplingConfig& cfg) {
    const double stat = ats_statistic(pm, h, cfg.small_sample_factor);
    std::vector<double> draws = taylor_draws(pm, h, cfg);
    return make_report(stat, draws, alpha,
                       method_of(ResamplingEngine::Taylor, cfg.small_sample_factor), cfg.seed);
}

}  // namespace corrtest
