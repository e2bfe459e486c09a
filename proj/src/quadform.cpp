#include "corrtest/quadform.hpp"

#include "corrtest/errors.hpp"
#include "corrtest/linalg.hpp"
#include "corrtest/parallel.hpp"
#include "corrtest/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace corrtest {

namespace {

constexpr std::size_t kChunk = 1024;

void check_alpha(double alpha) {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw ArgumentError("alpha must lie in (0, 1]");
}

std::vector<double> nonincreasing(const VectorXd& ev) {
    std::vector<double> out(ev.data(), ev.data() + ev.size());
    std::sort(out.begin(), out.end(), std::greater<>());
    return out;
}

// Clips round-off negatives; real negative mass means the inputs were not PSD.
void clip_eigenvalues(std::vector<double>& lambdas) {
    double scale = 0.0;
    for (double l : lambdas) scale = std::max(scale, std::abs(l));
    for (double& l : lambdas) {
        if (l < 0.0) {
            if (l < -1e-10 * scale) {
                throw NumericalError("limit eigenvalue " + std::to_string(l) +
                                     " is negative beyond tolerance");
            }
            l = 0.0;
        }
    }
}

}  // namespace

MethodSpec MethodSpec::parse(const std::string& tag) {
    std::string base = tag;
    MethodSpec spec;
    if (base.size() > 2 && base.ends_with("-m")) {
        spec.small_sample_factor = true;
        base.resize(base.size() - 2);
    }
    if (base == "ats-mc" || base == "ats") {
        spec.method = Method::AtsMc;
    } else if (base == "ats-par") {
        spec.method = Method::AtsPar;
    } else if (base == "ats-wild") {
        spec.method = Method::AtsWild;
    } else if (base == "ats-tay") {
        spec.method = Method::AtsTay;
    } else if (base == "atsfz-mc" || base == "atsfz") {
        spec.method = Method::AtsFzMc;
    } else {
        throw ArgumentError("unknown method '" + tag + "'");
    }
    return spec;
}

std::string MethodSpec::tag() const {
    std::string base;
    switch (method) {
        case Method::AtsMc: base = "ats-mc"; break;
        case Method::AtsPar: base = "ats-par"; break;
        case Method::AtsWild: base = "ats-wild"; break;
        case Method::AtsTay: base = "ats-tay"; break;
        case Method::AtsFzMc: base = "atsfz-mc"; break;
    }
    return small_sample_factor ? base + "-m" : base;
}

double upper_order_statistic(std::span<const double> sorted, double level) {
    if (sorted.empty()) throw ArgumentError("upper_order_statistic: no draws");
    const double w = static_cast<double>(sorted.size());
    // ⌈level·W⌉ with a guard against 0.95·10000 = 9500.000000000002 style round-off.
    const double pos = std::ceil(level * w - 1e-9 * w);
    if (pos <= 0.0) return -std::numeric_limits<double>::infinity();
    const auto idx = std::min(static_cast<std::size_t>(pos), sorted.size());
    return sorted[idx - 1];
}

double mc_p_value(std::span<const double> sorted, double statistic) {
    const auto first_ge = std::lower_bound(sorted.begin(), sorted.end(), statistic);
    const auto hits = static_cast<double>(std::distance(first_ge, sorted.end()));
    return (1.0 + hits) / (1.0 + static_cast<double>(sorted.size()));
}

TestReport make_report(double statistic, std::vector<double>& draws, double alpha,
                       const MethodSpec& method, std::uint64_t seed) {
    check_alpha(alpha);
    std::sort(draws.begin(), draws.end());
    TestReport r;
    r.statistic = statistic;
    r.alpha = alpha;
    r.critical_value = upper_order_statistic(draws, 1.0 - alpha);
    r.p_value = mc_p_value(draws, statistic);
    r.reject = statistic > r.critical_value;
    r.method = method.tag();
    r.reps = static_cast<int>(draws.size());
    r.seed = seed;
    return r;
}

double small_sample_factor(int N) {
    return static_cast<double>(N - 3) / static_cast<double>(N);
}

double ats_trace(const MatrixXd& C, const MatrixXd& upsilon) {
    return (C * upsilon * C.transpose()).trace();
}

void check_compatible(const PooledMoments& pm, const HypothesisSpec& h) {
    if (h.dims.d != pm.dims.d) {
        throw DimensionError("hypothesis is for d = " + std::to_string(h.dims.d) +
                             " but the data have d = " + std::to_string(pm.dims.d));
    }
    if (h.a != pm.dims.a) {
        throw ArgumentError("hypothesis '" + h.label + "' is for " + std::to_string(h.a) +
                            " group(s) but " + std::to_string(pm.dims.a) + " were supplied");
    }
    if (h.C.cols() != pm.r_hat_pooled.size()) {
        throw DimensionError("hypothesis matrix has the wrong number of columns");
    }
}

double ats_statistic(const PooledMoments& pm, const HypothesisSpec& h, bool factor) {
    check_compatible(pm, h);
    const double tr = ats_trace(h.C, pm.Upsilon_pooled);
    if (!(tr > 0.0)) {
        throw DegenerateHypothesisError("tr(C Upsilon C^T) is zero: the hypothesis has no variation");
    }
    const VectorXd diff = h.C * pm.r_hat_pooled - h.zeta;
    double stat = static_cast<double>(pm.N) * diff.squaredNorm() / tr;
    if (factor) stat *= small_sample_factor(pm.N);
    return stat;
}

std::vector<double> limit_eigenvalues(const MatrixXd& upsilon, const MatrixXd& C,
                                      const MatrixXd& E) {
    if (C.cols() != upsilon.rows() || E.rows() != C.rows() || E.cols() != C.rows()) {
        throw DimensionError("limit_eigenvalues: incompatible shapes");
    }
    const MatrixXd root = psd_sqrt(upsilon, "Upsilon");
    const MatrixXd Es = 0.5 * (E + E.transpose());
    const MatrixXd s = root * C.transpose() * Es * C * root;
    std::vector<double> lambdas = nonincreasing(sym_eigenvalues(s));
    clip_eigenvalues(lambdas);
    return lambdas;
}

std::vector<double> limit_eigenvalues(const PooledMoments& pm, const HypothesisSpec& h) {
    check_compatible(pm, h);
    const double tr = ats_trace(h.C, pm.Upsilon_pooled);
    if (!(tr > 0.0)) {
        throw DegenerateHypothesisError("tr(C Upsilon C^T) is zero: the hypothesis has no variation");
    }
    const MatrixXd E = MatrixXd::Identity(h.m(), h.m()) / tr;
    return limit_eigenvalues(pm.Upsilon_pooled, h.C, E);
}

WeightedChisqResult weighted_chisq_quantile(std::span<const double> lambdas, double alpha, int W,
                                            std::uint64_t seed) {
    check_alpha(alpha);
    if (W < 100) throw ConfigError("Monte-Carlo size W must be at least 100");
    double lmax = 0.0;
    for (double l : lambdas) {
        if (!(l >= 0.0)) throw ArgumentError("weighted chi-square weights must be nonnegative");
        lmax = std::max(lmax, l);
    }
    if (!(lmax > 0.0)) throw DegenerateHypothesisError("all weighted chi-square weights are zero");
    // Weights below 1e−12 of the largest contribute nothing measurable.
    std::vector<double> active;
    for (double l : lambdas) {
        if (l > 1e-12 * lmax) active.push_back(l);
    }

    WeightedChisqResult out;
    out.draws.resize(static_cast<std::size_t>(W));
    const std::size_t chunks = (out.draws.size() + kChunk - 1) / kChunk;
    parallel_for(chunks, [&](std::size_t c) {
        Engine gen = stream(seed, c);
        StdNormal normal;
        const std::size_t begin = c * kChunk;
        const std::size_t end = std::min(begin + kChunk, out.draws.size());
        for (std::size_t w = begin; w < end; ++w) {
            double sum = 0.0;
            for (double l : active) {
                const double z = normal(gen);
                sum += l * (z * z);
            }
            out.draws[w] = sum;
        }
    });
    std::sort(out.draws.begin(), out.draws.end());
    out.quantile = upper_order_statistic(out.draws, 1.0 - alpha);
    return out;
}

FisherZResult fisherz_ats(const PooledMoments& pm, const HypothesisSpec& h, bool factor) {
    check_compatible(pm, h);
    const VectorXd cr = h.C * pm.r_hat_pooled;
    for (Eigen::Index i = 0; i < cr.size(); ++i) {
        if (!(std::abs(cr(i)) < 1.0)) {
            throw DomainError("Fisher z transform needs |(C r)_" + std::to_string(i + 1) + "| < 1");
        }
        if (!(std::abs(h.zeta(i)) < 1.0)) {
            throw DomainError("Fisher z transform needs |zeta_" + std::to_string(i + 1) + "| < 1");
        }
    }
    const VectorXd diff = cr.array().atanh().matrix() - h.zeta.array().atanh().matrix();
    const VectorXd jac = (1.0 - cr.array().square()).inverse().matrix();
    FisherZResult out;
    out.limit_cov = jac.asDiagonal() * (h.C * pm.Upsilon_pooled * h.C.transpose()) * jac.asDiagonal();
    out.limit_cov = 0.5 * (out.limit_cov + out.limit_cov.transpose());
    const double tr = out.limit_cov.trace();
    if (!(tr > 0.0)) {
        throw DegenerateHypothesisError("Fisher z limit covariance has zero trace");
    }
    out.statistic = static_cast<double>(pm.N) * diff.squaredNorm() / tr;
    if (factor) out.statistic *= small_sample_factor(pm.N);
    out.lambdas = nonincreasing(sym_eigenvalues(out.limit_cov / tr));
    clip_eigenvalues(out.lambdas);
    return out;
}

TestReport mc_test(const PooledMoments& pm, const HypothesisSpec& h, const MethodSpec& method,
                   double alpha, int W, std::uint64_t seed) {
    double statistic = 0.0;
    std::vector<double> lambdas;
    if (method.method == Method::AtsMc) {
        statistic = ats_statistic(pm, h, method.small_sample_factor);
        lambdas = limit_eigenvalues(pm, h);
    } else if (method.method == Method::AtsFzMc) {
        FisherZResult fz = fisherz_ats(pm, h, method.small_sample_factor);
        statistic = fz.statistic;
        lambdas = std::move(fz.lambdas);
    } else {
        throw ArgumentError("mc_test handles ats-mc and atsfz-mc only, got " + method.tag());
    }
    WeightedChisqResult ref = weighted_chisq_quantile(lambdas, alpha, W, seed);
    return make_report(statistic, ref.draws, alpha, method, seed);
}

}  // namespace corrtest
