#include "corrtest/simlab.hpp"

#include "corrtest/errors.hpp"
#include "corrtest/linalg.hpp"
#include "corrtest/parallel.hpp"

#include <cmath>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <random>

namespace corrtest {

namespace {

MatrixXd correlation_of(const MatrixXd& V) {
    const VectorXd inv_sd = V.diagonal().cwiseSqrt().cwiseInverse();
    return inv_sd.asDiagonal() * V * inv_sd.asDiagonal();
}

MatrixXd spd_root(const MatrixXd& V) {
    const VectorXd ev = sym_eigenvalues(V);
    if (!(ev.minCoeff() > 0.0)) {
        throw ConfigError("covariance matrix is not positive definite (smallest eigenvalue " +
                          std::to_string(ev.minCoeff()) + ")");
    }
    return psd_sqrt(V, "covariance");
}

// Population-level check that the generator satisfies the scenario hypothesis.
void check_null(const SimScenario& sc) {
    VectorXd r(static_cast<Eigen::Index>(sc.covariances.size()) * sc.hypothesis.dims.p_u);
    const int p_u = sc.hypothesis.dims.p_u;
    for (std::size_t i = 0; i < sc.covariances.size(); ++i) {
        r.segment(static_cast<Eigen::Index>(i) * p_u, p_u) =
            vech_minus(correlation_of(sc.covariances[i]));
    }
    if (r.size() != sc.hypothesis.C.cols()) {
        throw ConfigError("scenario " + sc.label + ": hypothesis does not match the group layout");
    }
    const double gap = (sc.hypothesis.C * r - sc.hypothesis.zeta).cwiseAbs().maxCoeff();
    if (gap > 1e-10) {
        throw ConfigError("scenario " + sc.label + ": generator violates the hypothesis (gap " +
                          std::to_string(gap) + ")");
    }
}

}  // namespace

DistributionSpec DistributionSpec::parse(const std::string& tag) {
    DistributionSpec spec;
    if (tag == "normal") {
        spec.family = Family::Normal;
    } else if (tag == "t9") {
        spec.family = Family::T9;
    } else if (tag == "skew-normal" || tag == "skewnormal") {
        spec.family = Family::SkewNormal;
    } else if (tag == "gamma") {
        spec.family = Family::Gamma;
    } else {
        throw ConfigError("unknown distribution '" + tag + "' (normal | t9 | skew-normal | gamma)");
    }
    return spec;
}

std::string DistributionSpec::tag() const {
    switch (family) {
        case Family::Normal: return "normal";
        case Family::T9: return "t9";
        case Family::SkewNormal: return "skew-normal";
        case Family::Gamma: return "gamma";
    }
    return "unknown";
}

void DistributionSpec::fill(Engine& gen, MatrixXd& z) const {
    double* x = z.data();
    const Eigen::Index count = z.size();
    StdNormal normal;
    switch (family) {
        case Family::Normal:
            for (Eigen::Index i = 0; i < count; ++i) x[i] = normal(gen);
            break;
        case Family::T9: {
            std::student_t_distribution<double> t(9.0);
            const double scale = std::sqrt(7.0 / 9.0);
            for (Eigen::Index i = 0; i < count; ++i) x[i] = t(gen) * scale;
            break;
        }
        case Family::SkewNormal: {
            const double delta = skew_alpha / std::sqrt(1.0 + skew_alpha * skew_alpha);
            const double tail = std::sqrt(1.0 - delta * delta);
            const double mean = delta * std::sqrt(2.0 / std::numbers::pi);
            const double sd = std::sqrt(1.0 - 2.0 * delta * delta / std::numbers::pi);
            for (Eigen::Index i = 0; i < count; ++i) {
                const double u0 = normal(gen);
                const double u1 = normal(gen);
                x[i] = (delta * std::abs(u0) + tail * u1 - mean) / sd;
            }
            break;
        }
        case Family::Gamma: {
            std::gamma_distribution<double> g(gamma_shape, 1.0);
            const double sd = std::sqrt(gamma_shape);
            for (Eigen::Index i = 0; i < count; ++i) x[i] = (g(gen) - gamma_shape) / sd;
            break;
        }
    }
}

MatrixXd toeplitz_cov(int d) {
    MatrixXd v(d, d);
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) v(i, j) = 1.0 - std::abs(i - j) / (2.0 * d);
    }
    return v;
}

MatrixXd ar_cov(int d, double rho) {
    if (!(std::abs(rho) < 1.0)) throw ConfigError("AR covariance needs |rho| < 1");
    MatrixXd v(d, d);
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) v(i, j) = std::pow(rho, std::abs(i - j));
    }
    return v;
}

MatrixXd diag_scale_cov(int d) {
    VectorXd s(d);
    for (int i = 0; i < d; ++i) s(i) = 1.0 + 0.2 * i;
    return s.asDiagonal();
}

MatrixXd identity_plus_j(int d, double delta) {
    return MatrixXd::Identity(d, d) + MatrixXd::Constant(d, d, delta);
}

MatrixXd rescaled_cov(const MatrixXd& V) {
    const VectorXd root = diag_scale_cov(static_cast<int>(V.rows())).diagonal().cwiseSqrt();
    MatrixXd out(V.rows(), V.cols());
    for (Eigen::Index i = 0; i < V.rows(); ++i) {
        for (Eigen::Index j = 0; j < V.cols(); ++j) out(i, j) = (root(i) * root(j)) * V(i, j);
    }
    return out;
}

VectorXd default_mean(int d) {
    VectorXd mu(d);
    for (int i = 0; i < d; ++i) mu(i) = (i + 1.0) * (i + 1.0) / 4.0;
    return mu;
}

GroupSample draw_group(int n, const VectorXd& mu, const MatrixXd& V,
                       const DistributionSpec& dist, Engine& gen, std::string label) {
    if (V.rows() != V.cols() || V.rows() != mu.size()) {
        throw DimensionError("draw_group: mean and covariance dimensions differ");
    }
    const MatrixXd root = spd_root(V);
    MatrixXd z(n, V.rows());
    dist.fill(gen, z);
    MatrixXd x = z * root;
    x.rowwise() += mu.transpose();
    return GroupSample(std::move(x), std::move(label));
}

GroupSample draw_group(int n, const VectorXd& mu, const MatrixXd& V,
                       const DistributionSpec& dist, std::uint64_t seed) {
    Engine gen = stream(seed, 0);
    return draw_group(n, mu, V, dist, gen);
}

SimScenario make_scenario(const std::string& label, int n, const DistributionSpec& dist,
                          const ScenarioOptions& opt) {
    const int d = opt.d;
    const Dims one = Dims::make(d, 1);
    SimScenario sc;
    sc.label = label;
    sc.dist = dist;
    auto split = [&] {
        const int n1 = static_cast<int>(std::lround(0.6 * n));
        if (n1 < 2 || n - n1 < 2) throw ConfigError("scenario " + label + ": N too small");
        sc.sizes = {n1, n - n1};
    };
    if (n < 2) throw ConfigError("scenario " + label + ": sample size must be at least 2");
    if (label == "A_r" || label == "A") {
        split();
        MatrixXd v1;
        if (opt.covariance == "toeplitz") {
            v1 = toeplitz_cov(d);
        } else if (opt.covariance == "ar") {
            v1 = ar_cov(d, 0.6);
        } else {
            throw ConfigError("unknown covariance '" + opt.covariance + "' (toeplitz | ar)");
        }
        sc.covariances = {v1, rescaled_cov(v1)};
        sc.hypothesis = equal_correlation_matrices(2, one);
    } else if (label == "B_r" || label == "B") {
        sc.sizes = {n};
        sc.covariances = {diag_scale_cov(d)};
        sc.hypothesis = identity_correlation(one);
    } else if (label == "C_r" || label == "C") {
        sc.sizes = {n};
        sc.covariances = {identity_plus_j(d, 1.0)};
        sc.hypothesis = equal_correlations(one);
    } else if (label == "E") {
        sc.sizes = {n, n};
        sc.covariances = {MatrixXd::Identity(d, d), MatrixXd::Identity(d, d)};
        sc.hypothesis = equal_correlation_matrices(2, one);
    } else if (label == "power-A") {
        split();
        const MatrixXd v2 = toeplitz_cov(d);
        sc.covariances = {v2 + MatrixXd::Constant(d, d, opt.delta), v2};
        sc.hypothesis = equal_correlation_matrices(2, one);
        sc.null_holds = opt.delta == 0.0;
    } else if (label == "power-B") {
        sc.sizes = {n};
        sc.covariances = {identity_plus_j(d, opt.delta)};
        sc.hypothesis = identity_correlation(one);
        sc.null_holds = opt.delta == 0.0;
    } else {
        throw ConfigError("unknown scenario '" + label +
                          "' (A_r | B_r | C_r | E | power-A | power-B)");
    }
    if (opt.delta < 0.0) throw ConfigError("delta must be nonnegative");
    return sc;
}

std::vector<RateRow> type1_experiment(const SimScenario& sc) {
    if (sc.runs < 1) throw ConfigError("runs must be positive, got " + std::to_string(sc.runs));
    if (sc.methods.empty()) throw ConfigError("no methods selected");
    if (sc.sizes.size() != sc.covariances.size() ||
        static_cast<int>(sc.sizes.size()) != sc.hypothesis.a) {
        throw ConfigError("scenario " + sc.label + ": group layout does not match the hypothesis");
    }
    if (sc.null_holds) check_null(sc);
    const int d = static_cast<int>(sc.covariances.front().rows());
    const VectorXd mu = default_mean(d);
    const std::size_t n_methods = sc.methods.size();
    std::vector<char> rejected(static_cast<std::size_t>(sc.runs) * n_methods, 0);

    parallel_for(static_cast<std::size_t>(sc.runs), [&](std::size_t r) {
        Engine gen = stream(sc.options.seed, r, 0);
        std::vector<GroupSample> groups;
        for (std::size_t i = 0; i < sc.sizes.size(); ++i) {
            groups.push_back(draw_group(sc.sizes[i], mu, sc.covariances[i], sc.dist, gen));
        }
        const PooledMoments pm = pooled_moments(groups);
        for (std::size_t m = 0; m < n_methods; ++m) {
            RunOptions opt = sc.options;
            opt.seed = derive_seed(derive_seed(sc.options.seed, r), m + 1);
            const TestReport rep = run_test(groups, pm, sc.hypothesis, sc.methods[m], opt);
            rejected[r * n_methods + m] = rep.reject ? 1 : 0;
        }
    });

    int total = 0;
    for (int s : sc.sizes) total += s;
    std::vector<RateRow> rows;
    for (std::size_t m = 0; m < n_methods; ++m) {
        RateRow row;
        row.scenario = sc.label;
        row.method = sc.methods[m].tag();
        row.dist = sc.dist.tag();
        row.N = total;
        row.runs = sc.runs;
        for (int r = 0; r < sc.runs; ++r) {
            row.rejections += rejected[static_cast<std::size_t>(r) * n_methods + m];
        }
        row.rate = static_cast<double>(row.rejections) / sc.runs;
        row.se = std::sqrt(row.rate * (1.0 - row.rate) / sc.runs);
        row.in_band = row.rate >= kBandLow && row.rate <= kBandHigh;
        rows.push_back(row);
    }
    return rows;
}

std::vector<RateRow> power_curve(const std::string& label, int n, const DistributionSpec& dist,
                                 const std::vector<double>& deltas,
                                 const std::vector<MethodSpec>& methods, int runs,
                                 const RunOptions& options, const ScenarioOptions& opt) {
    if (label != "power-A" && label != "power-B") {
        throw ConfigError("power curves are defined for power-A and power-B, got '" + label + "'");
    }
    if (deltas.empty()) throw ConfigError("empty delta grid");
    std::vector<RateRow> out;
    for (std::size_t k = 0; k < deltas.size(); ++k) {
        ScenarioOptions so = opt;
        so.delta = deltas[k];
        SimScenario sc = make_scenario(label, n, dist, so);
        sc.methods = methods;
        sc.runs = runs;
        sc.options = options;
        // Each δ gets its own data stream; the grid stays reproducible point by point.
        sc.options.seed = derive_seed(options.seed, k);
        for (RateRow row : type1_experiment(sc)) {
            row.delta = deltas[k];
            out.push_back(row);
        }
    }
    return out;
}

void write_rates_csv(std::ostream& os, const std::vector<RateRow>& rows) {
    os << "scenario,method,dist,N,delta,runs,rejections,rate,se,in_band\n";
    const auto flags = os.flags();
    const auto prec = os.precision();
    for (const auto& r : rows) {
        os << r.scenario << ',' << r.method << ',' << r.dist << ',' << r.N << ','
           << std::setprecision(6) << std::defaultfloat << r.delta << ',' << r.runs << ','
           << r.rejections << ',' << std::fixed << std::setprecision(4) << r.rate << ','
           << std::setprecision(4) << r.se << ',' << (r.in_band ? 1 : 0) << '\n';
        os.flags(flags);
    }
    os.precision(prec);
}

GeneratorCheck generator_self_test(const DistributionSpec& dist, int draws, std::uint64_t seed) {
    if (draws < 2) throw ConfigError("generator self-test needs at least 2 draws");
    Engine gen = stream(seed, 0);
    MatrixXd z(draws, 1);
    dist.fill(gen, z);
    GeneratorCheck c;
    c.mean = z.mean();
    c.variance = (z.array() - c.mean).square().sum() / (draws - 1);
    return c;
}

}  // namespace corrtest
