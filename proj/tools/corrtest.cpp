// Command-line front end: hypothesis tests on CSV data, simulation studies and power curves.

#include "corrtest/combined.hpp"
#include "corrtest/csv_io.hpp"
#include "corrtest/engine.hpp"
#include "corrtest/errors.hpp"
#include "corrtest/simlab.hpp"

#include <CLI11.hpp>
#include <json.hpp>
#include <openssl/evp.h>

#include <chrono>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#ifndef CORRTEST_VERSION
#define CORRTEST_VERSION "0.0.0"
#endif

using json = nlohmann::ordered_json;
using namespace corrtest;

namespace {

enum ExitCode { kOk = 0, kUsage = 2, kData = 3, kNumerical = 4 };

std::string sha256_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError(path + ": cannot open file");
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
    char buf[1 << 15];
    while (in.read(buf, sizeof buf) || in.gcount() > 0) {
        EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(in.gcount()));
    }
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx, md, &len);
    EVP_MD_CTX_free(ctx);
    std::ostringstream hex;
    for (unsigned int i = 0; i < len; ++i) {
        hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
    }
    return hex.str();
}

struct Manifest {
    std::string command;
    json config = json::object();
    std::uint64_t seed = 0;
    std::vector<std::string> inputs;
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

    json to_json() const {
        json m;
        m["command"] = command;
        m["config"] = config;
        m["seed"] = seed;
        m["version"] = CORRTEST_VERSION;
        m["elapsed_seconds"] =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        json files = json::array();
        for (const auto& path : inputs) files.push_back({{"path", path}, {"sha256", sha256_file(path)}});
        m["inputs"] = files;
        return m;
    }
};

void emit(const std::string& out, const std::string& text) {
    if (out.empty() || out == "-") {
        std::cout << text;
        return;
    }
    std::ofstream f(out, std::ios::binary);
    if (!f) throw ConfigError(out + ": cannot open output file");
    f << text;
}

std::vector<GroupSample> load_groups(const std::vector<std::string>& files) {
    std::vector<GroupSample> groups;
    for (const auto& path : files) {
        CsvTable t = read_csv(path);
        groups.emplace_back(std::move(t.values), path);
    }
    for (const auto& g : groups) {
        if (g.d() != groups.front().d()) {
            throw DimensionError(g.label() + " has " + std::to_string(g.d()) + " columns but " +
                                 groups.front().label() + " has " +
                                 std::to_string(groups.front().d()));
        }
    }
    return groups;
}

HypothesisSpec build_hypothesis(const std::vector<std::string>& spec, int a, int d,
                                std::vector<std::string>& inputs) {
    const std::string& name = spec.front();
    const Dims dims = Dims::make(d, a);
    auto need_file = [&]() -> const std::string& {
        if (spec.size() < 2) throw ConfigError("--hypothesis " + name + " needs a file argument");
        inputs.push_back(spec[1]);
        return spec[1];
    };
    auto one_group = [&] {
        if (a != 1) {
            throw ArgumentError("hypothesis " + name + " is for one group, got " + std::to_string(a));
        }
    };
    if (name == "equal-corr-matrices") return equal_correlation_matrices(a, dims);
    if (name == "identity-corr") {
        one_group();
        return identity_correlation(dims);
    }
    if (name == "equal-correlations") {
        one_group();
        return equal_correlations(dims);
    }
    if (name == "given-corr") {
        one_group();
        const CsvTable t = read_csv(need_file());
        HypothesisSpec h = given_correlation(t.values);
        if (h.dims.d != d) throw DimensionError("given correlation matrix is not " + std::to_string(d) + "x" + std::to_string(d));
        return h;
    }
    if (name == "custom") {
        const CsvTable t = read_csv(need_file());
        if (t.values.cols() < 2) throw ArgumentError("custom hypothesis file needs [C | zeta] columns");
        const auto cols = t.values.cols() - 1;
        return custom(t.values.leftCols(cols), t.values.col(cols), a, dims);
    }
    throw ConfigError("unknown hypothesis '" + name +
                      "' (equal-corr-matrices | identity-corr | given-corr <file> | "
                      "equal-correlations | custom <file>)");
}

std::vector<double> parse_grid(const std::string& text) {
    std::vector<double> grid;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            grid.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw ConfigError("--delta-grid: '" + item + "' is not a number");
        }
    }
    if (grid.empty()) throw ConfigError("--delta-grid is empty");
    return grid;
}

json report_json(const TestReport& r) {
    json j;
    j["statistic"] = r.statistic;
    j["critical_value"] = r.critical_value;
    j["p_value"] = r.p_value;
    j["alpha"] = r.alpha;
    j["method"] = r.method;
    j["reject"] = r.reject;
    j["reps"] = r.reps;
    j["seed"] = r.seed;
    return j;
}

struct Common {
    double alpha = 0.05;
    int reps = kDefaultMcReps;
    int boot = 500;
    std::uint64_t seed = 1;
    std::string out;
};

void add_common(CLI::App* cmd, Common& c) {
    cmd->add_option("--alpha", c.alpha, "Nominal level")->check(CLI::Range(0.0, 1.0));
    cmd->add_option("--reps", c.reps, "Monte-Carlo replicates (weighted chi-square, Taylor)");
    cmd->add_option("--boot", c.boot, "Bootstrap replicates");
    cmd->add_option("--seed", c.seed, "Master seed");
    cmd->add_option("--out", c.out, "Output file (default stdout)");
}

RunOptions run_options(const Common& c) {
    RunOptions o;
    o.alpha = c.alpha;
    o.mc_reps = c.reps;
    o.boot_reps = c.boot;
    o.seed = c.seed;
    return o;
}

int run(int argc, char** argv) {
    CLI::App app{"Hypothesis tests for correlation matrices"};
    app.set_version_flag("--version", CORRTEST_VERSION);
    app.require_subcommand(1);

    Common common;

    // test
    auto* test = app.add_subcommand("test", "Test a linear hypothesis on correlation matrices");
    std::vector<std::string> data;
    std::vector<std::string> hypothesis;
    std::string method = "ats-par";
    std::string wild_weight = "rademacher";
    test->add_option("--data", data, "CSV file, one per group (repeatable)")->required();
    test->add_option("--hypothesis", hypothesis, "Hypothesis family [file]")
        ->required()
        ->expected(1, 2);
    test->add_option("--method", method, "ats-mc | ats-par | ats-wild | ats-tay | atsfz-mc, optional -m");
    test->add_option("--wild-weight", wild_weight, "rademacher | gaussian");
    add_common(test, common);

    // simulate
    auto* simulate = app.add_subcommand("simulate", "Type-I error simulation study");
    std::string scenario = "B_r";
    std::string dist = "normal";
    std::string covariance = "toeplitz";
    int n = 250;
    int runs = 2000;
    int dim = 5;
    std::vector<std::string> methods;
    simulate->add_option("--scenario", scenario, "A_r | B_r | C_r | E");
    simulate->add_option("--dist", dist, "normal | t9 | skew-normal | gamma");
    simulate->add_option("--n", n, "Sample size (total N for two-group designs)");
    simulate->add_option("--runs", runs, "Simulated datasets");
    simulate->add_option("--d", dim, "Dimension");
    simulate->add_option("--covariance", covariance, "toeplitz | ar (scenario A_r)");
    simulate->add_option("--method", methods, "Method (repeatable)");
    add_common(simulate, common);

    // power
    auto* power = app.add_subcommand("power", "Power curve over a delta grid");
    std::string grid_text = "0,0.15,0.3,0.45,0.6,0.75";
    power->add_option("--scenario", scenario, "power-A | power-B");
    power->add_option("--delta-grid", grid_text, "Comma-separated delta values");
    power->add_option("--dist", dist, "normal | t9 | skew-normal | gamma");
    power->add_option("--n", n, "Sample size");
    power->add_option("--runs", runs, "Simulated datasets per delta");
    power->add_option("--d", dim, "Dimension");
    power->add_option("--method", methods, "Method (repeatable)");
    add_common(power, common);

    // combined
    auto* combined = app.add_subcommand("combined", "Combined covariance and correlation test");
    std::vector<std::string> pair;
    std::string procedure = "taylor";
    bool one_sided = false;
    combined->add_option("--data", pair, "Two CSV files")->required()->expected(2);
    combined->add_option("--procedure", procedure, "taylor | equicoordinate");
    combined->add_flag("--one-sided", one_sided, "Signed quantiles in the Taylor procedure");
    add_common(combined, common);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    Manifest manifest;
    manifest.seed = common.seed;
    for (int i = 0; i < argc; ++i) manifest.command += (i ? " " : "") + std::string(argv[i]);
    manifest.config = {{"alpha", common.alpha}, {"reps", common.reps}, {"boot", common.boot}};

    if (*test) {
        const MethodSpec spec = MethodSpec::parse(method);
        std::vector<GroupSample> groups = load_groups(data);
        manifest.inputs = data;
        const int d = groups.front().d();
        const HypothesisSpec h =
            build_hypothesis(hypothesis, static_cast<int>(groups.size()), d, manifest.inputs);
        RunOptions opt = run_options(common);
        opt.wild_weight = parse_wild_weight(wild_weight);
        const TestReport r = run_test(groups, h, spec, opt);
        manifest.config["method"] = spec.tag();
        manifest.config["hypothesis"] = hypothesis;
        json j;
        j["schema"] = 1;
        j["command"] = "test";
        j["hypothesis"] = {{"label", h.label}, {"m", h.m()}, {"rank", h.rank()}};
        j["d"] = d;
        json gs = json::array();
        int N = 0;
        for (const auto& g : groups) {
            gs.push_back({{"file", g.label()}, {"n", g.n()}});
            N += g.n();
        }
        j["groups"] = gs;
        j["N"] = N;
        j["report"] = report_json(r);
        j["manifest"] = manifest.to_json();
        emit(common.out, j.dump(2) + "\n");
        return kOk;
    }

    if (*simulate || *power) {
        if (runs < 1) throw ConfigError("--runs must be positive, got " + std::to_string(runs));
        if (methods.empty()) methods = {"ats-par"};
        std::vector<MethodSpec> specs;
        for (const auto& m : methods) specs.push_back(MethodSpec::parse(m));
        const DistributionSpec ds = DistributionSpec::parse(dist);
        ScenarioOptions so;
        so.d = dim;
        so.covariance = covariance;
        std::vector<RateRow> rows;
        if (*simulate) {
            SimScenario sc = make_scenario(scenario, n, ds, so);
            if (!sc.null_holds) throw ConfigError("simulate runs null scenarios only; use power");
            sc.methods = specs;
            sc.runs = runs;
            sc.options = run_options(common);
            rows = type1_experiment(sc);
        } else {
            rows = power_curve(scenario, n, ds, parse_grid(grid_text), specs, runs,
                               run_options(common), so);
            manifest.config["delta_grid"] = grid_text;
        }
        manifest.config.update({{"scenario", scenario}, {"dist", dist}, {"n", n}, {"runs", runs},
                                {"d", dim}, {"methods", methods}});
        std::ostringstream csv;
        write_rates_csv(csv, rows);
        emit(common.out, csv.str());
        json m = {{"schema", 1}, {"manifest", manifest.to_json()}};
        if (common.out.empty() || common.out == "-") {
            std::cerr << m.dump() << "\n";
        } else {
            emit(common.out + ".manifest.json", m.dump(2) + "\n");
        }
        return kOk;
    }

    // combined
    std::vector<GroupSample> groups = load_groups(pair);
    manifest.inputs = pair;
    const ContrastStatistic cs = contrast_statistic(groups[0], groups[1]);
    CombinedVerdict v;
    if (procedure == "taylor") {
        v = taylor_combined_test(cs, common.alpha, common.reps, common.seed, !one_sided);
    } else if (procedure == "equicoordinate") {
        v = equicoordinate_test(cs, common.alpha, common.reps, common.seed);
    } else {
        throw ConfigError("unknown procedure '" + procedure + "' (taylor | equicoordinate)");
    }
    manifest.config["procedure"] = procedure;
    manifest.config["one_sided"] = one_sided;
    json j;
    j["schema"] = 1;
    j["command"] = "combined";
    j["procedure"] = v.procedure;
    j["reject"] = v.reject_any;
    j["classification"] = to_string(v.classification);
    json flagged = json::array();
    for (int c : v.flagged) flagged.push_back(coordinate_label(cs.dims, c));
    j["flagged"] = flagged;
    json coords = json::array();
    for (int c = 0; c < cs.dims.p; ++c) {
        coords.push_back({{"label", coordinate_label(cs.dims, c)},
                          {"T", cs.T(c)},
                          {"quantile", v.per_coordinate_quantiles[static_cast<std::size_t>(c)]}});
    }
    j["coordinates"] = coords;
    if (procedure == "taylor") {
        j["beta_tilde"] = v.beta_tilde;
    } else {
        j["z"] = v.critical_value;
    }
    j["manifest"] = manifest.to_json();
    emit(common.out, j.dump(2) + "\n");
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const ArgumentError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return kNumerical;
    } catch (const Error& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kData;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kNumerical;
    }
}
