#include <gtest/gtest.h>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

struct CliResult {
    int code = -1;
    std::string out;
};

CliResult run(const std::string& args) {
    const std::string cmd = std::string(CORRTEST_BINARY) + " " + args + " 2>/dev/null";
    CliResult r;
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return r;
    char buf[4096];
    std::size_t got = 0;
    while ((got = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, got);
    const int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("corrtest_cli_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
                "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    std::string write(const std::string& name, int n, std::uint64_t seed, double scale2 = 1.0) {
        std::mt19937_64 gen(seed);
        std::normal_distribution<double> z;
        const fs::path path = dir_ / name;
        std::ofstream out(path);
        out << "x1,x2,x3\n";
        for (int i = 0; i < n; ++i) {
            const double a = z(gen);
            const double b = 0.5 * a + z(gen);
            const double c = z(gen) - 0.3 * b;
            out << a << ',' << b * scale2 << ',' << c << '\n';
        }
        return path.string();
    }

    fs::path dir_;
};

}  // namespace

TEST_F(CliTest, IdenticalGroupsGiveZeroStatistic) {
    const std::string f = write("g.csv", 80, 1);
    const CliResult r = run("test --data " + f + " --data " + f +
                      " --hypothesis equal-corr-matrices --method ats-mc --reps 1000");
    ASSERT_EQ(r.code, 0) << r.out;
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_EQ(j["schema"], 1);
    EXPECT_EQ(j["report"]["statistic"].get<double>(), 0.0);
    EXPECT_FALSE(j["report"]["reject"].get<bool>());
    EXPECT_EQ(j["manifest"]["inputs"].size(), 2u);
    EXPECT_EQ(j["manifest"]["inputs"][0]["sha256"].get<std::string>().size(), 64u);
}

TEST_F(CliTest, ExitCodes) {
    const std::string f = write("g.csv", 40, 2);
    EXPECT_EQ(run("test --data " + f + " --hypothesis identity-corr --method wts").code, 2);
    EXPECT_EQ(run("test --hypothesis identity-corr").code, 2);
    EXPECT_EQ(run("simulate --runs 0").code, 2);
    EXPECT_EQ(run("combined --data " + f).code, 2);
    EXPECT_EQ(run("test --data " + (dir_ / "missing.csv").string() + " --hypothesis identity-corr").code, 3);

    std::ofstream(dir_ / "ragged.csv") << "1,2,3\n4,5\n";
    EXPECT_EQ(run("test --data " + (dir_ / "ragged.csv").string() + " --hypothesis identity-corr").code, 3);
}

TEST_F(CliTest, SimulateIsByteReproducible) {
    const std::string args = "simulate --scenario B_r --n 40 --d 3 --runs 20 --method ats-mc --reps 500 --seed 9";
    const CliResult a = run(args);
    const CliResult b = run(args);
    ASSERT_EQ(a.code, 0);
    EXPECT_EQ(a.out, b.out);
    EXPECT_EQ(a.out.rfind("scenario,method", 0), 0u);

    const std::string out = (dir_ / "rates.csv").string();
    ASSERT_EQ(run(args + " --out " + out).code, 0);
    std::ifstream in(out);
    std::stringstream ss;
    ss << in.rdbuf();
    EXPECT_EQ(ss.str(), a.out);
    EXPECT_TRUE(fs::exists(out + ".manifest.json"));
}

TEST_F(CliTest, CombinedClassifiesScaledColumn) {
    const std::string g1 = write("g1.csv", 2000, 3);
    const std::string g2 = write("g2.csv", 2000, 4, 3.0);
    const CliResult r = run("combined --data " + g1 + " --data " + g2 + " --reps 1000");
    ASSERT_EQ(r.code, 0) << r.out;
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_EQ(j["classification"], "equal-correlation-different-variances");

    const CliResult same = run("combined --data " + g1 + " --data " + g1 + " --procedure equicoordinate");
    ASSERT_EQ(same.code, 0);
    EXPECT_EQ(nlohmann::json::parse(same.out)["classification"], "no-rejection");
}
