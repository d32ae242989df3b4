#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "geomapprox/cli.hpp"
#include "geomapprox/errors.hpp"

using namespace geomapprox;
namespace fs = std::filesystem;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream is(text);
    for (std::string line; std::getline(is, line);) out.push_back(line);
    return out;
}

std::vector<std::string> fields(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream is(line);
    for (std::string f; std::getline(is, f, ',');) out.push_back(f);
    return out;
}

// Value of `column` in the first data row.
double cell(const std::string& csv, const std::string& column, std::size_t row = 0) {
    const auto ls = lines(csv);
    const auto head = fields(ls.at(1));
    const auto data = fields(ls.at(2 + row));
    for (std::size_t i = 0; i < head.size(); ++i) {
        if (head[i] == column) return std::stod(data.at(i));
    }
    throw std::runtime_error("no column " + column);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

class TempDir {
public:
    TempDir() {
        path_ = fs::temp_directory_path() / ("geomapprox_cli_" + std::to_string(counter_++) + "_" +
                                             std::to_string(reinterpret_cast<std::uintptr_t>(this)));
        fs::remove_all(path_);
        fs::create_directories(path_);
    }
    ~TempDir() { fs::remove_all(path_); }
    const fs::path& path() const { return path_; }
    fs::path write(const std::string& name, const std::string& body) const {
        std::ofstream(path_ / name, std::ios::binary) << body;
        return path_ / name;
    }

private:
    static inline int counter_ = 0;
    fs::path path_;
};

}  // namespace

TEST(ParseFamily, SplitsNameAndParameters) {
    const auto f = cli::parse_family("negbin:1.5,0.25");
    EXPECT_EQ(f.name, "negbin");
    ASSERT_EQ(f.params.size(), 2u);
    EXPECT_DOUBLE_EQ(f.params[1], 0.25);
    EXPECT_THROW(cli::parse_family("poisson:x"), ValidationError);
    EXPECT_THROW(cli::parse_family(""), ValidationError);
}

TEST(FormatNumber, SeventeenDigits) {
    EXPECT_EQ(cli::format_number(0.1), "0.10000000000000001");
    EXPECT_EQ(cli::format_number(0.0), "0");
}

TEST(PoissonHorizonCommand, GammaShapeOneIsExact) {
    const Result r = run({"poisson-horizon", "--family", "gamma", "--beta", "1", "--lambda", "1"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(cell(r.out, "bound"), 0.0);
    EXPECT_LE(cell(r.out, "exact_tv"), 1e-9);
}

TEST(PoissonHorizonCommand, GammaShapeTwo) {
    const Result r = run({"poisson-horizon", "--family", "gamma", "--beta", "2", "--lambda", "1"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NEAR(cell(r.out, "bound"), 1.0 / 9.0, 1e-12);
    EXPECT_LE(cell(r.out, "exact_tv"), cell(r.out, "bound") + cell(r.out, "slack"));
}

TEST(PoissonHorizonCommand, UniformHorizon) {
    const Result r = run({"poisson-horizon", "--family", "uniform", "--a", "0", "--b", "1", "--lambda", "1"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NEAR(cell(r.out, "p"), 1.0 - std::exp(-1.0), 1e-12);
}

TEST(PoissonHorizonCommand, GridProducesOneRowPerPair) {
    const Result r = run({"poisson-horizon", "--family", "gamma", "--beta", "0.5", "2", "--lambda", "0.5", "1", "2"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(lines(r.out).size(), 2u + 6u);
}

TEST(Csv, CommentAndHeaderRows) {
    const Result r = run({"--eps-tail", "1e-10", "poisson-horizon", "--family", "exponential", "--rate", "1", "--lambda", "1"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto ls = lines(r.out);
    EXPECT_EQ(ls[0], "# eps_tail=1e-10 version=0.1.0");
    EXPECT_EQ(ls[1], "rate,lambda,p,bound,exact_tv,slack");
    EXPECT_EQ(r.out.find('\r'), std::string::npos);
}

TEST(ExitCodes, ValidationErrors) {
    EXPECT_EQ(run({"poisson-horizon", "--family", "gamma", "--beta", "-1", "--lambda", "1"}).code, 2);
    EXPECT_EQ(run({"poisson-horizon", "--family", "weird", "--lambda", "1"}).code, 2);
    EXPECT_EQ(run({"poisson-horizon", "--family", "gamma", "--beta", "1", "--lambda", "1", "--bogus"}).code, 2);
    EXPECT_EQ(run({"frobnicate"}).code, 2);
    EXPECT_EQ(run({}).code, 2);
    EXPECT_EQ(run({"random-sum", "--n-family", "geom:0.5"}).code, 2);
    EXPECT_EQ(run({"ruin", "--eta-family", "poisson:1.5"}).code, 2);
}

TEST(ExitCodes, MissingFileIsIoError) {
    EXPECT_EQ(run({"markov", "--model", "/nonexistent/model.json"}).code, 3);
    EXPECT_EQ(run({"verify", "--ensemble", "/nonexistent/cases.json"}).code, 3);
    EXPECT_EQ(run({"ruin", "--eta", "/nonexistent/eta.json"}).code, 3);
}

TEST(MarkovCommand, ReadsModelFile) {
    TempDir dir;
    const auto model = dir.write("chain.json", R"({"P": [[0.3, 0.7], [0.3, 0.7]], "A": [1]})");
    const Result r = run({"markov", "--model", model.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NEAR(cell(r.out, "p"), 0.7, 1e-15);
    EXPECT_LE(cell(r.out, "bound"), 1e-12);
}

TEST(MarkovCommand, PeriodicChainRejected) {
    TempDir dir;
    const auto model = dir.write("chain.json", R"({"P": [[0, 1], [1, 0]], "A": [1]})");
    EXPECT_EQ(run({"markov", "--model", model.string()}).code, 2);
}

TEST(RandomSumCommand, FamiliesAndFiles) {
    const Result fam = run({"random-sum", "--n-family", "geom:0.5", "--x-family", "uniform:1,2"});
    ASSERT_EQ(fam.code, 0) << fam.err;
    EXPECT_NEAR(cell(fam.out, "bound"), 0.25, 1e-10);
    EXPECT_NEAR(cell(fam.out, "mean_matched_bound"), 1.0 / 3.0, 1e-12);

    TempDir dir;
    const auto n = dir.write("n.json", R"({"probs": [0.5, 0, 0.5]})");
    const auto x = dir.write("x.json", R"({"probs": [0, 0.5, 0.5]})");
    const Result files = run({"random-sum", "--n-law", n.string(), "--x-law", x.string()});
    ASSERT_EQ(files.code, 0) << files.err;
    EXPECT_EQ(lines(files.out)[1], "p,bound,path,exact_tv,slack");
    EXPECT_NE(lines(files.out)[2].find("general"), std::string::npos);
}

TEST(RuinCommand, ThreePointClaims) {
    const Result r = run({"ruin", "--eta-family", "support:0.5,0.25,0.25", "--m-max", "5"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(lines(r.out).size(), 2u + 5u);
    for (std::size_t m = 1; m <= 5; ++m) {
        EXPECT_NEAR(cell(r.out, "psi_exact", m - 1), std::pow(0.5, static_cast<double>(m)), 1e-10);
    }
}

TEST(RuinCommand, MonteCarloColumnsAreSeeded) {
    const std::vector<std::string> args = {"--seed", "5", "ruin", "--eta-family", "poisson:0.5", "--m-max", "2",
                                           "--mc-paths", "20000"};
    const Result a = run(args);
    const Result b = run(args);
    ASSERT_EQ(a.code, 0) << a.err;
    EXPECT_EQ(a.out, b.out);
    EXPECT_NE(lines(a.out)[1].find("psi_mc"), std::string::npos);
}

TEST(OutputFlag, WritesFile) {
    TempDir dir;
    const fs::path target = dir.path() / "out.csv";
    const Result r = run({"--output", target.string(), "ruin", "--eta-family", "geom:0.75", "--m-max", "3"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_TRUE(r.out.empty());
    EXPECT_EQ(lines(slurp(target)).size(), 5u);
    EXPECT_EQ(run({"--output", "/nonexistent/dir/out.csv", "ruin", "--eta-family", "geom:0.75"}).code, 3);
}

TEST(FiguresCommand, DeterministicAndSpotValues) {
    TempDir a, b;
    ASSERT_EQ(run({"figures", "--out-dir", a.path().string()}).code, 0);
    ASSERT_EQ(run({"figures", "--out-dir", b.path().string()}).code, 0);
    for (const char* name : {"figure1_gamma_horizon.csv", "figure2_poisson_claims.csv", "figure3_gamma_mixed_claims.csv"}) {
        const std::string first = slurp(a.path() / name);
        EXPECT_FALSE(first.empty()) << name;
        EXPECT_EQ(first, slurp(b.path() / name)) << name;
    }
    const std::string fig1 = slurp(a.path() / "figure1_gamma_horizon.csv");
    for (const auto& line : lines(fig1)) {
        const auto f = fields(line);
        if (f.size() == 3 && f[1] == "1") EXPECT_EQ(std::stod(f[2]), 0.0) << line;
    }
    EXPECT_EQ(cell(slurp(a.path() / "figure2_poisson_claims.csv"), "error", 0), 0.0);
}

TEST(FiguresCommand, EnvironmentSetsDefaultDirectory) {
    TempDir dir;
    ::setenv(cli::kOutDirEnv, dir.path().c_str(), 1);
    const Result r = run({"figures"});
    ::unsetenv(cli::kOutDirEnv);
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_TRUE(fs::exists(dir.path() / "figure3_gamma_mixed_claims.csv"));
}

TEST(VerifyCommand, SmallEnsemblePasses) {
    TempDir dir;
    const auto cases = dir.write("cases.json", R"({"cases": [
        {"kind": "gamma_horizon", "beta": 2, "lambda": 1},
        {"kind": "ruin", "eta_family": "geom:0.75", "m_max": 10}]})");
    const Result r = run({"verify", "--ensemble", cases.string()});
    EXPECT_EQ(r.code, 0) << r.err << r.out;
}

TEST(VerifyCommand, CorruptedBoundFails) {
    TempDir dir;
    const auto cases = dir.write("cases.json", R"({"cases": [{"kind": "gamma_horizon", "beta": 2, "lambda": 1}]})");
    const Result r = run({"verify", "--ensemble", cases.string(), "--bound-scale", "0"});
    EXPECT_EQ(r.code, 1);
}

TEST(VerifyCommand, EmptyOrMalformedEnsemble) {
    TempDir dir;
    EXPECT_EQ(run({"verify", "--ensemble", dir.write("e.json", R"({"cases": []})").string()}).code, 2);
    EXPECT_EQ(run({"verify", "--ensemble", dir.write("b.json", "not json").string()}).code, 2);
    EXPECT_EQ(run({"verify", "--ensemble", dir.write("k.json", R"({"cases": [{"kind": "nope"}]})").string()}).code, 2);
}

TEST(VerifyCommand, DefaultEnsemblePasses) {
    const Result r = run({"verify"});
    EXPECT_EQ(r.code, 0) << r.err << r.out;
}
