#include <gtest/gtest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "uqf/cli.hpp"

using namespace uqf;
using uqf::cli::json;

namespace {

struct Result {
    int code;
    std::string out, err;
    json doc() const { return json::parse(out); }
};

Result run(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string temp_file(const std::string& name, const std::string& body) {
    const std::string path = ::testing::TempDir() + name;
    std::ofstream(path) << body;
    return path;
}

}  // namespace

TEST(Cli, ZetaOfFive) {
    const auto r = run({"zeta", "5"});
    ASSERT_EQ(r.code, 0) << r.err;
    const json j = r.doc();
    EXPECT_EQ(j["zeta_minus1"], "1/30");
    EXPECT_EQ(j["oracle_minus1"], "1/30");
    EXPECT_TRUE(j["functional_equation"]["pass"].get<bool>());
    EXPECT_EQ(j["provenance"], "derived");
}

TEST(Cli, DomainErrorsExitOne) {
    auto r = run({"field", "12"});
    EXPECT_EQ(r.code, 1);
    EXPECT_EQ(r.doc()["error"], "NotSquarefree");
    r = run({"cfrac", "1"});
    EXPECT_EQ(r.code, 1);
    EXPECT_EQ(r.doc()["error"], "NotGreaterThanOne");
    r = run({"zeta", "5", "--coeffs", "/nonexistent/coeffs.txt"});
    EXPECT_EQ(r.code, 1);
    EXPECT_EQ(r.doc()["error"], "ParseError");
    r = run({"rankbound", "--d", "3", "--disc", "49"});
    EXPECT_EQ(r.code, 1);
    EXPECT_EQ(r.doc()["error"], "MissingCoefficient");
    r = run({"scan", "--d", "3", "--disc-range", "5..8"});
    EXPECT_EQ(r.code, 1);
    EXPECT_EQ(r.doc()["error"], "DegreeUnsupported");
}

TEST(Cli, UsageErrorsExitTwoAndNameTheFlag) {
    const std::vector<std::pair<std::vector<std::string>, std::string>> cases{
        {{"field", "5", "--bogus"}, "--bogus"},
        {{"zeta", "5", "--tol", "abc"}, "--tol"},
        {{"scan", "--disc-range", "9..3"}, "--disc-range"},
        {{"scan", "--disc-range", "5..9", "--out", "xml"}, "--out"},
        {{"rankbound", "--disc", "-4"}, "--disc"},
        {{"indec", "5", "--ideal", "1,0"}, "--ideal"},
        {{"verify", "quick", "--inject-b1", "x"}, "--inject-b1"},
        {{"field", "5", "--workers", "0"}, "--workers"},
    };
    for (const auto& [args, flag] : cases) {
        const auto r = run(args);
        EXPECT_EQ(r.code, 2) << args.front() << " " << flag;
        EXPECT_NE(r.err.find(flag), std::string::npos) << r.err;
        EXPECT_EQ(json::parse(r.err)["error"], "UsageError");
    }
    EXPECT_EQ(run({}).code, 2);
    EXPECT_EQ(run({"field"}).code, 2);
    EXPECT_EQ(run({"field", "five"}).code, 2);
    EXPECT_EQ(run({"verify", "medium"}).code, 2);
    EXPECT_EQ(run({"rankbound", "--d", "2"}).code, 2);
}

TEST(Cli, HelpExitsZero) {
    const auto r = run({"--help"});
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("verify"), std::string::npos);
}

TEST(Cli, KappaOfThree) {
    const auto r = run({"kappa", "3"});
    ASSERT_EQ(r.code, 0);
    const json j = r.doc();
    EXPECT_EQ(j["lower"], 2);
    EXPECT_EQ(j["upper"], 2);
    EXPECT_EQ(j["narrow_classes"].size(), 2u);
    const json two = run({"kappa", "2"}).doc();
    EXPECT_EQ(two["lower"], 1);
    EXPECT_EQ(two["upper"], 1);
}

TEST(Cli, FieldAndContinuedFraction) {
    // sqrt 7 = [2; 1, 1, 1, 4] and 8^2 - 7 * 3^2 = 1
    const json c = run({"cfrac", "7"}).doc();
    EXPECT_EQ(c["u0"], 2);
    EXPECT_EQ(c["period"], json::parse("[1,1,1,4]"));
    EXPECT_EQ(c["s"], 4);
    EXPECT_EQ(c["eps"]["value"], "8+3*sqrt(7)");
    EXPECT_EQ(c["norm_eps"], 1);
    const json f = run({"field", "5"}).doc();
    EXPECT_EQ(f["disc"], 5);
    EXPECT_EQ(f["norm_eps"], -1);
    EXPECT_EQ(f["class_number"], 1);
    EXPECT_EQ(f["narrow_class_number"], 1);
    EXPECT_EQ(run({"field", "3"}).doc()["narrow_class_number"], 2);
}

TEST(Cli, IndecomposablesOfRingAndIdeal) {
    const json ring = run({"indec", "2"}).doc();
    // 1 and 2 + sqrt 2 up to eps_plus = 3 + 2 sqrt 2
    EXPECT_EQ(ring["ring"]["count"], 2);
    std::set<std::string> got;
    for (const auto& c : ring["ring"]["classes"]) got.insert(c["canonical"]["value"].get<std::string>());
    EXPECT_EQ(got, (std::set<std::string>{"1+0*sqrt(2)", "2+1*sqrt(2)"}));
    // (sqrt 3) = (3, 0 + omega)
    const auto r = run({"indec", "3", "--ideal", "3,0,1"});
    ASSERT_EQ(r.code, 0) << r.out;
    const json j = r.doc();
    EXPECT_EQ(j["count"], 2);
    EXPECT_EQ(j["kappa"]["cf"], 2);
    EXPECT_FALSE(j["kappa"]["kappa_one"].get<bool>());
    EXPECT_EQ(j["norm_bound"], "108");
    // (2, 1 + omega) is not an ideal of Z[sqrt 3]
    EXPECT_EQ(run({"indec", "3", "--ideal", "2,0,1"}).code, 1);
}

TEST(Cli, ScanCsvMatchesJsonAndOracle) {
    const auto csv = run({"scan", "--d", "2", "--disc-range", "5..40", "--out", "csv"});
    ASSERT_EQ(csv.code, 0);
    std::istringstream in(csv.out);
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "D,disc,h_plus,norm_eps,s1,zeta_minus1,rhs,R_min");
    std::vector<std::vector<std::string>> rows;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::stringstream ls(line);
        for (std::string c; std::getline(ls, c, ',');) cells.push_back(c);
        ASSERT_EQ(cells.size(), 8u);
        rows.push_back(cells);
    }
    // fundamental discriminants in [5, 40]
    const std::vector<std::int64_t> discs{5, 8, 12, 13, 17, 21, 24, 28, 29, 33, 37, 40};
    ASSERT_EQ(rows.size(), discs.size());
    const json j = run({"scan", "--disc-range", "5..40"}).doc();
    ASSERT_EQ(j["rows"].size(), discs.size());
    for (std::size_t k = 0; k < rows.size(); ++k) {
        EXPECT_EQ(std::stoll(rows[k][1]), discs[k]);
        const QuadraticField K(std::stoll(rows[k][0]));
        EXPECT_EQ(K.disc(), discs[k]);
        EXPECT_EQ(rows[k][5], zeta_minus1_oracle(K).get_str());
        EXPECT_EQ(rows[k][7], "1");
        EXPECT_EQ(j["rows"][k]["zeta_minus1"], rows[k][5]);
        EXPECT_EQ(j["rows"][k]["s1"].dump(), rows[k][4]);
    }
    EXPECT_EQ(rows[0][2], "1");
    EXPECT_EQ(rows[2][2], "2");  // Q(sqrt 3)
}

TEST(Cli, OutputIndependentOfWorkerCount) {
    const auto one = run({"--workers", "1", "scan", "--disc-range", "5..120", "--out", "csv"});
    const auto four = run({"scan", "--disc-range", "5..120", "--out", "csv", "--workers", "4"});
    ASSERT_EQ(one.code, 0);
    EXPECT_EQ(one.out, four.out);
    ::setenv("UQF_WORKERS", "3", 1);
    const auto env = run({"scan", "--disc-range", "5..120", "--out", "csv"});
    EXPECT_EQ(env.out, one.out);
    ::setenv("UQF_WORKERS", "many", 1);
    EXPECT_EQ(run({"scan", "--disc-range", "5..120"}).code, 2);
    ::unsetenv("UQF_WORKERS");
}

TEST(Cli, RankBoundAndThreshold) {
    const json j = run({"rankbound", "--d", "2", "--disc", "5"}).doc();
    EXPECT_EQ(j["R_min"], 1);
    EXPECT_EQ(j["B"], "240");
    EXPECT_NEAR(std::stod(j["rhs"]["lo"].get<std::string>()), 1.84375857897954912e-5, 1e-15);
    const json t = run({"rankbound", "--threshold", "1"}).doc();
    EXPECT_EQ(t["threshold"]["disc0"], "19958050326006");
    EXPECT_EQ(t["threshold"]["R_min_at_next"], 2);
    EXPECT_TRUE(t["threshold"]["minimal"].get<bool>());
}

TEST(Cli, LiftAdmitsOnlyFive) {
    const json j = run({"lift", "--d", "2"}).doc();
    ASSERT_EQ(j["admissible"].size(), 1u);
    EXPECT_EQ(j["admissible"][0]["disc"], 5);
    EXPECT_EQ(j["admissible"][0]["min_codifferent_trace"], 1);
    EXPECT_NEAR(std::stod(j["disc_bound"]["lo"].get<std::string>()), 5.52533759425799758, 1e-12);
}

TEST(Cli, ConfigFileAndOverrides) {
    const std::string cfg = temp_file("uqf.cfg", "# defaults\ntol = 1e-3\nworkers=2\n");
    EXPECT_DOUBLE_EQ(run({"--config", cfg, "zeta", "5"}).doc()["functional_equation"]["tol"].get<double>(), 1e-3);
    EXPECT_DOUBLE_EQ(
        run({"--config", cfg, "zeta", "5", "--tol", "1e-4"}).doc()["functional_equation"]["tol"].get<double>(), 1e-4);
    const std::string bad = temp_file("bad.cfg", "colour=blue\n");
    const auto r = run({"--config", bad, "zeta", "5"});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("colour"), std::string::npos);
}

TEST(Cli, VerifyQuickPassesAndSkipsHigherDegrees) {
    const auto r = run({"verify", "quick"});
    ASSERT_EQ(r.code, 0) << r.out;
    const json j = r.doc();
    EXPECT_TRUE(j["pass"].get<bool>());
    for (const auto& s : j["suites"]) {
        if (s["name"] == "higher_degree_bounds")
            EXPECT_EQ(s["status"], "skipped");
        else
            EXPECT_EQ(s["status"], "pass") << s.dump();
    }
}

TEST(Cli, VerifyReportsInjectedCoefficient) {
    const auto r = run({"verify", "quick", "--inject-b1", "1/120"});
    EXPECT_EQ(r.code, 1);
    const json s = r.doc()["suites"][0];
    EXPECT_EQ(s["name"], "siegel_vs_oracle");
    EXPECT_EQ(s["status"], "fail");
    EXPECT_EQ(s["counterexample"]["D"], 2);
    EXPECT_EQ(s["counterexample"]["oracle"], "1/12");
}

TEST(Cli, VerifyUsesExternalCoefficients) {
    const std::string path = temp_file("coeffs.txt", "2 1 1/240\n3 1 -1/504\n");
    const json j = run({"verify", "quick", "--coeffs", path}).doc();
    EXPECT_TRUE(j["pass"].get<bool>());
    EXPECT_EQ(j["suites"].back()["status"], "pass");
    const json t = run({"rankbound", "--d", "3", "--threshold", "1", "--coeffs", path}).doc();
    EXPECT_EQ(t["threshold"]["R_min_at_next"], 2);
    EXPECT_EQ(t["provenance"], "external");
}

TEST(ParallelMap, KeepsOrderAndRethrows) {
    std::vector<int> xs(200);
    for (int i = 0; i < 200; ++i) xs[i] = i;
    const auto sq = cli::parallel_map(xs, [](int x) { return x * x; }, 7);
    for (int i = 0; i < 200; ++i) EXPECT_EQ(sq[i], i * i);
    EXPECT_THROW(cli::parallel_map(xs, [](int x) { if (x == 150) fail(ErrorKind::DomainError, "x"); return x; }, 4),
                 Error);
    EXPECT_TRUE(cli::parallel_map(std::vector<int>{}, [](int x) { return x; }, 4).empty());
}

TEST(Json, RoundTripsAndKeepsRationalsExact) {
    const json j = run({"zeta", "3"}).doc();
    EXPECT_EQ(json::parse(j.dump()), j);
    EXPECT_TRUE(j["zeta_minus1"].is_string());
    EXPECT_EQ(parse_rational(j["zeta_minus1"].get<std::string>()), Rational(1, 6));
}
