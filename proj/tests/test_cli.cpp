#include "ctrldisc/cli.hpp"

#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

using namespace ctrldisc;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result invoke(std::vector<std::string> args)
{
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::vector<std::string> split_lines(const std::string& s)
{
    std::vector<std::string> lines;
    std::istringstream is(s);
    for (std::string line; std::getline(is, line);)
        lines.push_back(line);
    return lines;
}

} // namespace

TEST(Cli, AuditBasisThreeDimensions)
{
    const auto r = invoke({"audit-basis", "--dim", "3", "--max-degree", "6"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_EQ(j["dimension"], 3);
    std::set<int> nonneg;
    for (const auto& rec : j["records"]) {
        if (rec["all_nonnegative"].get<bool>())
            nonneg.insert(rec["k"].get<int>());
        BigRational sum = 0;
        for (const auto& s : rec["integrals"])
            sum += parse_fraction(s.get<std::string>());
        EXPECT_EQ(sum, BigRational(1, 6));
    }
    EXPECT_EQ(nonneg, (std::set<int>{1, 3}));
}

TEST(Cli, AuditBasisCsv)
{
    const auto r = invoke({"audit-basis", "--dim", "1", "--max-degree", "3", "--csv"});
    ASSERT_EQ(r.code, 0);
    const auto lines = split_lines(r.out);
    ASSERT_EQ(lines.size(), 1u + 2 + 3 + 4);
    EXPECT_EQ(lines[0], "dimension,k,index,integral,negative,all_nonnegative");
    EXPECT_EQ(lines[3], "1,2,0,1/6,false,true");
    for (std::size_t i = 1; i < lines.size(); ++i)
        EXPECT_EQ(std::count(lines[i].begin(), lines[i].end(), ','), 5);
    EXPECT_EQ(invoke({"audit-basis", "--dim", "1", "--max-degree", "3", "--csv", "--json"}).code, 2);
}

TEST(Cli, SolveLinearTriangles)
{
    const auto r = invoke({"solve", "--dim", "2", "--degree", "1", "--alpha", "0.1", "--mesh", "4", "--tol", "1e-10"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_NEAR(j["J"].get<double>(), 1.0, 1e-8);
    EXPECT_LE(j["lambda_norm"].get<double>(), 1e-8);
}

TEST(Cli, CertificateWithoutNegativeBasisIsSuccess)
{
    const auto r = invoke({"certificate", "--dim", "2", "--degree", "2", "--alpha", "0.1"});
    EXPECT_EQ(r.code, 0);
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_EQ(j["error"], "NoNegativeBasis");
    EXPECT_TRUE(j["certificate"].is_null());
}

TEST(Cli, CertificateQuarticTriangles)
{
    const auto r = invoke({"certificate", "--dim", "2", "--degree", "4", "--alpha", "0.1"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto c = nlohmann::json::parse(r.out)["certificate"];
    EXPECT_GT(c["beta"].get<double>(), 0.0);
    EXPECT_GT(c["delta"].get<double>(), 0.0);
    EXPECT_LE(c["measured_objective"].get<double>(), c["objective_bound"].get<double>() + 1e-8);
}

TEST(Cli, ConvergenceJsonAndCsv)
{
    const auto r = invoke({"convergence", "--dim", "1", "--degree", "8", "--alpha", "0.1", "--meshes", "8,4"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_EQ(j["regime"], "INFEASIBLE_LIMIT");
    EXPECT_EQ(j["runs"][0]["n"], 4);
    EXPECT_EQ(j["runs"][1]["n"], 8);

    const auto c = invoke({"convergence", "--dim", "2", "--degree", "1", "--csv"});
    ASSERT_EQ(c.code, 0) << c.err;
    const auto lines = split_lines(c.out);
    ASSERT_EQ(lines.size(), 4u);
    EXPECT_EQ(lines[0], "n,J,min_cell_avg,neg_part_norm,iters,regime");
    EXPECT_EQ(lines[1].substr(0, 2), "4,");
    EXPECT_NE(lines[3].find("FEASIBLE_LIMIT"), std::string::npos);
}

TEST(Cli, UsageErrorsExitTwoWithPayload)
{
    const std::vector<std::vector<std::string>> bad{
        {},
        {"frobnicate"},
        {"audit-basis", "--dim", "4", "--max-degree", "2"},
        {"audit-basis", "--dim", "3", "--max-degree", "40"},
        {"audit-basis", "--dim", "2"},
        {"solve", "--dim", "3", "--degree", "1", "--mesh", "4"},
        {"solve", "--dim", "2", "--degree", "9", "--mesh", "4"},
        {"solve", "--dim", "2", "--degree", "1", "--mesh", "4", "--alpha", "-1"},
        {"solve", "--dim", "2", "--degree", "1", "--mesh", "four"},
        {"convergence", "--dim", "2", "--degree", "1", "--meshes", "4"},
        {"certificate", "--dim", "2"},
    };
    for (const auto& args : bad) {
        const auto r = invoke(args);
        EXPECT_EQ(r.code, 2) << (args.empty() ? "<none>" : args[0]);
        const auto j = nlohmann::json::parse(r.out);
        EXPECT_EQ(j["error"], "usage");
    }
}

TEST(Cli, NumericalFailureExitsThree)
{
    const auto r = invoke({"solve", "--dim", "2", "--degree", "4", "--mesh", "2", "--max-iterations", "3"});
    EXPECT_EQ(r.code, 3);
    EXPECT_EQ(nlohmann::json::parse(r.out)["error"], "QpIterationLimit");
}

TEST(Cli, HelpExitsZero)
{
    const auto r = invoke({"--help"});
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("audit-basis"), std::string::npos);
}

TEST(Cli, IdenticalInvocationsAreByteIdentical)
{
    const std::vector<std::string> args{"convergence", "--dim", "2", "--degree", "4", "--meshes", "2,4"};
    const auto a = invoke(args);
    const auto b = invoke(args);
    ASSERT_EQ(a.code, 0) << a.err;
    EXPECT_EQ(a.out, b.out);
    // 17 significant digits survive the round trip.
    const auto j = nlohmann::json::parse(a.out);
    const double delta = j["certificate"]["delta"].get<double>();
    EXPECT_EQ(format_double(delta), format_double(nlohmann::json::parse(format_double(delta)).get<double>()));
}

TEST(Cli, OutPathWritesFile)
{
    const auto path = std::filesystem::temp_directory_path() / "ctrldisc_cli_test.json";
    std::filesystem::remove(path);
    const auto r = invoke({"audit-basis", "--dim", "2", "--max-degree", "3", "--out", path.string()});
    ASSERT_EQ(r.code, 0);
    EXPECT_TRUE(r.out.empty());
    std::ifstream in(path);
    const auto j = nlohmann::json::parse(in);
    EXPECT_EQ(j["records"].size(), 3u);
    std::filesystem::remove(path);
}
