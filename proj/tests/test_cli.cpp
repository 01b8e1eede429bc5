#include <gtest/gtest.h>

#include <sstream>
#include <string>
#include <vector>

#include "curvkit/commands.hpp"

using namespace curvkit;

namespace {

struct Result {
    int code = -1;
    std::string out;
    std::string err;
};

Result run(std::vector<std::string> args)
{
    args.insert(args.begin(), "curvkit");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    Result r;
    r.code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

}  // namespace

TEST(Cli, CurvatureCheckExitCodes)
{
    auto pass = run({"curvature-check", "--space", "product:hyperbolic(2)*sphere(2)", "--k", "1", "--samples", "300"});
    EXPECT_EQ(pass.code, kExitPass) << pass.err;
    EXPECT_NE(pass.out.find("\"passed\": true"), std::string::npos);

    auto fail = run({"curvature-check", "--space", "sphere(2)", "--k", "2", "--samples", "100"});
    EXPECT_EQ(fail.code, kExitFail);
    EXPECT_NE(fail.out.find("\"witness\": {"), std::string::npos);

    EXPECT_EQ(run({"curvature-check", "--space", "nonsense"}).code, kExitUsage);
    EXPECT_EQ(run({"curvature-check"}).code, kExitUsage);
    EXPECT_EQ(run({"curvature-check", "--space", "sphere(2)", "--format", "xml"}).code, kExitUsage);
}

TEST(Cli, CurvatureCheckCsv)
{
    auto r = run({"curvature-check", "--space", "sphere(2)", "--k", "0.5", "--samples", "50", "--format", "csv"});
    EXPECT_EQ(r.code, kExitPass);
    EXPECT_EQ(r.out.rfind("k,samples,tolerance,min_margin,violations,passed,", 0), 0u);
}

TEST(Cli, Su21Examples)
{
    auto ok = run({"su21", "--t", "-0.8", "--k", "0.1", "--samples", "2000", "--pairs", "100"});
    EXPECT_EQ(ok.code, kExitPass) << ok.out;
    auto infeasible = run({"su21", "--t", "-0.5", "--k", "0.2", "--samples", "0", "--pairs", "100"});
    EXPECT_EQ(infeasible.code, kExitFail);
    EXPECT_NE(infeasible.out.find("\"jacobi\""), std::string::npos);
    EXPECT_EQ(run({"su21", "--t", "-1.0", "--k", "0.1"}).code, kExitUsage);
    EXPECT_EQ(run({"su21", "--t", "abc"}).code, kExitUsage);
}

TEST(Cli, Su21WitnessMarginExact)
{
    auto r = run({"su21", "--t", "-0.8", "--k", "0.5", "--samples", "0", "--pairs", "10"});
    EXPECT_EQ(r.code, kExitFail);
    EXPECT_NE(r.out.find("\"margin\": \"-3/10\""), std::string::npos);
}

TEST(Cli, ScanDefaultsAndEmptyGrid)
{
    auto r = run({"scan"});
    EXPECT_EQ(r.code, kExitPass);
    EXPECT_EQ(r.out.rfind("t,k,ineq1,ineq2,ineq3,ineq4,feasible,min_margin\n", 0), 0u);
    EXPECT_NE(r.err.find("feasible cells:"), std::string::npos);
    EXPECT_NE(r.err.find("feasible t in [-0.99, -0.61]"), std::string::npos) << r.err;

    EXPECT_EQ(run({"scan", "--t-min", "-0.5", "--t-max", "-0.6"}).code, kExitUsage);
    EXPECT_EQ(run({"scan", "--t-step", "0"}).code, kExitUsage);
}

TEST(Cli, ScanSingleCell)
{
    auto r = run({"scan", "--t", "-0.8", "--k", "0.1"});
    EXPECT_EQ(r.code, kExitPass);
    EXPECT_NE(r.out.find("-0.8,0.1,true,true,true,true,true,"), std::string::npos);
}

TEST(Cli, GeodesicCommands)
{
    auto wl = run({"geodesic", "warped-lightlike", "--k", "1"});
    EXPECT_EQ(wl.code, kExitPass) << wl.err;
    EXPECT_EQ(wl.out.rfind("# {", 0), 0u);
    auto wt = run({"geodesic", "warped-timelike", "--k", "1", "--format", "json"});
    EXPECT_EQ(wt.code, kExitPass);
    EXPECT_NE(wt.out.find("\"status\": \"BlowUp\""), std::string::npos);
    EXPECT_EQ(run({"geodesic", "warped-timelike", "--c1", "2"}).code, kExitUsage);

    auto ea = run({"geodesic", "euler-arnold", "--t", "-0.8", "--u-max", "1000", "--format", "json"});
    EXPECT_EQ(ea.code, kExitPass);
    EXPECT_NE(ea.out.find("\"status\": \"Completed\""), std::string::npos);

    auto ri = run({"geodesic", "riccati", "--k", "1", "--h0", "0"});
    EXPECT_EQ(ri.code, kExitPass);
    EXPECT_NE(ri.out.find("\nrun,h0,t,h\n"), std::string::npos);
    EXPECT_EQ(run({"geodesic", "riccati", "--k", "-1"}).code, kExitUsage);
    EXPECT_EQ(run({"geodesic"}).code, kExitUsage);
}

TEST(Cli, OutputIndependentOfThreads)
{
    const std::vector<std::vector<std::string>> commands = {
        {"curvature-check", "--space", "warped:hyperbolic(2)*torus(2):alpha=busemann", "--samples", "300", "--seed", "5"},
        {"scan", "--t-min", "-0.9", "--t-max", "-0.7", "--t-step", "0.1", "--k-min", "0.05", "--k-max", "0.2",
         "--k-step", "0.05", "--samples", "200", "--seed", "3"},
        {"su21", "--samples", "500", "--pairs", "20", "--seed", "7"},
    };
    for (auto cmd : commands) {
        std::string first;
        for (const char* threads : {"1", "2", "8"}) {
            auto c = cmd;
            c.push_back("--threads");
            c.push_back(threads);
            auto r = run(c);
            if (first.empty())
                first = r.out;
            else
                EXPECT_EQ(r.out, first) << cmd[0] << " threads=" << threads;
        }
        EXPECT_FALSE(first.empty());
    }
}

TEST(Cli, HelpExitsCleanly)
{
    EXPECT_EQ(run({"--help"}).code, kExitPass);
}
