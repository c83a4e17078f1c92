#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <string>
#include <sys/wait.h>

#include <json.hpp>

namespace {

struct Result {
    int status;
    std::string out;
};

Result run(const std::string& args)
{
    const std::string cmd = std::string(LTAVG_CLI_PATH) + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return {-1, ""};
    std::string out;
    std::array<char, 4096> buf{};
    while (std::size_t n = fread(buf.data(), 1, buf.size(), pipe)) out.append(buf.data(), n);
    const int st = pclose(pipe);
    return {WIFEXITED(st) ? WEXITSTATUS(st) : -1, out};
}

} // namespace

TEST(Cli, ClassnumPrintsRational)
{
    const auto r = run("classnum --D -3");
    EXPECT_EQ(r.status, 0);
    EXPECT_EQ(r.out, "1/3\n");
    EXPECT_EQ(run("classnum --D -20").out, "2/1\n");
}

TEST(Cli, ExitCodes)
{
    EXPECT_EQ(run("classnum --D -5").status, 1);
    EXPECT_EQ(run("classnum --bogus 3").status, 2);
    EXPECT_EQ(run("nosuchcommand").status, 2);
    EXPECT_EQ(run("trace --p 5 --a 0 --b 0").status, 1);
    EXPECT_EQ(run("hurwitz-sum --field nowhere --x 100").status, 2);
    EXPECT_EQ(run("box-average --box \"a1=(0);b1=(1)\" --x 100").status, 2);
    EXPECT_EQ(run("hurwitz-sum --checkpoints 100,50").status, 2);
}

TEST(Cli, ClassnumTable)
{
    const auto r = run("classnum --table -16 -3");
    EXPECT_EQ(r.status, 0);
    EXPECT_NE(r.out.find("D,h,w,H_num,H_den\n-3,1,6,1,3\n-4,1,4,1,2\n"), std::string::npos);
    EXPECT_NE(r.out.find("-16,1,2,3,2\n"), std::string::npos);
}

TEST(Cli, Trace)
{
    EXPECT_EQ(run("trace --p 5 --a 1 --b 1").out, "-3\n");
    EXPECT_EQ(run("trace --p 5 --f 2 --modpoly 3,0,1 --a 0 --b 0,1").out, "10\n");
}

TEST(Cli, ConstantBoth)
{
    const auto r = run("constant --field Q --r 1 --method both --kmax 40 --nmax 600");
    ASSERT_EQ(r.status, 0);
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_EQ(j.at("schema_version"), 1);
    EXPECT_EQ(j.at("report").at("estimates").size(), 2u);
    EXPECT_LT(j.at("report").at("relative_gap").get<double>(), 0.05);
}

TEST(Cli, ReportBodyIndependentOfWorkers)
{
    const std::string args = "box-average --field Q --r 1 --box \"a1=(0);b1=(5);a2=(0);b2=(5)\" --checkpoints 200,500";
    const auto a = run(args + " --workers 1");
    const auto b = run(args + " --workers 3");
    ASSERT_EQ(a.status, 0);
    ASSERT_EQ(b.status, 0);
    EXPECT_EQ(nlohmann::json::parse(a.out).at("report"), nlohmann::json::parse(b.out).at("report"));
    const auto csv = run(args + " --format csv");
    EXPECT_EQ(csv.out.substr(0, 29), "x,empirical,theoretical,ratio");
}

TEST(Cli, CountReductions)
{
    const auto r = run("count-reductions --field Q --box \"a1=(0);b1=(5);a2=(0);b2=(5)\" --p 11 --target 1,1");
    ASSERT_EQ(r.status, 0);
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_EQ(j.at("report").at("equidistributed"), "5/1");
}
