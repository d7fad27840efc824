/*
   Copyright 2026 The mcaoi Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>
#include <unistd.h>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

namespace fs = std::filesystem;

namespace {

const fs::path& workdir()
{
    static const fs::path dir = [] {
        auto d = fs::temp_directory_path() / ("mcaoi_cli_" + std::to_string(::getpid()));
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

std::string slurp(const fs::path& p)
{
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

struct Run {
    int code;
    std::string out;
};

Run mcaoi(const std::string& args)
{
    const auto out = workdir() / "stdout.txt";
    const std::string cmd = std::string(MCAOI_CLI_PATH) + " " + args + " > " + out.string() + " 2> " +
                            (workdir() / "stderr.txt").string();
    const int status = std::system(cmd.c_str());
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(out)};
}

std::string path(const std::string& name) { return (workdir() / name).string(); }

} // namespace

TEST(Cli, AnalyticJson)
{
    const auto r = mcaoi("analytic --n 10 --k 7 --rate 1/3 --shift 0.1 --deadline 3");
    ASSERT_EQ(r.code, 0);
    const auto j = nlohmann::ordered_json::parse(r.out);
    EXPECT_EQ(j.size(), 16u);
    EXPECT_NEAR(j["avg_aoi"].get<double>(), 4.55422466513893, 1e-12);
    EXPECT_EQ(j.begin().key(), "N");
}

TEST(Cli, InfiniteDeadline)
{
    const auto r = mcaoi("analytic --deadline inf --rate 0.3333333333333333");
    ASSERT_EQ(r.code, 0);
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_EQ(j["T_D"], "inf");
    EXPECT_NEAR(j["avg_aoi"].get<double>(), 5.08696752866349, 1e-12);
}

TEST(Cli, ExitCodes)
{
    EXPECT_EQ(mcaoi("analytic --k 11").code, 2);
    EXPECT_EQ(mcaoi("analytic --rate -1").code, 2);
    EXPECT_EQ(mcaoi("analytic --deadline 0.05").code, 2);
    EXPECT_EQ(mcaoi("analytic --n 31 --k 3").code, 3);
    EXPECT_EQ(mcaoi("analytic --bogus").code, 2);
    EXPECT_EQ(mcaoi("").code, 2);
    EXPECT_EQ(mcaoi("analytic --output /nonexistent-dir/x.json").code, 4);
    EXPECT_EQ(mcaoi("--help").code, 0);
}

TEST(Cli, CsvFormat)
{
    const auto r = mcaoi("analytic --format csv");
    ASSERT_EQ(r.code, 0);
    EXPECT_EQ(r.out.rfind("# schema: mcaoi-analytic-csv/1\nN,K,lambda_s,", 0), 0u);
}

TEST(Cli, SimulationIsReproducibleAndReplayable)
{
    const std::string common = "simulate --updates 20000 --trials 3 --seed 5 --compare";
    ASSERT_EQ(mcaoi(common + " --threads 2 --output " + path("a.json")).code, 0);
    ASSERT_EQ(mcaoi(common + " --threads 1 --output " + path("b.json")).code, 0);
    EXPECT_EQ(slurp(path("a.json")), slurp(path("b.json")));
    const auto manifest = slurp(path("a.json.manifest.toml"));
    EXPECT_NE(manifest.find("command = \"simulate\""), std::string::npos);
    EXPECT_NE(manifest.find("tool_version"), std::string::npos);
    EXPECT_NE(manifest.find("formula_variants"), std::string::npos);
    EXPECT_NE(manifest.find("seed = 5"), std::string::npos);

    ASSERT_EQ(mcaoi("replay " + path("a.json.manifest.toml") + " --output " + path("c.json")).code, 0);
    EXPECT_EQ(slurp(path("a.json")), slurp(path("c.json")));

    const auto j = nlohmann::json::parse(slurp(path("a.json")));
    EXPECT_TRUE(j["estimates"]["avg_aoi"].contains("within_ci"));
    EXPECT_EQ(j["trials"], 3);
}

TEST(Cli, Trace)
{
    ASSERT_EQ(mcaoi("simulate --updates 3000 --trials 1 --warmup 100 --trace " + path("t.ndjson")).code, 0);
    std::ifstream f(path("t.ndjson"));
    std::string line;
    int n = 0;
    while (std::getline(f, line)) {
        const auto j = nlohmann::json::parse(line);
        EXPECT_NEAR(j["Y"].get<double>(), j["W"].get<double>() + j["XS"].get<double>(), 1e-9 * j["Y"].get<double>());
        ++n;
    }
    EXPECT_GT(n, 1000);
}

TEST(Cli, Sweeps)
{
    auto r = mcaoi("sweep --range 0.5 1.5 --step 0.25");
    ASSERT_EQ(r.code, 0);
    EXPECT_EQ(r.out.rfind("# schema: mcaoi-sweep-csv/1\n", 0), 0u);
    EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 7);
    r = mcaoi("sweep --var quorum --rate 0.5");
    ASSERT_EQ(r.code, 0);
    EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 12);
}

TEST(Cli, Optimize)
{
    auto r = mcaoi("optimize --range 0.2 10");
    ASSERT_EQ(r.code, 0);
    auto j = nlohmann::json::parse(r.out);
    EXPECT_NEAR(j["t_d_star"].get<double>(), 0.9, 0.1);
    EXPECT_FALSE(j["boundary_minimum"].get<bool>());
    r = mcaoi("optimize --sweep-var quorum --rate 1/2");
    ASSERT_EQ(r.code, 0);
    j = nlohmann::json::parse(r.out);
    EXPECT_EQ(j["k_star"], 3);
    EXPECT_EQ(j["avg_aoi_by_k"].size(), 10u);
}

TEST(Cli, ConfigFileWithFlagOverride)
{
    {
        std::ofstream cfg(path("run.toml"));
        cfg << "n = 6\nk = 2\nrate = \"1/2\"\nshift = 0.2\ndeadline = \"inf\"\n";
    }
    auto r = mcaoi("analytic --config " + path("run.toml"));
    ASSERT_EQ(r.code, 0);
    auto j = nlohmann::json::parse(r.out);
    EXPECT_EQ(j["N"], 6);
    EXPECT_EQ(j["K"], 2);
    EXPECT_EQ(j["lambda_s"], 0.5);
    EXPECT_EQ(j["T_D"], "inf");
    r = mcaoi("analytic --config " + path("run.toml") + " --k 5");
    ASSERT_EQ(r.code, 0);
    j = nlohmann::json::parse(r.out);
    EXPECT_EQ(j["K"], 5);
    EXPECT_EQ(j["N"], 6);
}
