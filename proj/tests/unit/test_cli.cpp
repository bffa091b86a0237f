// SPDX-License-Identifier: Apache-2.0
//
// isacsim: localization-assisted ISAC channel simulation
// Copyright (C) 2026 The isacsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "commands.hpp"

#include "isac/io.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

using namespace isac;
namespace fs = std::filesystem;

namespace
{

class CliTest : public ::testing::Test
{
  protected:
    void SetUp() override
    {
        const auto *info = ::testing::UnitTest::GetInstance()->current_test_info();
        dir_ = fs::temp_directory_path() / (std::string("isacsim_cli_") + info->name());
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    fs::path path(const std::string &name) const { return dir_ / name; }

    std::string write_config(const std::string &name, const std::string &body) const
    {
        std::ofstream(path(name)) << body;
        return path(name).string();
    }

    fs::path dir_;
};

std::string slurp(const fs::path &p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::map<std::string, std::string> directory_contents(const fs::path &dir)
{
    std::map<std::string, std::string> out;
    for (const auto &e : fs::directory_iterator(dir))
        out[e.path().filename().string()] = slurp(e.path());
    return out;
}

std::map<std::string, std::string> summary_values(const fs::path &p)
{
    std::map<std::string, std::string> out;
    std::istringstream is(slurp(p));
    std::string line;
    while (std::getline(is, line))
    {
        const auto sp = line.find(' ');
        if (line.empty() || line[0] == '#' || sp == std::string::npos)
            continue;
        out.emplace(line.substr(0, sp), line.substr(sp + 1));
    }
    return out;
}

const char *kShortRun = "[run]\nduration = 2\n[tracker]\nparticles = 200\n";

const char *kNoiselessStatic = "[run]\nduration = 2\n"
                               "[scene]\nspeed_max = 0\n"
                               "[noise]\nsigma_delay = 0\nsigma_angle_deg = 0\nsigma_doppler = 0\n"
                               "[tracker]\nparticles = 100\nprocess_position_std = 0\nprocess_velocity_std = 0\n"
                               "init_position_std = 0\ninit_velocity_std = 0\n";

int simulate(const std::string &config, const fs::path &out)
{
    std::ostringstream log;
    return cli::simulate({config, std::nullopt, out.string()}, log);
}

int track(const fs::path &obs, const fs::path &out)
{
    std::ostringstream log;
    return cli::track({obs.string(), "", std::nullopt, out.string()}, log);
}

int run_stats(const fs::path &input, const fs::path &out, const std::string &label)
{
    std::ostringstream log;
    return cli::stats({input.string(), out.string(), label}, log);
}

int compare(const fs::path &a, const fs::path &b, const fs::path &out)
{
    std::ostringstream log;
    return cli::compare({a.string(), b.string(), out.string(), "compare"}, log);
}

} // namespace

TEST_F(CliTest, SimulateWritesEveryOutput)
{
    ASSERT_EQ(simulate(write_config("run.ini", kShortRun), path("sim")), cli::kExitOk);
    for (const char *name : {"scene.txt", "sensing_taps.csv", "comm_taps.csv", "comm_observations.csv",
                             "sensing_observations.csv", "run_config.ini"})
    {
        ASSERT_TRUE(fs::exists(path("sim") / name)) << name;
        EXPECT_GT(fs::file_size(path("sim") / name), 0u) << name;
    }
}

TEST_F(CliTest, MalformedConfigLeavesNoOutputs)
{
    std::ostringstream log;
    const auto cfg = write_config("bad.ini", "[run]\nduration = 2\n[scene]\nspeed_max = fast\n");
    EXPECT_EQ(cli::simulate({cfg, std::nullopt, path("sim").string()}, log), cli::kExitUsage);
    EXPECT_FALSE(fs::exists(path("sim")));
    EXPECT_NE(log.str().find("bad.ini:4:"), std::string::npos) << log.str();

    const auto invalid = write_config("invalid.ini", "[tracker]\nparticles = 0\n");
    EXPECT_NE(simulate(invalid, path("sim2")), cli::kExitOk);
    EXPECT_FALSE(fs::exists(path("sim2")));
}

TEST_F(CliTest, FullPipelineIsByteReproducible)
{
    const auto cfg = write_config("run.ini", kShortRun);
    std::map<std::string, std::string> runs[2];
    for (int i = 0; i < 2; ++i)
    {
        const auto root = path("run" + std::to_string(i));
        ASSERT_EQ(simulate(cfg, root / "sim"), 0);
        ASSERT_EQ(track(root / "sim", root / "trk"), 0);
        ASSERT_EQ(run_stats(root / "trk" / "model_paths.csv", root / "st", "model"), 0);
        for (const char *sub : {"sim", "trk", "st"})
            for (auto &[name, body] : directory_contents(root / sub))
                runs[i][std::string(sub) + "/" + name] = body;
    }
    EXPECT_EQ(runs[0], runs[1]);
    EXPECT_GT(runs[0].size(), 10u);
}

TEST_F(CliTest, SeedOverrideChangesTheScene)
{
    const auto cfg = write_config("run.ini", kShortRun);
    std::ostringstream log;
    ASSERT_EQ(cli::simulate({cfg, 5, path("a").string()}, log), 0);
    ASSERT_EQ(cli::simulate({cfg, 6, path("b").string()}, log), 0);
    EXPECT_NE(slurp(path("a") / "scene.txt"), slurp(path("b") / "scene.txt"));
    EXPECT_NE(slurp(path("a") / "run_config.ini").find("seed = 5"), std::string::npos);
}

TEST_F(CliTest, OutputTablesRoundTripThroughTheirParsers)
{
    ASSERT_EQ(simulate(write_config("run.ini", kShortRun), path("sim")), 0);
    ASSERT_EQ(track(path("sim"), path("trk")), 0);
    ASSERT_EQ(run_stats(path("trk") / "oracle_paths.csv", path("st"), "oracle"), 0);
    ASSERT_EQ(compare(path("st") / "spreads_oracle.csv", path("st") / "spreads_oracle.csv", path("st")), 0);

    auto check = [&](const fs::path &p, auto read, auto write)
    {
        std::istringstream is(slurp(p));
        const auto rows = read(is);
        std::ostringstream os;
        write(os, rows);
        EXPECT_EQ(os.str(), slurp(p)) << p;
        EXPECT_FALSE(rows.empty()) << p;
    };
    using namespace io;
    check(path("sim") / "comm_observations.csv",
          [](std::istream &is) { return read_paths(is, schema::kCommObservations); },
          [](std::ostream &os, const auto &r) { write_paths(os, schema::kCommObservations, r); });
    check(path("sim") / "sensing_observations.csv", [](std::istream &is) { return read_detections(is); },
          [](std::ostream &os, const auto &r) { write_detections(os, r); });
    check(path("sim") / "sensing_taps.csv", [](std::istream &is) { return read_sensing_taps(is); },
          [](std::ostream &os, const auto &r) { write_sensing_taps(os, r); });
    check(path("sim") / "comm_taps.csv", [](std::istream &is) { return read_comm_taps(is); },
          [](std::ostream &os, const auto &r) { write_comm_taps(os, r); });
    check(path("trk") / "trajectory.csv", [](std::istream &is) { return read_trajectory(is); },
          [](std::ostream &os, const auto &r) { write_trajectory(os, r); });
    check(path("trk") / "model_paths.csv", [](std::istream &is) { return read_paths(is, schema::kPaths); },
          [](std::ostream &os, const auto &r) { write_paths(os, schema::kPaths, r); });
    check(path("st") / "spreads_oracle.csv", [](std::istream &is) { return read_spreads(is); },
          [](std::ostream &os, const auto &r) { write_spreads(os, r); });
    check(path("st") / "ks_compare.csv", [](std::istream &is) { return read_ks(is); },
          [](std::ostream &os, const auto &r) { write_ks(os, r); });

    std::istringstream cdf(slurp(path("st") / "cdf_oracle_delay_spread.csv"));
    EXPECT_FALSE(read_cdf(cdf).empty());
}

TEST_F(CliTest, NoiselessStaticRunTracksExactly)
{
    ASSERT_EQ(simulate(write_config("zero.ini", kNoiselessStatic), path("sim")), 0);
    ASSERT_EQ(track(path("sim"), path("trk")), 0);
    const auto s = summary_values(path("trk") / "tracking_summary.txt");
    for (const char *key : {"user_run_rmse_m", "fb_run_rmse_m", "lb_run_rmse_m"})
        EXPECT_LT(std::stod(s.at(key)), 1e-6) << key;

    ASSERT_EQ(run_stats(path("trk") / "oracle_paths.csv", path("st"), "oracle"), 0);
    ASSERT_EQ(compare(path("st") / "spreads_oracle.csv", path("st") / "spreads_oracle.csv", path("st")), 0);
    std::istringstream ks(slurp(path("st") / "ks_compare.csv"));
    const auto rows = io::read_ks(ks);
    EXPECT_EQ(rows.size(), 5u);
    for (const auto &r : rows)
        EXPECT_EQ(r.ks, 0.0) << r.quantity;
}

TEST_F(CliTest, WithheldFramesAreFlaggedAsCoasting)
{
    const auto withheld = write_config("gap.ini", "[run]\nduration = 2\nwithhold = 5-8\n[tracker]\nparticles = 200\n");
    ASSERT_EQ(simulate(withheld, path("sim")), 0);
    ASSERT_EQ(track(path("sim"), path("trk")), 0);
    EXPECT_EQ(summary_values(path("trk") / "tracking_summary.txt").at("coast_intervals"), "5-8");
}

TEST_F(CliTest, TrackRejectsMismatchedTs)
{
    ASSERT_EQ(simulate(write_config("run.ini", kShortRun), path("sim")), 0);
    const auto other = write_config("ts.ini", "[run]\nduration = 2\nts = 0.2\n");
    std::ostringstream log;
    EXPECT_EQ(cli::track({path("sim").string(), other, std::nullopt, path("trk").string()}, log), cli::kExitInput);
    EXPECT_NE(log.str().find("Ts"), std::string::npos) << log.str();
    EXPECT_FALSE(fs::exists(path("trk")));
}

TEST_F(CliTest, TrackReportsMissingInputs)
{
    EXPECT_EQ(track(path("nowhere"), path("trk")), cli::kExitInput);
    std::ostringstream log;
    EXPECT_EQ(cli::track({"", "", std::nullopt, path("trk").string()}, log), cli::kExitUsage);
}

TEST_F(CliTest, StatsAcceptsTapTablesAndRejectsOthers)
{
    ASSERT_EQ(simulate(write_config("run.ini", kShortRun), path("sim")), 0);
    ASSERT_EQ(run_stats(path("sim") / "comm_taps.csv", path("st"), "taps"), 0);
    EXPECT_TRUE(fs::exists(path("st") / "spreads_taps.csv"));
    EXPECT_TRUE(fs::exists(path("st") / "cdf_taps_delay_spread.csv"));
    EXPECT_FALSE(fs::exists(path("st") / "cdf_taps_aod_az_spread.csv"));
    EXPECT_EQ(run_stats(path("sim") / "sensing_taps.csv", path("st2"), "x"), cli::kExitInput);
    EXPECT_EQ(run_stats(path("sim") / "scene.txt", path("st2"), "x"), cli::kExitInput);
}

TEST_F(CliTest, CompareRejectsMismatchedQuantities)
{
    ASSERT_EQ(simulate(write_config("run.ini", kShortRun), path("sim")), 0);
    ASSERT_EQ(run_stats(path("sim") / "comm_taps.csv", path("st"), "taps"), 0);
    ASSERT_EQ(run_stats(path("sim") / "comm_observations.csv", path("st"), "obs"), 0);
    EXPECT_EQ(compare(path("st") / "spreads_taps.csv", path("st") / "spreads_obs.csv", path("st")), cli::kExitInput);
}

TEST_F(CliTest, ExecutableParsesArguments)
{
    const std::string exe = ISACSIM_EXE;
    auto run = [&](const std::string &args)
    {
        const int rc = std::system((exe + " " + args + " > " + path("log.txt").string() + " 2>&1").c_str());
        return WEXITSTATUS(rc);
    };
    EXPECT_EQ(run("--help"), 0);
    EXPECT_EQ(run(""), cli::kExitUsage);
    EXPECT_EQ(run("frobnicate"), cli::kExitUsage);
    EXPECT_EQ(run("track"), cli::kExitUsage);
    const auto cfg = write_config("run.ini", "[run]\nduration = 0.5\n");
    EXPECT_EQ(run("simulate --config " + cfg + " --seed 3 --out " + path("sim").string()), 0);
    EXPECT_TRUE(fs::exists(path("sim") / "comm_taps.csv"));
    EXPECT_NE(slurp(path("sim") / "run_config.ini").find("seed = 3"), std::string::npos);
}
