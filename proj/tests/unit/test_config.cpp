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

#include "isac/config.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace isac;

namespace
{

RunConfig parse(const std::string &text)
{
    std::istringstream is(text);
    return parse_config(is, "test.ini");
}

std::string error_of(const std::string &text)
{
    try
    {
        parse(text);
    }
    catch (const ConfigError &e)
    {
        return e.what();
    }
    return "no error";
}

std::string written(const RunConfig &cfg)
{
    std::ostringstream os;
    write_config(os, cfg);
    return os.str();
}

} // namespace

TEST(Config, DefaultsAreValid)
{
    const RunConfig cfg;
    EXPECT_NO_THROW(cfg.validate());
    EXPECT_EQ(cfg.frame_count(), 201);
    EXPECT_NEAR(cfg.spacing(), 0.5 * kSpeedOfLight / 28e9, 1e-18);
    EXPECT_EQ(cfg.tx_array().element_count(), 128u);
    EXPECT_EQ(cfg.rx_array().origin(), cfg.scene.user_start);
}

TEST(Config, ParsesSectionsCommentsAndValues)
{
    const auto cfg = parse("# comment\n"
                           "[run]\n"
                           "seed = 42\n"
                           "; another comment\n"
                           "withhold = 50-60 75\n"
                           "comm_taps = all\n"
                           "[scene]\n"
                           "bs_position = 1 2 3\n"
                           "include_bounce_leg = true\n"
                           "[channel]\n"
                           "kappa_db = 10\n"
                           "[tracker]\n"
                           "particles = 250\n");
    EXPECT_EQ(cfg.seed, 42u);
    ASSERT_EQ(cfg.withheld.size(), 2u);
    EXPECT_EQ(cfg.withheld[0], (FrameRange{50, 60}));
    EXPECT_EQ(cfg.withheld[1], (FrameRange{75, 75}));
    EXPECT_TRUE(cfg.is_withheld(55));
    EXPECT_TRUE(cfg.is_withheld(75));
    EXPECT_FALSE(cfg.is_withheld(61));
    EXPECT_EQ(cfg.comm_taps, TapExport::AllPairs);
    EXPECT_EQ(cfg.scene.bs_position, (Vec3{1, 2, 3}));
    EXPECT_TRUE(cfg.scene.include_bounce_leg);
    EXPECT_EQ(cfg.tracker.particles, 250u);
    EXPECT_NEAR(cfg.polarization_bank().los().kappa, 10.0, 1e-12);
}

TEST(Config, ErrorsNameSourceAndLine)
{
    EXPECT_EQ(error_of("[run]\nseed = 1\n[nope]\n").rfind("test.ini:3:", 0), 0u);
    EXPECT_EQ(error_of("[run]\nfoo = 1\n").rfind("test.ini:2:", 0), 0u);
    EXPECT_EQ(error_of("seed = 1\n").rfind("test.ini:1:", 0), 0u);
    EXPECT_EQ(error_of("[run]\nseed = 1\nseed = 2\n").rfind("test.ini:3:", 0), 0u);
    EXPECT_EQ(error_of("[run]\n\nseed = banana\n").rfind("test.ini:3:", 0), 0u);
    EXPECT_EQ(error_of("[scene]\nbs_position = 1 2\n").rfind("test.ini:2:", 0), 0u);
    EXPECT_EQ(error_of("[run]\nwithhold = 9-3\n").rfind("test.ini:2:", 0), 0u);
    EXPECT_EQ(error_of("[run]\njust text\n").rfind("test.ini:2:", 0), 0u);
}

TEST(Config, ValidationErrorsPointAtTheKey)
{
    const auto msg = error_of("[run]\nseed = 3\n\n[noise]\nsigma_delay = -1e-9\n");
    EXPECT_EQ(msg.rfind("test.ini:5:", 0), 0u) << msg;
    EXPECT_NE(msg.find("sigma_delay"), std::string::npos);

    const auto range = error_of("[scene]\nspeed_min = 3\nspeed_max = 1\n");
    EXPECT_NE(range.find("test.ini:"), std::string::npos);

    RunConfig cfg;
    cfg.tracker.particles = 0;
    EXPECT_THROW(cfg.validate(), ConfigError);
}

TEST(Config, WriteParseRoundTrip)
{
    RunConfig cfg;
    cfg.seed = 99;
    cfg.scene.duration = 3.7;
    cfg.scene.user_velocity = {0.25, -1.0 / 3.0, 0.0};
    cfg.scene.include_bounce_leg = true;
    cfg.withheld = {{4, 9}, {12, 12}};
    cfg.comm_taps = TapExport::AllPairs;
    cfg.tracker.gate_sigmas = 2.5;
    cfg.sigma_angle_deg = 0.7;
    const std::string text = written(cfg);
    const auto back = parse(text);
    EXPECT_EQ(written(back), text);
    EXPECT_EQ(back.scene.user_velocity, cfg.scene.user_velocity);
    EXPECT_EQ(back.withheld, cfg.withheld);
}

TEST(Config, DerivedModuleSettings)
{
    RunConfig cfg;
    cfg.sigma_delay = 0.0;
    cfg.sigma_angle_deg = 2.0;
    cfg.scene.include_bounce_leg = true;
    const auto scene = cfg.scene_config();
    EXPECT_EQ(scene.seed, cfg.seed);
    EXPECT_EQ(scene.sigma_delay, 0.0);
    EXPECT_NEAR(scene.sigma_angle, deg_to_rad(2.0), 1e-15);
    const auto trk = cfg.tracker_config();
    EXPECT_GT(trk.measurement.sigma_delay, 0.0);
    EXPECT_NEAR(trk.measurement.sigma_angle, deg_to_rad(2.0), 1e-15);
    EXPECT_TRUE(trk.include_bounce_leg);
    EXPECT_NE(trk.seed, cfg.seed);
    EXPECT_NO_THROW(trk.validate());
    EXPECT_EQ(cfg.observation_noise().sigma_delay, 0.0);
}

TEST(Config, MissingFileIsAConfigError)
{
    EXPECT_THROW(load_config("/nonexistent/run.ini"), ConfigError);
}
