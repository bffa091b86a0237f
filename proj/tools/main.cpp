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

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char **argv)
{
    using namespace isac::cli;

    CLI::App app{"isacsim: ISAC channel simulation, scatterer tracking and channel statistics"};
    app.require_subcommand(1);

    SimulateOptions sim;
    std::uint64_t sim_seed = 0;
    auto *cmd_sim = app.add_subcommand("simulate", "Generate a scene, channel taps and noisy observations");
    cmd_sim->add_option("--config", sim.config, "Run configuration (INI)")->check(CLI::ExistingFile);
    auto *sim_seed_opt = cmd_sim->add_option("--seed", sim_seed, "Override the configured seed");
    cmd_sim->add_option("--out", sim.out, "Output directory")->capture_default_str();

    TrackOptions trk;
    std::uint64_t trk_seed = 0;
    auto *cmd_trk = app.add_subcommand("track", "Track user and scatterers from simulated observations");
    cmd_trk->add_option("--obs", trk.obs, "Directory written by 'simulate'")->required();
    cmd_trk->add_option("--config", trk.config, "Run configuration (default: <obs>/run_config.ini)");
    auto *trk_seed_opt = cmd_trk->add_option("--seed", trk_seed, "Override the tracker seed");
    cmd_trk->add_option("--out", trk.out, "Output directory")->capture_default_str();

    StatsOptions st;
    auto *cmd_st = app.add_subcommand("stats", "Spread time series and CDFs from a path or tap table");
    cmd_st->add_option("--input", st.input, "comm_observations, paths or comm_taps CSV")->required();
    cmd_st->add_option("--out", st.out, "Output directory")->capture_default_str();
    cmd_st->add_option("--label", st.label, "Run label used in output file names")->capture_default_str();

    CompareOptions cmp;
    auto *cmd_cmp = app.add_subcommand("compare", "KS distance between two runs' spread CDFs");
    cmd_cmp->add_option("--a", cmp.a, "Spreads table of run A")->required();
    cmd_cmp->add_option("--b", cmp.b, "Spreads table of run B")->required();
    cmd_cmp->add_option("--out", cmp.out, "Output directory")->capture_default_str();
    cmd_cmp->add_option("--label", cmp.label, "Label used in the output file name")->capture_default_str();

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError &e)
    {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitUsage;
    }

    if (*cmd_sim)
    {
        if (*sim_seed_opt)
            sim.seed = sim_seed;
        return simulate(sim, std::cerr);
    }
    if (*cmd_trk)
    {
        if (*trk_seed_opt)
            trk.seed = trk_seed;
        return track(trk, std::cerr);
    }
    if (*cmd_st)
        return stats(st, std::cerr);
    return compare(cmp, std::cerr);
}
