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

#ifndef ISAC_TOOLS_COMMANDS_HPP
#define ISAC_TOOLS_COMMANDS_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

namespace isac::cli
{

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;  // bad configuration or arguments
inline constexpr int kExitInput = 3;  // missing or malformed input files
inline constexpr int kExitFailed = 4; // runtime failure

struct SimulateOptions
{
    std::string config; // empty: built-in defaults
    std::optional<std::uint64_t> seed;
    std::string out = ".";
};

struct TrackOptions
{
    std::string obs;    // directory written by simulate
    std::string config; // empty: <obs>/run_config.ini
    std::optional<std::uint64_t> seed;
    std::string out = ".";
};

struct StatsOptions
{
    std::string input; // path table (comm_observations / paths) or comm_taps table
    std::string out = ".";
    std::string label = "run";
};

struct CompareOptions
{
    std::string a; // spreads tables
    std::string b;
    std::string out = ".";
    std::string label = "compare";
};

// Each command writes its outputs under `out` and diagnostics to `log`.
int simulate(const SimulateOptions &opt, std::ostream &log);
int track(const TrackOptions &opt, std::ostream &log);
int stats(const StatsOptions &opt, std::ostream &log);
int compare(const CompareOptions &opt, std::ostream &log);

} // namespace isac::cli

#endif
