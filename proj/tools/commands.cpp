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

#include "isac/config.hpp"
#include "isac/io.hpp"
#include "isac/pipeline.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <utility>
#include <vector>

namespace isac::cli
{

namespace fs = std::filesystem;

namespace
{

// Failure carrying the exit code to report.
struct CommandError
{
    int code;
    std::string message;
};

std::string read_file(const fs::path &path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw CommandError{kExitInput, "cannot read " + path.string()};
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

using Outputs = std::vector<std::pair<std::string, std::string>>;

// Writes every file only after all of them were produced, so a failure leaves nothing behind.
void commit(const fs::path &dir, const Outputs &files)
{
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec)
        throw CommandError{kExitFailed, "cannot create " + dir.string() + ": " + ec.message()};
    for (const auto &[name, body] : files)
    {
        std::ofstream out(dir / name, std::ios::binary);
        out << body;
        if (!out)
            throw CommandError{kExitFailed, "cannot write " + (dir / name).string()};
    }
}

template <class Fn> std::string render(Fn &&fn)
{
    std::ostringstream os;
    fn(os);
    return os.str();
}

RunConfig load(const std::string &path, const std::optional<std::uint64_t> &seed)
{
    RunConfig cfg;
    if (!path.empty())
        cfg = load_config(path);
    if (seed)
        cfg.seed = *seed;
    cfg.validate();
    return cfg;
}

template <class Fn> int guarded(std::ostream &log, Fn &&fn)
{
    try
    {
        fn();
        return kExitOk;
    }
    catch (const CommandError &e)
    {
        log << "error: " << e.message << '\n';
        return e.code;
    }
    catch (const ConfigError &e)
    {
        log << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    catch (const io::FormatError &e)
    {
        log << "error: " << e.what() << '\n';
        return kExitInput;
    }
    catch (const std::exception &e)
    {
        log << "error: " << e.what() << '\n';
        return kExitFailed;
    }
}

// Re-raises a malformed-file error with the file name in front.
template <class Fn> auto parse_file(const fs::path &path, Fn &&fn)
{
    const std::string body = read_file(path);
    std::istringstream is(body);
    try
    {
        return fn(is);
    }
    catch (const std::exception &e)
    {
        throw CommandError{kExitInput, path.string() + ": " + e.what()};
    }
}

} // namespace

int simulate(const SimulateOptions &opt, std::ostream &log)
{
    return guarded(log,
                   [&]
                   {
                       const RunConfig cfg = load(opt.config, opt.seed);
                       const SceneTruth scene = pipeline::build_scene(cfg);
                       const auto frames = pipeline::simulate_observations(scene, cfg);
                       const auto taps = pipeline::synthesize_taps(scene, cfg);

                       std::vector<io::PathRecord> paths;
                       std::vector<io::DetectionRecord> detections;
                       io::flatten(frames, paths, detections);

                       Outputs files;
                       files.emplace_back("run_config.ini", render([&](std::ostream &os) { write_config(os, cfg); }));
                       files.emplace_back("scene.txt", render([&](std::ostream &os) { save_scene(os, scene); }));
                       files.emplace_back("sensing_taps.csv",
                                          render([&](std::ostream &os) { io::write_sensing_taps(os, taps.sensing); }));
                       files.emplace_back("comm_taps.csv",
                                          render([&](std::ostream &os) { io::write_comm_taps(os, taps.comm); }));
                       files.emplace_back("comm_observations.csv",
                                          render([&](std::ostream &os)
                                                 { io::write_paths(os, io::schema::kCommObservations, paths); }));
                       files.emplace_back("sensing_observations.csv",
                                          render([&](std::ostream &os) { io::write_detections(os, detections); }));
                       commit(opt.out, files);
                       log << "simulate: " << frames.size() << " frames, " << scene.scatterers.size()
                           << " scatterers -> " << opt.out << '\n';
                   });
}

int track(const TrackOptions &opt, std::ostream &log)
{
    return guarded(log,
                   [&]
                   {
                       if (opt.obs.empty())
                           throw CommandError{kExitUsage, "track needs --obs <simulate output directory>"};
                       const fs::path obs(opt.obs);
                       const std::string config =
                           opt.config.empty() ? (obs / "run_config.ini").string() : opt.config;
                       if (!fs::exists(config))
                           throw CommandError{kExitInput, "missing config " + config};
                       const RunConfig cfg = load(config, opt.seed);

                       const SceneTruth scene =
                           parse_file(obs / "scene.txt", [](std::istream &is) { return load_scene(is); });
                       const auto paths = parse_file(obs / "comm_observations.csv", [](std::istream &is)
                                                     { return io::read_paths(is, io::schema::kCommObservations); });
                       const auto detections = parse_file(obs / "sensing_observations.csv",
                                                          [](std::istream &is) { return io::read_detections(is); });
                       const auto frames = io::assemble(paths, detections);

                       pipeline::TrackingResult result;
                       try
                       {
                           result = pipeline::run_tracking(scene, frames, cfg);
                       }
                       catch (const std::invalid_argument &e)
                       {
                           throw CommandError{kExitInput, e.what()};
                       }

                       Outputs files;
                       files.emplace_back("trajectory.csv", render([&](std::ostream &os)
                                                                   { io::write_trajectory(os, result.trajectory); }));
                       files.emplace_back("tracking_summary.txt", render([&](std::ostream &os)
                                                                         { pipeline::write_summary(os, result.summary); }));
                       files.emplace_back("model_paths.csv",
                                          render([&](std::ostream &os)
                                                 { io::write_paths(os, io::schema::kPaths, result.model_paths); }));
                       files.emplace_back("oracle_paths.csv",
                                          render([&](std::ostream &os)
                                                 { io::write_paths(os, io::schema::kPaths, result.oracle_paths); }));
                       commit(opt.out, files);

                       const auto &s = result.summary;
                       log << "track: " << s.steps << " steps, final RMSE user " << io::format_double(s.user_final_error)
                           << " m, FB " << io::format_double(s.fb_final_rmse) << " m, LB "
                           << io::format_double(s.lb_final_rmse) << " m";
                       if (!s.coast_intervals.empty())
                           log << ", coasted over " << s.coast_intervals.size() << " interval(s)";
                       log << '\n';
                   });
}

int stats(const StatsOptions &opt, std::ostream &log)
{
    return guarded(log,
                   [&]
                   {
                       if (opt.input.empty())
                           throw CommandError{kExitUsage, "stats needs --input <path or tap table>"};
                       const auto table =
                           parse_file(opt.input, [](std::istream &is) { return io::read_table(is); });

                       std::vector<io::SpreadRecord> spreads;
                       try
                       {
                           if (table.schema == io::schema::kCommTaps)
                               spreads = pipeline::spreads_from_taps(io::comm_taps_from_table(table));
                           else
                               spreads = pipeline::spreads_from_paths(io::paths_from_table(table));
                       }
                       catch (const io::FormatError &e)
                       {
                           throw CommandError{kExitInput, opt.input + ": " + e.what()};
                       }
                       if (spreads.empty())
                           throw CommandError{kExitInput, opt.input + ": no snapshot with NLoS paths"};

                       Outputs files;
                       files.emplace_back("spreads_" + opt.label + ".csv",
                                          render([&](std::ostream &os) { io::write_spreads(os, spreads); }));
                       for (const auto &series : pipeline::spread_series(spreads))
                       {
                           const stats::EmpiricalCdf cdf(series.values);
                           files.emplace_back("cdf_" + opt.label + "_" + series.quantity + ".csv",
                                              render([&](std::ostream &os) { io::write_cdf(os, cdf); }));
                       }
                       commit(opt.out, files);
                       log << "stats: " << spreads.size() << " snapshots -> " << opt.out << '\n';
                   });
}

int compare(const CompareOptions &opt, std::ostream &log)
{
    return guarded(log,
                   [&]
                   {
                       if (opt.a.empty() || opt.b.empty())
                           throw CommandError{kExitUsage, "compare needs --a and --b spread tables"};
                       const auto a = parse_file(opt.a, [](std::istream &is) { return io::read_spreads(is); });
                       const auto b = parse_file(opt.b, [](std::istream &is) { return io::read_spreads(is); });

                       std::vector<io::KsRecord> ks;
                       try
                       {
                           ks = pipeline::compare_spreads(a, b);
                       }
                       catch (const std::invalid_argument &e)
                       {
                           throw CommandError{kExitInput, e.what()};
                       }
                       commit(opt.out, {{"ks_" + opt.label + ".csv",
                                         render([&](std::ostream &os) { io::write_ks(os, ks); })}});
                       for (const auto &r : ks)
                           log << r.quantity << " ks=" << io::format_double(r.ks) << '\n';
                   });
}

} // namespace isac::cli
