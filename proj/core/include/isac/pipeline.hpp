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

#ifndef ISAC_PIPELINE_HPP
#define ISAC_PIPELINE_HPP

#include "isac/config.hpp"
#include "isac/io.hpp"

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace isac::pipeline
{

SceneTruth build_scene(const RunConfig &cfg);

// Time of frame k.
inline double frame_time(const RunConfig &cfg, int k) { return k * cfg.tracker.ts; }

// Noisy frames k = 0..N, skipping withheld ones. Frame k draws from its own stream, so a
// frame does not depend on which others were produced.
std::vector<ObservationFrame> simulate_observations(const SceneTruth &scene, const RunConfig &cfg);

struct TapTables
{
    std::vector<io::SensingTapRecord> sensing;
    std::vector<io::CommTapRecord> comm;
};

// Sensing and communication taps at every frame time.
TapTables synthesize_taps(const SceneTruth &scene, const RunConfig &cfg);

struct CoastInterval
{
    int first = 0; // frame indices, inclusive
    int last = 0;
};

struct EntityError
{
    std::string entity_id;
    io::EntityKind kind = io::EntityKind::User;
    double error = 0.0; // m, final position error
};

struct TrackingSummary
{
    int steps = 0;
    double final_time = 0.0;
    std::vector<CoastInterval> coast_intervals; // frames that never arrived
    int divergence_events = 0;
    int init_failures = 0;
    int tracks_dropped = 0;

    double user_final_error = 0.0;
    double fb_final_rmse = 0.0; // over tracks alive at the final step
    double lb_final_rmse = 0.0;
    std::size_t final_tracks = 0;

    double user_run_rmse = 0.0; // over every step
    double fb_run_rmse = 0.0;   // over every (step, track)
    double lb_run_rmse = 0.0;

    std::vector<EntityError> final_errors;
};

struct TrackingResult
{
    TrackingSummary summary;
    std::vector<io::TrajectoryRecord> trajectory;
    std::vector<io::PathRecord> model_paths;  // reconstructed from estimates, observed frames only
    std::vector<io::PathRecord> oracle_paths; // noise-free truth at the same frames
};

// Runs the tracker over `frames` (sorted by index, frame 0 required). Gaps coast.
// Throws std::invalid_argument when frame times disagree with the configured Ts.
TrackingResult run_tracking(const SceneTruth &scene, std::span<const ObservationFrame> frames, const RunConfig &cfg);

void write_summary(std::ostream &os, const TrackingSummary &s);

// ---------- spreads ----------

// Spreads per frame over NLoS rows; frames without NLoS paths are skipped.
std::vector<io::SpreadRecord> spreads_from_paths(std::span<const io::PathRecord> rows);

// Delay spread per snapshot from the (0, 0) pair's NLoS taps weighted by |a|^2;
// angular columns are NaN.
std::vector<io::SpreadRecord> spreads_from_taps(std::span<const io::CommTapRecord> rows);

struct Series
{
    std::string quantity;
    std::vector<double> values;
};

// One series per spread quantity that is finite in every row.
std::vector<Series> spread_series(std::span<const io::SpreadRecord> rows);

// KS distance per quantity. Throws std::invalid_argument if the quantity sets differ.
std::vector<io::KsRecord> compare_spreads(std::span<const io::SpreadRecord> a, std::span<const io::SpreadRecord> b);

} // namespace isac::pipeline

#endif
