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

#ifndef ISAC_SCENE_HPP
#define ISAC_SCENE_HPP

#include "isac/geometry.hpp"
#include "isac/random.hpp"

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <vector>

namespace isac
{

// Identifies a multipath component by its first- and last-bounce scatterer ids.
// Single-bounce paths have first == last. The LoS component uses kLosId.
struct PathId
{
    int first = -1;
    int last = -1;

    bool single_bounce() const { return first == last; }
    friend auto operator<=>(const PathId &, const PathId &) = default;
};

inline constexpr PathId kLosId{-1, -1};

enum class ScattererRole
{
    FirstBounce,
    LastBounce
};

enum class ClusterKind
{
    SingleBounce, // every member is both first and last bounce of its own path
    DoubleBounce  // paths pair every first-bounce member with every last-bounce member
};

struct Box
{
    Vec3 min;
    Vec3 max;
};

struct ScattererTruth
{
    int id = 0;
    int cluster_id = 0;
    ScattererRole role = ScattererRole::FirstBounce;
    Vec3 position; // at birth_time
    Vec3 velocity;
    double rcs = 1.0; // m^2
    double birth_time = 0.0;
    double death_time = std::numeric_limits<double>::infinity();

    bool alive_at(double t) const { return birth_time <= t && t < death_time; }
    Vec3 position_at(double t) const { return position + velocity * (t - birth_time); }
};

struct SceneConfig
{
    int num_clusters = 4;
    int first_bounce_per_cluster = 3;
    int last_bounce_per_cluster = 2;
    int double_bounce_clusters = 2; // the first k clusters are double-bounce

    Box first_bounce_region{{-70.0, -30.0, 0.0}, {-15.0, 40.0, 25.0}};
    Box last_bounce_region{{-120.0, 15.0, 0.0}, {-65.0, 45.0, 20.0}};

    double speed_min = 0.0; // m/s
    double speed_max = 1.5;
    double birth_death_rate = 0.25; // events/s
    double rcs_min = 0.5;           // m^2
    double rcs_max = 10.0;

    double sigma_delay = 5e-9;               // s
    double sigma_angle = deg_to_rad(1.0);    // rad
    double sigma_doppler = 1.0;              // Hz

    double duration = 20.0; // s
    Vec3 bs_position{0.0, 0.0, 10.0};
    Vec3 user_start{-104.0, 7.32, 1.2};
    Vec3 user_velocity = Vec3{164.0, 20.0, 0.0} / std::hypot(164.0, 20.0);

    double tau_decay = 100e-9;       // exponential power-delay profile constant
    double virtual_delay_max = 0.0;  // virtual delays drawn uniformly in [0, max]
    bool include_bounce_leg = false; // add |fb - lb| to double-bounce path lengths

    std::uint64_t seed = 1;

    // Throws std::invalid_argument describing the first violated constraint.
    void validate() const;
};

struct SceneTruth
{
    double duration = 0.0;
    Vec3 bs_position;
    Vec3 user_start;
    Vec3 user_velocity;
    double tau_decay = 100e-9;
    double virtual_delay_max = 0.0;
    bool include_bounce_leg = false;
    std::uint64_t seed = 0;

    std::vector<ClusterKind> clusters;
    std::vector<ScattererTruth> scatterers; // scatterers[i].id == i

    Vec3 user_position(double t) const { return user_start + user_velocity * t; }
    const ScattererTruth &scatterer(int id) const;
    // Virtual delay of a path; constant over the path's life.
    double virtual_delay(PathId id) const;
    // Number of clusters with at least one alive member at t.
    int active_clusters(double t) const;
};

struct PathTruth
{
    PathId id;
    int cluster_id = 0;
    double virtual_delay = 0.0; // s
    double power = 0.0;         // normalized over all NLoS paths at the same instant
    double delay = 0.0;         // s, reference antennas
    Vec3 first_bounce;
    Vec3 last_bounce;
};

struct PathObservation
{
    PathId id;
    int cluster_id = -1;
    double delay = 0.0; // s
    AngleSet aod;
    AngleSet aoa;
    double power = 0.0;
};

struct SensingDetection
{
    int scatterer_id = 0;
    double round_trip_delay = 0.0; // s
    AngleSet angle;                // at the ISAC BS
    double doppler = 0.0;          // Hz, approaching positive
    double gain = 0.0;
};

struct ObservationFrame
{
    int index = 0;
    double time = 0.0;
    std::optional<PathObservation> los;
    std::vector<PathObservation> comm_paths;
    std::vector<SensingDetection> sensing;

    const PathObservation *find_path(PathId id) const;
    const SensingDetection *find_detection(int scatterer_id) const;
};

struct ObservationNoise
{
    double sigma_delay = 0.0;
    double sigma_angle = 0.0;
    double sigma_doppler = 0.0;
    double carrier_hz = 28e9;
};

SceneTruth generate_scene(const SceneConfig &cfg);

// Paths alive at t, ordered by (cluster, first, last). Throws std::out_of_range when t
// lies outside [0, duration].
std::vector<PathTruth> ground_truth_paths(const SceneTruth &scene, double t);

// Exponential power-delay profile normalized to unit sum.
std::vector<double> path_powers(std::span<const double> delays, double tau_decay);

// Noise-free LoS observation at the reference antennas.
PathObservation los_observation(const SceneTruth &scene, double t);

// Noisy observation frame. Throws std::invalid_argument for negative noise levels.
ObservationFrame observe(const SceneTruth &scene, double t, const ObservationNoise &noise, Rng &rng);

// Line-oriented text format, see docs/file_formats.md.
void save_scene(std::ostream &os, const SceneTruth &scene);
SceneTruth load_scene(std::istream &is);

} // namespace isac

#endif
