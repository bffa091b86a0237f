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

#ifndef ISAC_IO_HPP
#define ISAC_IO_HPP

#include "isac/scene.hpp"
#include "isac/stats.hpp"
#include "isac/tracker.hpp"

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace isac::io
{

// Malformed input file; the message carries the offending line number.
class FormatError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

// Shortest decimal string that parses back to the same double.
std::string format_double(double v);

// Whole-token parsers. Throw std::invalid_argument on trailing garbage or overflow.
double parse_double(std::string_view s);
std::int64_t parse_int(std::string_view s);
std::uint64_t parse_uint(std::string_view s);

std::string_view trim(std::string_view s);
std::vector<std::string_view> split(std::string_view s, char sep);

std::string format_path_id(PathId id); // "fb:lb", "-" for LoS
PathId parse_path_id(std::string_view s);

// ---------- versioned CSV tables ----------
//
// Line 1: "# isacsim:<schema> v1"; line 2: comma-separated column names; then one row per line.

inline constexpr std::string_view kTableVersion = "v1";

struct Table
{
    std::string schema;
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
    std::vector<int> line_numbers; // source line of each row
};

void write_table_header(std::ostream &os, std::string_view schema, std::span<const std::string_view> columns);

// Reads any table; throws FormatError on a malformed header or ragged rows.
Table read_table(std::istream &is);

// Reads a table and checks it against the expected schema and columns.
Table read_table(std::istream &is, std::string_view schema, std::span<const std::string_view> columns);

namespace schema
{
inline constexpr std::string_view kCommObservations = "comm_observations";
inline constexpr std::string_view kSensingObservations = "sensing_observations";
inline constexpr std::string_view kSensingTaps = "sensing_taps";
inline constexpr std::string_view kCommTaps = "comm_taps";
inline constexpr std::string_view kTrajectory = "trajectory";
inline constexpr std::string_view kPaths = "paths";
inline constexpr std::string_view kSpreads = "spreads";
inline constexpr std::string_view kCdf = "cdf";
inline constexpr std::string_view kKs = "ks";
} // namespace schema

// One communication path (LoS or NLoS) at frame k.
struct PathRecord
{
    int k = 0;
    double t = 0.0;
    PathObservation path; // path.id == kLosId marks the LoS row
};

struct DetectionRecord
{
    int k = 0;
    double t = 0.0;
    SensingDetection detection;
};

struct SensingTapRecord
{
    double t = 0.0;
    int scatterer_id = 0;
    double delay = 0.0;
    double doppler = 0.0;
    double gain = 0.0;
};

struct CommTapRecord
{
    double t = 0.0;
    std::size_t q = 0;
    std::size_t p = 0;
    bool los = false;
    PathId path = kLosId;
    double delay = 0.0;
    std::complex<double> amplitude;
};

enum class EntityKind
{
    User,
    FirstBounce,
    LastBounce
};

struct TrajectoryRecord
{
    int k = 0;
    double t = 0.0;
    std::string entity_id; // "user" or the path id
    EntityKind kind = EntityKind::User;
    tracking::EntityState estimate;
    std::optional<tracking::EntityState> truth;
};

// Unavailable quantities are NaN.
struct SpreadRecord
{
    double t = 0.0;
    stats::SpreadSet spreads;
};

struct CdfRecord
{
    double value = 0.0;
    double fraction = 0.0;
};

struct KsRecord
{
    std::string quantity;
    double ks = 0.0;
    std::size_t n_a = 0;
    std::size_t n_b = 0;
};

// Path tables share one column layout under the comm_observations or paths schema.
void write_paths(std::ostream &os, std::string_view schema, std::span<const PathRecord> rows);
std::vector<PathRecord> read_paths(std::istream &is, std::string_view schema);
std::vector<PathRecord> paths_from_table(const Table &t);

void write_detections(std::ostream &os, std::span<const DetectionRecord> rows);
std::vector<DetectionRecord> read_detections(std::istream &is);

void write_sensing_taps(std::ostream &os, std::span<const SensingTapRecord> rows);
std::vector<SensingTapRecord> read_sensing_taps(std::istream &is);

void write_comm_taps(std::ostream &os, std::span<const CommTapRecord> rows);
std::vector<CommTapRecord> read_comm_taps(std::istream &is);
std::vector<CommTapRecord> comm_taps_from_table(const Table &t);

void write_trajectory(std::ostream &os, std::span<const TrajectoryRecord> rows);
std::vector<TrajectoryRecord> read_trajectory(std::istream &is);

void write_spreads(std::ostream &os, std::span<const SpreadRecord> rows);
std::vector<SpreadRecord> read_spreads(std::istream &is);

void write_cdf(std::ostream &os, const stats::EmpiricalCdf &cdf);
std::vector<CdfRecord> read_cdf(std::istream &is);

void write_ks(std::ostream &os, std::span<const KsRecord> rows);
std::vector<KsRecord> read_ks(std::istream &is);

// Frame <-> row conversions. Frames come back sorted by k.
void flatten(std::span<const ObservationFrame> frames, std::vector<PathRecord> &paths,
             std::vector<DetectionRecord> &detections);
std::vector<ObservationFrame> assemble(std::span<const PathRecord> paths, std::span<const DetectionRecord> detections);

} // namespace isac::io

#endif
