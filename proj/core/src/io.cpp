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

#include "isac/io.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <map>
#include <ostream>

namespace isac::io
{

std::string format_double(double v)
{
    std::array<char, 32> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), res.ptr);
}

namespace
{

template <class T> T parse_whole(std::string_view s, const char *what)
{
    s = trim(s);
    T v{};
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw std::invalid_argument(std::string("not a valid ") + what + ": '" + std::string(s) + "'");
    return v;
}

} // namespace

double parse_double(std::string_view s) { return parse_whole<double>(s, "number"); }
std::int64_t parse_int(std::string_view s) { return parse_whole<std::int64_t>(s, "integer"); }
std::uint64_t parse_uint(std::string_view s) { return parse_whole<std::uint64_t>(s, "unsigned integer"); }

std::string_view trim(std::string_view s)
{
    constexpr std::string_view ws = " \t\r\n";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos)
        return {};
    const auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep)
{
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true)
    {
        const auto pos = s.find(sep, start);
        if (pos == std::string_view::npos)
        {
            out.push_back(s.substr(start));
            return out;
        }
        out.push_back(s.substr(start, pos - start));
        start = pos + 1;
    }
}

std::string format_path_id(PathId id)
{
    if (id == kLosId)
        return "-";
    return std::to_string(id.first) + ":" + std::to_string(id.last);
}

PathId parse_path_id(std::string_view s)
{
    s = trim(s);
    if (s == "-")
        return kLosId;
    const auto parts = split(s, ':');
    if (parts.size() != 2)
        throw std::invalid_argument("path id must be 'fb:lb' or '-': '" + std::string(s) + "'");
    return {static_cast<int>(parse_int(parts[0])), static_cast<int>(parse_int(parts[1]))};
}

// ---------- tables ----------

void write_table_header(std::ostream &os, std::string_view schema, std::span<const std::string_view> columns)
{
    os << "# isacsim:" << schema << ' ' << kTableVersion << '\n';
    for (std::size_t i = 0; i < columns.size(); ++i)
        os << (i ? "," : "") << columns[i];
    os << '\n';
}

Table read_table(std::istream &is)
{
    Table t;
    std::string line;
    int line_no = 0;

    if (!std::getline(is, line))
        throw FormatError("line 1: empty file, expected '# isacsim:<schema> v1'");
    ++line_no;
    {
        const auto head = trim(line);
        constexpr std::string_view prefix = "# isacsim:";
        const auto space = head.rfind(' ');
        if (!head.starts_with(prefix) || space == std::string_view::npos || space < prefix.size() ||
            head.substr(space + 1) != kTableVersion)
            throw FormatError("line 1: expected '# isacsim:<schema> v1'");
        t.schema = std::string(head.substr(prefix.size(), space - prefix.size()));
    }

    if (!std::getline(is, line))
        throw FormatError("line 2: missing column header");
    ++line_no;
    for (auto c : split(trim(line), ','))
        t.columns.emplace_back(trim(c));

    while (std::getline(is, line))
    {
        ++line_no;
        const auto body = trim(line);
        if (body.empty())
            continue;
        auto fields = split(body, ',');
        if (fields.size() != t.columns.size())
            throw FormatError("line " + std::to_string(line_no) + ": expected " + std::to_string(t.columns.size()) +
                              " fields, found " + std::to_string(fields.size()));
        std::vector<std::string> row;
        row.reserve(fields.size());
        for (auto f : fields)
            row.emplace_back(trim(f));
        t.rows.push_back(std::move(row));
        t.line_numbers.push_back(line_no);
    }
    return t;
}

namespace
{

void check_layout(const Table &t, std::string_view schema, std::span<const std::string_view> columns)
{
    if (t.schema != schema)
        throw FormatError("line 1: expected schema '" + std::string(schema) + "', found '" + t.schema + "'");
    const bool same = t.columns.size() == columns.size() &&
                      std::equal(columns.begin(), columns.end(), t.columns.begin(),
                                 [](std::string_view a, const std::string &b) { return a == b; });
    if (!same)
        throw FormatError("line 2: unexpected columns for schema '" + std::string(schema) + "'");
}

// Converts each row, re-raising field errors with the row's line number.
template <class Record, class Convert> std::vector<Record> convert_rows(const Table &t, Convert &&convert)
{
    std::vector<Record> out;
    out.reserve(t.rows.size());
    for (std::size_t i = 0; i < t.rows.size(); ++i)
    {
        try
        {
            out.push_back(convert(t.rows[i]));
        }
        catch (const std::invalid_argument &e)
        {
            throw FormatError("line " + std::to_string(t.line_numbers[i]) + ": " + e.what());
        }
    }
    return out;
}

std::string_view kind_token(bool los) { return los ? "los" : "nlos"; }

bool parse_kind(std::string_view s)
{
    if (s == "los")
        return true;
    if (s == "nlos")
        return false;
    throw std::invalid_argument("kind must be 'los' or 'nlos': '" + std::string(s) + "'");
}

constexpr std::array<std::string_view, 12> kPathColumns = {
    "k", "t", "kind", "fb_id", "lb_id", "cluster_id", "delay_s", "aod_az", "aod_el", "aoa_az", "aoa_el", "power"};

constexpr std::array<std::string_view, 8> kDetectionColumns = {"k",  "t",  "scatterer_id", "delay_s",
                                                               "az", "el", "doppler_hz",   "gain"};

constexpr std::array<std::string_view, 5> kSensingTapColumns = {"t", "scatterer_id", "delay_s", "doppler_hz", "gain"};

constexpr std::array<std::string_view, 8> kCommTapColumns = {"t", "q", "p", "kind", "path_id", "delay_s", "re", "im"};

constexpr std::array<std::string_view, 16> kTrajectoryColumns = {
    "k",      "t",      "entity_id", "kind",   "est_x",  "est_y",   "est_z",   "est_vx",
    "est_vy", "est_vz", "true_x",    "true_y", "true_z", "true_vx", "true_vy", "true_vz"};

constexpr std::array<std::string_view, 6> kSpreadColumns = {"t",             "delay_spread",  "aod_az_spread",
                                                            "aod_el_spread", "aoa_az_spread", "aoa_el_spread"};

constexpr std::array<std::string_view, 2> kCdfColumns = {"value", "fraction"};

constexpr std::array<std::string_view, 4> kKsColumns = {"quantity", "ks", "n_a", "n_b"};

std::string_view kind_token(EntityKind k)
{
    switch (k)
    {
    case EntityKind::User:
        return "user";
    case EntityKind::FirstBounce:
        return "FB";
    case EntityKind::LastBounce:
        return "LB";
    }
    return "user";
}

EntityKind parse_entity_kind(std::string_view s)
{
    if (s == "user")
        return EntityKind::User;
    if (s == "FB")
        return EntityKind::FirstBounce;
    if (s == "LB")
        return EntityKind::LastBounce;
    throw std::invalid_argument("entity kind must be user, FB or LB: '" + std::string(s) + "'");
}

int parse_k(std::string_view s) { return static_cast<int>(parse_int(s)); }

} // namespace

Table read_table(std::istream &is, std::string_view schema, std::span<const std::string_view> columns)
{
    Table t = read_table(is);
    check_layout(t, schema, columns);
    return t;
}

// ---------- paths ----------

void write_paths(std::ostream &os, std::string_view schema, std::span<const PathRecord> rows)
{
    write_table_header(os, schema, kPathColumns);
    for (const auto &r : rows)
    {
        const auto &p = r.path;
        const bool los = p.id == kLosId;
        os << r.k << ',' << format_double(r.t) << ',' << kind_token(los) << ',' << p.id.first << ',' << p.id.last
           << ',' << p.cluster_id << ',' << format_double(p.delay) << ',' << format_double(p.aod.azimuth()) << ','
           << format_double(p.aod.elevation()) << ',' << format_double(p.aoa.azimuth()) << ','
           << format_double(p.aoa.elevation()) << ',' << format_double(p.power) << '\n';
    }
}

std::vector<PathRecord> paths_from_table(const Table &t)
{
    if (t.schema != schema::kCommObservations && t.schema != schema::kPaths)
        throw FormatError("line 1: '" + t.schema + "' is not a path table");
    check_layout(t, t.schema, kPathColumns);
    return convert_rows<PathRecord>(t,
                                    [](const std::vector<std::string> &f)
                                    {
                                        PathRecord r;
                                        r.k = parse_k(f[0]);
                                        r.t = parse_double(f[1]);
                                        const bool los = parse_kind(f[2]);
                                        r.path.id = {static_cast<int>(parse_int(f[3])),
                                                     static_cast<int>(parse_int(f[4]))};
                                        if (los != (r.path.id == kLosId))
                                            throw std::invalid_argument("LoS rows carry ids -1,-1 and only they do");
                                        r.path.cluster_id = static_cast<int>(parse_int(f[5]));
                                        r.path.delay = parse_double(f[6]);
                                        r.path.aod = AngleSet(parse_double(f[7]), parse_double(f[8]));
                                        r.path.aoa = AngleSet(parse_double(f[9]), parse_double(f[10]));
                                        r.path.power = parse_double(f[11]);
                                        return r;
                                    });
}

std::vector<PathRecord> read_paths(std::istream &is, std::string_view schema)
{
    return paths_from_table(read_table(is, schema, kPathColumns));
}

// ---------- sensing observations ----------

void write_detections(std::ostream &os, std::span<const DetectionRecord> rows)
{
    write_table_header(os, schema::kSensingObservations, kDetectionColumns);
    for (const auto &r : rows)
    {
        const auto &d = r.detection;
        os << r.k << ',' << format_double(r.t) << ',' << d.scatterer_id << ',' << format_double(d.round_trip_delay)
           << ',' << format_double(d.angle.azimuth()) << ',' << format_double(d.angle.elevation()) << ','
           << format_double(d.doppler) << ',' << format_double(d.gain) << '\n';
    }
}

std::vector<DetectionRecord> read_detections(std::istream &is)
{
    const Table t = read_table(is, schema::kSensingObservations, kDetectionColumns);
    return convert_rows<DetectionRecord>(t,
                                         [](const std::vector<std::string> &f)
                                         {
                                             DetectionRecord r;
                                             r.k = parse_k(f[0]);
                                             r.t = parse_double(f[1]);
                                             r.detection.scatterer_id = static_cast<int>(parse_int(f[2]));
                                             r.detection.round_trip_delay = parse_double(f[3]);
                                             r.detection.angle = AngleSet(parse_double(f[4]), parse_double(f[5]));
                                             r.detection.doppler = parse_double(f[6]);
                                             r.detection.gain = parse_double(f[7]);
                                             return r;
                                         });
}

// ---------- taps ----------

void write_sensing_taps(std::ostream &os, std::span<const SensingTapRecord> rows)
{
    write_table_header(os, schema::kSensingTaps, kSensingTapColumns);
    for (const auto &r : rows)
        os << format_double(r.t) << ',' << r.scatterer_id << ',' << format_double(r.delay) << ','
           << format_double(r.doppler) << ',' << format_double(r.gain) << '\n';
}

std::vector<SensingTapRecord> read_sensing_taps(std::istream &is)
{
    const Table t = read_table(is, schema::kSensingTaps, kSensingTapColumns);
    return convert_rows<SensingTapRecord>(t,
                                          [](const std::vector<std::string> &f)
                                          {
                                              return SensingTapRecord{parse_double(f[0]),
                                                                      static_cast<int>(parse_int(f[1])),
                                                                      parse_double(f[2]), parse_double(f[3]),
                                                                      parse_double(f[4])};
                                          });
}

void write_comm_taps(std::ostream &os, std::span<const CommTapRecord> rows)
{
    write_table_header(os, schema::kCommTaps, kCommTapColumns);
    for (const auto &r : rows)
        os << format_double(r.t) << ',' << r.q << ',' << r.p << ',' << kind_token(r.los) << ','
           << format_path_id(r.los ? kLosId : r.path) << ',' << format_double(r.delay) << ','
           << format_double(r.amplitude.real()) << ',' << format_double(r.amplitude.imag()) << '\n';
}

std::vector<CommTapRecord> comm_taps_from_table(const Table &t)
{
    check_layout(t, schema::kCommTaps, kCommTapColumns);
    return convert_rows<CommTapRecord>(t,
                                       [](const std::vector<std::string> &f)
                                       {
                                           CommTapRecord r;
                                           r.t = parse_double(f[0]);
                                           r.q = static_cast<std::size_t>(parse_uint(f[1]));
                                           r.p = static_cast<std::size_t>(parse_uint(f[2]));
                                           r.los = parse_kind(f[3]);
                                           r.path = parse_path_id(f[4]);
                                           if (r.los != (r.path == kLosId))
                                               throw std::invalid_argument("LoS taps carry path id '-' and only they do");
                                           r.delay = parse_double(f[5]);
                                           r.amplitude = {parse_double(f[6]), parse_double(f[7])};
                                           return r;
                                       });
}

std::vector<CommTapRecord> read_comm_taps(std::istream &is) { return comm_taps_from_table(read_table(is)); }

// ---------- trajectory ----------

void write_trajectory(std::ostream &os, std::span<const TrajectoryRecord> rows)
{
    write_table_header(os, schema::kTrajectory, kTrajectoryColumns);
    constexpr double nan = std::numeric_limits<double>::quiet_NaN();
    const tracking::EntityState missing{{nan, nan, nan}, {nan, nan, nan}};
    auto state = [&](const tracking::EntityState &s)
    {
        return format_double(s.position.x) + ',' + format_double(s.position.y) + ',' + format_double(s.position.z) +
               ',' + format_double(s.velocity.x) + ',' + format_double(s.velocity.y) + ',' +
               format_double(s.velocity.z);
    };
    for (const auto &r : rows)
        os << r.k << ',' << format_double(r.t) << ',' << r.entity_id << ',' << kind_token(r.kind) << ','
           << state(r.estimate) << ',' << state(r.truth.value_or(missing)) << '\n';
}

std::vector<TrajectoryRecord> read_trajectory(std::istream &is)
{
    const Table t = read_table(is, schema::kTrajectory, kTrajectoryColumns);
    return convert_rows<TrajectoryRecord>(t,
                                          [](const std::vector<std::string> &f)
                                          {
                                              auto state = [&](std::size_t i)
                                              {
                                                  return tracking::EntityState{
                                                      {parse_double(f[i]), parse_double(f[i + 1]),
                                                       parse_double(f[i + 2])},
                                                      {parse_double(f[i + 3]), parse_double(f[i + 4]),
                                                       parse_double(f[i + 5])}};
                                              };
                                              TrajectoryRecord r;
                                              r.k = parse_k(f[0]);
                                              r.t = parse_double(f[1]);
                                              r.entity_id = f[2];
                                              r.kind = parse_entity_kind(f[3]);
                                              r.estimate = state(4);
                                              const auto truth = state(10);
                                              if (!std::isnan(truth.position.x))
                                                  r.truth = truth;
                                              return r;
                                          });
}

// ---------- statistics ----------

void write_spreads(std::ostream &os, std::span<const SpreadRecord> rows)
{
    write_table_header(os, schema::kSpreads, kSpreadColumns);
    for (const auto &r : rows)
    {
        const auto &s = r.spreads;
        os << format_double(r.t) << ',' << format_double(s.delay) << ',' << format_double(s.aod_azimuth) << ','
           << format_double(s.aod_elevation) << ',' << format_double(s.aoa_azimuth) << ','
           << format_double(s.aoa_elevation) << '\n';
    }
}

std::vector<SpreadRecord> read_spreads(std::istream &is)
{
    const Table t = read_table(is, schema::kSpreads, kSpreadColumns);
    return convert_rows<SpreadRecord>(t,
                                      [](const std::vector<std::string> &f)
                                      {
                                          SpreadRecord r;
                                          r.t = parse_double(f[0]);
                                          r.spreads = {parse_double(f[1]), parse_double(f[2]), parse_double(f[3]),
                                                       parse_double(f[4]), parse_double(f[5])};
                                          return r;
                                      });
}

void write_cdf(std::ostream &os, const stats::EmpiricalCdf &cdf)
{
    write_table_header(os, schema::kCdf, kCdfColumns);
    const auto fractions = cdf.fractions();
    for (std::size_t i = 0; i < cdf.size(); ++i)
        os << format_double(cdf.values()[i]) << ',' << format_double(fractions[i]) << '\n';
}

std::vector<CdfRecord> read_cdf(std::istream &is)
{
    const Table t = read_table(is, schema::kCdf, kCdfColumns);
    return convert_rows<CdfRecord>(t, [](const std::vector<std::string> &f)
                                   { return CdfRecord{parse_double(f[0]), parse_double(f[1])}; });
}

void write_ks(std::ostream &os, std::span<const KsRecord> rows)
{
    write_table_header(os, schema::kKs, kKsColumns);
    for (const auto &r : rows)
        os << r.quantity << ',' << format_double(r.ks) << ',' << r.n_a << ',' << r.n_b << '\n';
}

std::vector<KsRecord> read_ks(std::istream &is)
{
    const Table t = read_table(is, schema::kKs, kKsColumns);
    return convert_rows<KsRecord>(t,
                                  [](const std::vector<std::string> &f)
                                  {
                                      return KsRecord{f[0], parse_double(f[1]),
                                                      static_cast<std::size_t>(parse_uint(f[2])),
                                                      static_cast<std::size_t>(parse_uint(f[3]))};
                                  });
}

// ---------- frames ----------

void flatten(std::span<const ObservationFrame> frames, std::vector<PathRecord> &paths,
             std::vector<DetectionRecord> &detections)
{
    for (const auto &f : frames)
    {
        if (f.los)
            paths.push_back({f.index, f.time, *f.los});
        for (const auto &p : f.comm_paths)
            paths.push_back({f.index, f.time, p});
        for (const auto &d : f.sensing)
            detections.push_back({f.index, f.time, d});
    }
}

std::vector<ObservationFrame> assemble(std::span<const PathRecord> paths, std::span<const DetectionRecord> detections)
{
    std::map<int, ObservationFrame> frames;
    auto frame_at = [&](int k, double t) -> ObservationFrame &
    {
        auto [it, inserted] = frames.try_emplace(k);
        if (inserted)
        {
            it->second.index = k;
            it->second.time = t;
        }
        else if (it->second.time != t)
            throw FormatError("frame " + std::to_string(k) + " has inconsistent times");
        return it->second;
    };
    for (const auto &r : paths)
    {
        auto &f = frame_at(r.k, r.t);
        if (r.path.id == kLosId)
            f.los = r.path;
        else
            f.comm_paths.push_back(r.path);
    }
    for (const auto &r : detections)
        frame_at(r.k, r.t).sensing.push_back(r.detection);

    std::vector<ObservationFrame> out;
    out.reserve(frames.size());
    for (auto &[k, f] : frames)
        out.push_back(std::move(f));
    return out;
}

} // namespace isac::io
