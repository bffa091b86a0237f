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
#include "isac/io.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>

namespace isac
{

namespace
{

// Smallest noise levels handed to the tracker; noise-free observations would otherwise
// give a degenerate likelihood.
constexpr double kMinTrackerSigmaDelay = 1e-12;
constexpr double kMinTrackerSigmaAngle = 1e-9;

struct Field
{
    const char *section;
    const char *key;
    std::function<std::string(const RunConfig &)> get;
    std::function<void(RunConfig &, std::string_view)> set;
};

std::string fmt(double v) { return io::format_double(v); }

std::string fmt_vec(const Vec3 &v) { return fmt(v.x) + ' ' + fmt(v.y) + ' ' + fmt(v.z); }

Vec3 parse_vec(std::string_view s)
{
    std::vector<double> parts;
    for (auto tok : io::split(io::trim(s), ' '))
        if (!io::trim(tok).empty())
            parts.push_back(io::parse_double(tok));
    if (parts.size() != 3)
        throw std::invalid_argument("expected three numbers 'x y z'");
    return {parts[0], parts[1], parts[2]};
}

bool parse_bool(std::string_view s)
{
    s = io::trim(s);
    if (s == "true" || s == "1")
        return true;
    if (s == "false" || s == "0")
        return false;
    throw std::invalid_argument("expected true or false");
}

int parse_small_int(std::string_view s)
{
    const auto v = io::parse_int(s);
    if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max())
        throw std::invalid_argument("integer out of range");
    return static_cast<int>(v);
}

std::string fmt_ranges(const std::vector<FrameRange> &ranges)
{
    std::string out;
    for (const auto &r : ranges)
    {
        if (!out.empty())
            out += ' ';
        out += std::to_string(r.first) + '-' + std::to_string(r.last);
    }
    return out;
}

std::vector<FrameRange> parse_ranges(std::string_view s)
{
    std::vector<FrameRange> out;
    for (auto tok : io::split(io::trim(s), ' '))
    {
        tok = io::trim(tok);
        if (tok.empty())
            continue;
        const auto parts = io::split(tok, '-');
        if (parts.size() == 1)
        {
            const int k = parse_small_int(parts[0]);
            out.push_back({k, k});
        }
        else if (parts.size() == 2)
            out.push_back({parse_small_int(parts[0]), parse_small_int(parts[1])});
        else
            throw std::invalid_argument("frame ranges look like '50-60' or '75'");
    }
    return out;
}

#define ISAC_DOUBLE(sec, name, member)                                                                                 \
    Field                                                                                                              \
    {                                                                                                                  \
        sec, name, [](const RunConfig &c) { return fmt(c.member); },                                                   \
            [](RunConfig &c, std::string_view v) { c.member = io::parse_double(v); }                                  \
    }
#define ISAC_INT(sec, name, member)                                                                                    \
    Field                                                                                                              \
    {                                                                                                                  \
        sec, name, [](const RunConfig &c) { return std::to_string(c.member); },                                        \
            [](RunConfig &c, std::string_view v) { c.member = parse_small_int(v); }                                    \
    }
#define ISAC_SIZE(sec, name, member)                                                                                   \
    Field                                                                                                              \
    {                                                                                                                  \
        sec, name, [](const RunConfig &c) { return std::to_string(c.member); },                                        \
            [](RunConfig &c, std::string_view v) { c.member = static_cast<std::size_t>(io::parse_uint(v)); }           \
    }
#define ISAC_VEC(sec, name, member)                                                                                    \
    Field                                                                                                              \
    {                                                                                                                  \
        sec, name, [](const RunConfig &c) { return fmt_vec(c.member); },                                               \
            [](RunConfig &c, std::string_view v) { c.member = parse_vec(v); }                                          \
    }

const std::vector<Field> &fields()
{
    static const std::vector<Field> table = {
        {"run", "seed", [](const RunConfig &c) { return std::to_string(c.seed); },
         [](RunConfig &c, std::string_view v) { c.seed = io::parse_uint(v); }},
        ISAC_DOUBLE("run", "duration", scene.duration),
        ISAC_DOUBLE("run", "ts", tracker.ts),
        {"run", "withhold", [](const RunConfig &c) { return fmt_ranges(c.withheld); },
         [](RunConfig &c, std::string_view v) { c.withheld = parse_ranges(v); }},
        {"run", "comm_taps",
         [](const RunConfig &c) { return std::string(c.comm_taps == TapExport::AllPairs ? "all" : "reference"); },
         [](RunConfig &c, std::string_view v)
         {
             v = io::trim(v);
             if (v == "all")
                 c.comm_taps = TapExport::AllPairs;
             else if (v == "reference")
                 c.comm_taps = TapExport::ReferencePair;
             else
                 throw std::invalid_argument("expected 'reference' or 'all'");
         }},

        ISAC_INT("scene", "num_clusters", scene.num_clusters),
        ISAC_INT("scene", "double_bounce_clusters", scene.double_bounce_clusters),
        ISAC_INT("scene", "first_bounce_per_cluster", scene.first_bounce_per_cluster),
        ISAC_INT("scene", "last_bounce_per_cluster", scene.last_bounce_per_cluster),
        ISAC_VEC("scene", "first_bounce_region_min", scene.first_bounce_region.min),
        ISAC_VEC("scene", "first_bounce_region_max", scene.first_bounce_region.max),
        ISAC_VEC("scene", "last_bounce_region_min", scene.last_bounce_region.min),
        ISAC_VEC("scene", "last_bounce_region_max", scene.last_bounce_region.max),
        ISAC_DOUBLE("scene", "speed_min", scene.speed_min),
        ISAC_DOUBLE("scene", "speed_max", scene.speed_max),
        ISAC_DOUBLE("scene", "birth_death_rate", scene.birth_death_rate),
        ISAC_DOUBLE("scene", "rcs_min", scene.rcs_min),
        ISAC_DOUBLE("scene", "rcs_max", scene.rcs_max),
        ISAC_VEC("scene", "bs_position", scene.bs_position),
        ISAC_VEC("scene", "user_start", scene.user_start),
        ISAC_VEC("scene", "user_velocity", scene.user_velocity),
        ISAC_DOUBLE("scene", "tau_decay", scene.tau_decay),
        ISAC_DOUBLE("scene", "virtual_delay_max", scene.virtual_delay_max),
        {"scene", "include_bounce_leg",
         [](const RunConfig &c) { return std::string(c.scene.include_bounce_leg ? "true" : "false"); },
         [](RunConfig &c, std::string_view v) { c.scene.include_bounce_leg = parse_bool(v); }},

        ISAC_SIZE("arrays", "tx_rows", tx.rows),
        ISAC_SIZE("arrays", "tx_cols", tx.cols),
        ISAC_SIZE("arrays", "rx_rows", rx.rows),
        ISAC_SIZE("arrays", "rx_cols", rx.cols),
        ISAC_DOUBLE("arrays", "element_spacing", element_spacing),

        ISAC_DOUBLE("channel", "carrier_hz", carrier_hz),
        ISAC_DOUBLE("channel", "k_factor", k_factor),
        ISAC_DOUBLE("channel", "kappa_db", kappa_db),
        ISAC_DOUBLE("channel", "mu", mu),

        ISAC_DOUBLE("noise", "sigma_delay", sigma_delay),
        ISAC_DOUBLE("noise", "sigma_angle_deg", sigma_angle_deg),
        ISAC_DOUBLE("noise", "sigma_doppler", sigma_doppler),

        ISAC_SIZE("tracker", "particles", tracker.particles),
        ISAC_DOUBLE("tracker", "process_position_std", tracker.process.position_std),
        ISAC_DOUBLE("tracker", "process_velocity_std", tracker.process.velocity_std),
        ISAC_DOUBLE("tracker", "init_position_std", tracker.init_position_std),
        ISAC_DOUBLE("tracker", "init_velocity_std", tracker.init_velocity_std),
        ISAC_DOUBLE("tracker", "gate_sigmas", tracker.gate_sigmas),
        ISAC_INT("tracker", "max_coast_steps", tracker.max_coast_steps),
    };
    return table;
}

#undef ISAC_DOUBLE
#undef ISAC_INT
#undef ISAC_SIZE
#undef ISAC_VEC

struct Violation
{
    std::string section;
    std::string key;
    std::string message;
};

bool finite_vec(const Vec3 &v) { return is_finite(v); }

std::optional<Violation> check(const RunConfig &c)
{
    auto fail = [](const char *sec, const char *key, const char *msg) { return Violation{sec, key, msg}; };
    const auto &s = c.scene;

    if (!(s.duration > 0.0) || !std::isfinite(s.duration))
        return fail("run", "duration", "must be > 0");
    if (!(c.tracker.ts > 0.0) || !std::isfinite(c.tracker.ts))
        return fail("run", "ts", "must be > 0");
    if (c.tracker.ts > s.duration)
        return fail("run", "ts", "must not exceed duration");
    for (const auto &r : c.withheld)
        if (r.first < 1 || r.last < r.first)
            return fail("run", "withhold", "ranges need 1 <= first <= last (frame 0 initializes the tracker)");

    if (s.num_clusters < 0)
        return fail("scene", "num_clusters", "must be >= 0");
    if (s.double_bounce_clusters < 0 || s.double_bounce_clusters > s.num_clusters)
        return fail("scene", "double_bounce_clusters", "must lie in [0, num_clusters]");
    if (s.first_bounce_per_cluster < 1)
        return fail("scene", "first_bounce_per_cluster", "must be >= 1");
    if (s.last_bounce_per_cluster < 0 || (s.double_bounce_clusters > 0 && s.last_bounce_per_cluster < 1))
        return fail("scene", "last_bounce_per_cluster", "must be >= 1 when double-bounce clusters exist");
    for (auto [name, v] : {std::pair{"first_bounce_region_min", s.first_bounce_region.min},
                           std::pair{"first_bounce_region_max", s.first_bounce_region.max},
                           std::pair{"last_bounce_region_min", s.last_bounce_region.min},
                           std::pair{"last_bounce_region_max", s.last_bounce_region.max},
                           std::pair{"bs_position", s.bs_position}, std::pair{"user_start", s.user_start},
                           std::pair{"user_velocity", s.user_velocity}})
        if (!finite_vec(v))
            return fail("scene", name, "components must be finite");
    auto ordered = [](const Box &b) { return b.min.x <= b.max.x && b.min.y <= b.max.y && b.min.z <= b.max.z; };
    if (!ordered(s.first_bounce_region))
        return fail("scene", "first_bounce_region_max", "must be >= first_bounce_region_min per axis");
    if (!ordered(s.last_bounce_region))
        return fail("scene", "last_bounce_region_max", "must be >= last_bounce_region_min per axis");
    if (!(s.speed_min >= 0.0))
        return fail("scene", "speed_min", "must be >= 0");
    if (!(s.speed_max >= s.speed_min) || !std::isfinite(s.speed_max))
        return fail("scene", "speed_max", "must be >= speed_min");
    if (!(s.birth_death_rate >= 0.0) || !std::isfinite(s.birth_death_rate))
        return fail("scene", "birth_death_rate", "must be >= 0");
    if (!(s.rcs_min > 0.0))
        return fail("scene", "rcs_min", "must be > 0");
    if (!(s.rcs_max >= s.rcs_min) || !std::isfinite(s.rcs_max))
        return fail("scene", "rcs_max", "must be >= rcs_min");
    if (!(s.tau_decay > 0.0) || !std::isfinite(s.tau_decay))
        return fail("scene", "tau_decay", "must be > 0");
    if (!(s.virtual_delay_max >= 0.0) || !std::isfinite(s.virtual_delay_max))
        return fail("scene", "virtual_delay_max", "must be >= 0");

    if (c.tx.rows < 1)
        return fail("arrays", "tx_rows", "must be >= 1");
    if (c.tx.cols < 1)
        return fail("arrays", "tx_cols", "must be >= 1");
    if (c.rx.rows < 1)
        return fail("arrays", "rx_rows", "must be >= 1");
    if (c.rx.cols < 1)
        return fail("arrays", "rx_cols", "must be >= 1");
    if (!(c.element_spacing >= 0.0) || !std::isfinite(c.element_spacing))
        return fail("arrays", "element_spacing", "must be >= 0 (0 selects half a wavelength)");

    if (!(c.carrier_hz > 0.0) || !std::isfinite(c.carrier_hz))
        return fail("channel", "carrier_hz", "must be > 0");
    if (!(c.k_factor >= 0.0) || !std::isfinite(c.k_factor))
        return fail("channel", "k_factor", "must be >= 0");
    if (!std::isfinite(c.kappa_db))
        return fail("channel", "kappa_db", "must be finite");
    if (!(c.mu > 0.0) || !std::isfinite(c.mu))
        return fail("channel", "mu", "must be > 0");

    if (!(c.sigma_delay >= 0.0) || !std::isfinite(c.sigma_delay))
        return fail("noise", "sigma_delay", "must be >= 0");
    if (!(c.sigma_angle_deg >= 0.0) || !std::isfinite(c.sigma_angle_deg))
        return fail("noise", "sigma_angle_deg", "must be >= 0");
    if (!(c.sigma_doppler >= 0.0) || !std::isfinite(c.sigma_doppler))
        return fail("noise", "sigma_doppler", "must be >= 0");

    const auto &t = c.tracker;
    if (t.particles < 1)
        return fail("tracker", "particles", "must be >= 1");
    if (!(t.process.position_std >= 0.0))
        return fail("tracker", "process_position_std", "must be >= 0");
    if (!(t.process.velocity_std >= 0.0))
        return fail("tracker", "process_velocity_std", "must be >= 0");
    if (!(t.init_position_std >= 0.0))
        return fail("tracker", "init_position_std", "must be >= 0");
    if (!(t.init_velocity_std >= 0.0))
        return fail("tracker", "init_velocity_std", "must be >= 0");
    if (!(t.gate_sigmas > 0.0))
        return fail("tracker", "gate_sigmas", "must be > 0");
    if (t.max_coast_steps < 0)
        return fail("tracker", "max_coast_steps", "must be >= 0");
    return std::nullopt;
}

std::string describe(const Violation &v) { return "[" + v.section + "] " + v.key + ": " + v.message; }

} // namespace

int RunConfig::frame_count() const { return static_cast<int>(std::lround(scene.duration / tracker.ts)) + 1; }

bool RunConfig::is_withheld(int k) const
{
    for (const auto &r : withheld)
        if (k >= r.first && k <= r.last)
            return true;
    return false;
}

SceneConfig RunConfig::scene_config() const
{
    SceneConfig s = scene;
    s.seed = seed;
    s.sigma_delay = sigma_delay;
    s.sigma_angle = deg_to_rad(sigma_angle_deg);
    s.sigma_doppler = sigma_doppler;
    return s;
}

tracking::TrackerConfig RunConfig::tracker_config() const
{
    tracking::TrackerConfig t = tracker;
    t.measurement.sigma_delay = std::max(sigma_delay, kMinTrackerSigmaDelay);
    t.measurement.sigma_angle = std::max(deg_to_rad(sigma_angle_deg), kMinTrackerSigmaAngle);
    t.carrier_hz = carrier_hz;
    t.include_bounce_leg = scene.include_bounce_leg;
    t.seed = hash_keys({seed, 0x7472616bULL});
    return t;
}

ObservationNoise RunConfig::observation_noise() const
{
    return {sigma_delay, deg_to_rad(sigma_angle_deg), sigma_doppler, carrier_hz};
}

comm::CommSettings RunConfig::comm_settings() const
{
    comm::CommSettings s;
    s.carrier_hz = carrier_hz;
    s.k_factor = k_factor;
    return s;
}

comm::PolarizationBank RunConfig::polarization_bank() const
{
    return comm::PolarizationBank(hash_keys({seed, 0x706f6c62ULL}), std::pow(10.0, kappa_db / 10.0), mu);
}

PlanarArray RunConfig::tx_array() const { return PlanarArray(tx.rows, tx.cols, spacing(), scene.bs_position); }

PlanarArray RunConfig::rx_array() const { return PlanarArray(rx.rows, rx.cols, spacing(), scene.user_start); }

void RunConfig::validate() const
{
    if (const auto v = check(*this))
        throw ConfigError(describe(*v));
}

RunConfig parse_config(std::istream &is, const std::string &source)
{
    RunConfig cfg;
    std::map<std::pair<std::string, std::string>, int> seen;
    std::set<std::string> sections;
    for (const auto &f : fields())
        sections.insert(f.section);

    auto error = [&](int line, const std::string &msg) -> ConfigError
    { return ConfigError(source + ":" + std::to_string(line) + ": " + msg); };

    std::string line;
    std::string section;
    int line_no = 0;
    while (std::getline(is, line))
    {
        ++line_no;
        auto body = io::trim(line);
        if (body.empty() || body.front() == '#' || body.front() == ';')
            continue;
        if (body.front() == '[')
        {
            if (body.back() != ']')
                throw error(line_no, "unterminated section header");
            section = std::string(io::trim(body.substr(1, body.size() - 2)));
            if (!sections.contains(section))
                throw error(line_no, "unknown section [" + section + "]");
            continue;
        }
        const auto eq = body.find('=');
        if (eq == std::string_view::npos)
            throw error(line_no, "expected 'key = value'");
        if (section.empty())
            throw error(line_no, "key outside of any [section]");
        const std::string key(io::trim(body.substr(0, eq)));
        const auto value = io::trim(body.substr(eq + 1));

        const Field *field = nullptr;
        for (const auto &f : fields())
            if (section == f.section && key == f.key)
                field = &f;
        if (!field)
            throw error(line_no, "unknown key '" + key + "' in [" + section + "]");
        if (!seen.emplace(std::pair{section, key}, line_no).second)
            throw error(line_no, "duplicate key '" + key + "'");
        try
        {
            field->set(cfg, value);
        }
        catch (const std::invalid_argument &e)
        {
            throw error(line_no, key + ": " + e.what());
        }
    }

    if (const auto v = check(cfg))
    {
        const auto it = seen.find({v->section, v->key});
        if (it != seen.end())
            throw error(it->second, describe(*v));
        throw ConfigError(source + ": " + describe(*v));
    }
    return cfg;
}

RunConfig load_config(const std::string &path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError(path + ": cannot open config file");
    return parse_config(in, path);
}

void write_config(std::ostream &os, const RunConfig &cfg)
{
    os << "# isacsim run configuration\n";
    std::string section;
    for (const auto &f : fields())
    {
        if (section != f.section)
        {
            section = f.section;
            os << '\n' << '[' << section << "]\n";
        }
        os << f.key << " = " << f.get(cfg) << '\n';
    }
}

} // namespace isac
