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

#include "isac/scene.hpp"

#include "isac/io.hpp"
#include "isac/sensing.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace isac
{

namespace
{

constexpr double kTimeSlack = 1e-9;

void require(bool ok, const char *what)
{
    if (!ok)
        throw std::invalid_argument(std::string("SceneConfig: ") + what);
}

bool box_valid(const Box &b)
{
    return is_finite(b.min) && is_finite(b.max) && b.min.x <= b.max.x && b.min.y <= b.max.y && b.min.z <= b.max.z;
}

Vec3 uniform_in(const Box &b, Rng &rng)
{
    // Degenerate extents stay exactly on the bound.
    auto draw = [&rng](double lo, double hi)
    { return lo == hi ? lo : std::uniform_real_distribution<double>(lo, hi)(rng); };
    const double x = draw(b.min.x, b.max.x);
    const double y = draw(b.min.y, b.max.y);
    const double z = draw(b.min.z, b.max.z);
    return {x, y, z};
}

ScattererTruth draw_scatterer(const SceneConfig &cfg, int id, int cluster, ScattererRole role, double birth, Rng &rng)
{
    ScattererTruth s;
    s.id = id;
    s.cluster_id = cluster;
    s.role = role;
    s.birth_time = birth;
    s.position = uniform_in(role == ScattererRole::FirstBounce ? cfg.first_bounce_region : cfg.last_bounce_region, rng);

    const double speed = cfg.speed_min == cfg.speed_max
                             ? cfg.speed_min
                             : std::uniform_real_distribution<double>(cfg.speed_min, cfg.speed_max)(rng);
    const double heading = std::uniform_real_distribution<double>(-kPi, kPi)(rng);
    s.velocity = {speed * std::cos(heading), speed * std::sin(heading), 0.0};

    s.rcs = cfg.rcs_min == cfg.rcs_max ? cfg.rcs_min
                                       : std::uniform_real_distribution<double>(cfg.rcs_min, cfg.rcs_max)(rng);
    return s;
}

double nlos_delay(const SceneTruth &scene, const Vec3 &fb, const Vec3 &lb, const Vec3 &user, PathId id)
{
    double length = path_distance(scene.bs_position, fb, lb, user);
    if (scene.include_bounce_leg)
        length += distance(fb, lb);
    return length / kSpeedOfLight + scene.virtual_delay(id);
}

} // namespace

void SceneConfig::validate() const
{
    require(num_clusters >= 0, "num_clusters must be >= 0");
    require(first_bounce_per_cluster >= 1, "first_bounce_per_cluster must be >= 1");
    require(last_bounce_per_cluster >= 0, "last_bounce_per_cluster must be >= 0");
    require(double_bounce_clusters >= 0 && double_bounce_clusters <= num_clusters,
            "double_bounce_clusters must lie in [0, num_clusters]");
    require(double_bounce_clusters == 0 || last_bounce_per_cluster >= 1,
            "double-bounce clusters need last_bounce_per_cluster >= 1");
    require(box_valid(first_bounce_region), "first_bounce_region is empty or non-finite");
    require(box_valid(last_bounce_region), "last_bounce_region is empty or non-finite");
    require(speed_min >= 0.0 && speed_min <= speed_max && std::isfinite(speed_max), "speed range must satisfy 0 <= min <= max");
    require(birth_death_rate >= 0.0 && std::isfinite(birth_death_rate), "birth_death_rate must be >= 0");
    require(rcs_min > 0.0 && rcs_min <= rcs_max && std::isfinite(rcs_max), "rcs range must satisfy 0 < min <= max");
    require(sigma_delay >= 0.0 && sigma_angle >= 0.0 && sigma_doppler >= 0.0, "noise standard deviations must be >= 0");
    require(duration > 0.0 && std::isfinite(duration), "duration must be > 0");
    require(is_finite(bs_position) && is_finite(user_start) && is_finite(user_velocity), "positions must be finite");
    require(tau_decay > 0.0, "tau_decay must be > 0");
    require(virtual_delay_max >= 0.0 && std::isfinite(virtual_delay_max), "virtual_delay_max must be >= 0");
}

const ScattererTruth &SceneTruth::scatterer(int id) const
{
    if (id < 0 || static_cast<std::size_t>(id) >= scatterers.size())
        throw std::out_of_range("SceneTruth: unknown scatterer id " + std::to_string(id));
    return scatterers[static_cast<std::size_t>(id)];
}

double SceneTruth::virtual_delay(PathId id) const
{
    if (virtual_delay_max == 0.0)
        return 0.0;
    const auto h = hash_keys({seed, 0x76646c79ULL, static_cast<std::uint64_t>(id.first),
                              static_cast<std::uint64_t>(id.last)});
    return virtual_delay_max * unit_from_hash(h);
}

int SceneTruth::active_clusters(double t) const
{
    std::vector<bool> active(clusters.size(), false);
    for (const auto &s : scatterers)
        if (s.alive_at(t))
            active[static_cast<std::size_t>(s.cluster_id)] = true;
    return static_cast<int>(std::count(active.begin(), active.end(), true));
}

const PathObservation *ObservationFrame::find_path(PathId id) const
{
    auto it = std::find_if(comm_paths.begin(), comm_paths.end(), [&](const auto &p) { return p.id == id; });
    return it == comm_paths.end() ? nullptr : &*it;
}

const SensingDetection *ObservationFrame::find_detection(int scatterer_id) const
{
    auto it = std::find_if(sensing.begin(), sensing.end(), [&](const auto &d) { return d.scatterer_id == scatterer_id; });
    return it == sensing.end() ? nullptr : &*it;
}

SceneTruth generate_scene(const SceneConfig &cfg)
{
    cfg.validate();

    SceneTruth scene;
    scene.duration = cfg.duration;
    scene.bs_position = cfg.bs_position;
    scene.user_start = cfg.user_start;
    scene.user_velocity = cfg.user_velocity;
    scene.tau_decay = cfg.tau_decay;
    scene.virtual_delay_max = cfg.virtual_delay_max;
    scene.include_bounce_leg = cfg.include_bounce_leg;
    scene.seed = cfg.seed;

    Rng rng = make_stream({cfg.seed, 0x7363656eULL});

    for (int c = 0; c < cfg.num_clusters; ++c)
    {
        const bool dbl = c < cfg.double_bounce_clusters;
        scene.clusters.push_back(dbl ? ClusterKind::DoubleBounce : ClusterKind::SingleBounce);
        for (int m = 0; m < cfg.first_bounce_per_cluster; ++m)
            scene.scatterers.push_back(draw_scatterer(cfg, static_cast<int>(scene.scatterers.size()), c,
                                                      ScattererRole::FirstBounce, 0.0, rng));
        if (dbl)
            for (int m = 0; m < cfg.last_bounce_per_cluster; ++m)
                scene.scatterers.push_back(draw_scatterer(cfg, static_cast<int>(scene.scatterers.size()), c,
                                                          ScattererRole::LastBounce, 0.0, rng));
    }

    // Poisson birth-death: each event retires one alive scatterer and replaces it with a
    // fresh one in the same cluster and role, so the per-cluster population is constant.
    if (cfg.birth_death_rate > 0.0 && !scene.scatterers.empty())
    {
        std::exponential_distribution<double> gap(cfg.birth_death_rate);
        double t = 0.0;
        while (true)
        {
            t += gap(rng);
            if (t >= cfg.duration)
                break;
            std::vector<std::size_t> alive;
            for (std::size_t i = 0; i < scene.scatterers.size(); ++i)
                if (scene.scatterers[i].alive_at(t))
                    alive.push_back(i);
            const std::size_t victim = alive[std::uniform_int_distribution<std::size_t>(0, alive.size() - 1)(rng)];
            scene.scatterers[victim].death_time = t;
            const ScattererTruth &old = scene.scatterers[victim];
            scene.scatterers.push_back(draw_scatterer(cfg, static_cast<int>(scene.scatterers.size()), old.cluster_id,
                                                      old.role, t, rng));
        }
    }
    return scene;
}

std::vector<double> path_powers(std::span<const double> delays, double tau_decay)
{
    std::vector<double> p(delays.size());
    if (delays.empty())
        return p;
    const double tau_min = *std::min_element(delays.begin(), delays.end());
    double total = 0.0;
    for (std::size_t i = 0; i < delays.size(); ++i)
    {
        p[i] = std::exp(-(delays[i] - tau_min) / tau_decay);
        total += p[i];
    }
    for (auto &v : p)
        v /= total;
    return p;
}

std::vector<PathTruth> ground_truth_paths(const SceneTruth &scene, double t)
{
    if (!(t >= -kTimeSlack && t <= scene.duration + kTimeSlack))
        throw std::out_of_range("ground_truth_paths: t outside scene duration");

    const Vec3 user = scene.user_position(t);
    std::vector<PathTruth> paths;

    for (std::size_t c = 0; c < scene.clusters.size(); ++c)
    {
        std::vector<const ScattererTruth *> fbs, lbs;
        for (const auto &s : scene.scatterers)
        {
            if (s.cluster_id != static_cast<int>(c) || !s.alive_at(t))
                continue;
            (s.role == ScattererRole::FirstBounce ? fbs : lbs).push_back(&s);
        }

        auto add = [&](const ScattererTruth &fb, const ScattererTruth &lb)
        {
            PathTruth p;
            p.id = {fb.id, lb.id};
            p.cluster_id = static_cast<int>(c);
            p.first_bounce = fb.position_at(t);
            p.last_bounce = lb.position_at(t);
            p.virtual_delay = scene.virtual_delay(p.id);
            p.delay = nlos_delay(scene, p.first_bounce, p.last_bounce, user, p.id);
            paths.push_back(p);
        };

        if (scene.clusters[c] == ClusterKind::SingleBounce)
        {
            for (const auto *fb : fbs)
                add(*fb, *fb);
        }
        else
        {
            for (const auto *fb : fbs)
                for (const auto *lb : lbs)
                    add(*fb, *lb);
        }
    }

    std::vector<double> delays;
    delays.reserve(paths.size());
    for (const auto &p : paths)
        delays.push_back(p.delay);
    const auto powers = path_powers(delays, scene.tau_decay);
    for (std::size_t i = 0; i < paths.size(); ++i)
        paths[i].power = powers[i];
    return paths;
}

PathObservation los_observation(const SceneTruth &scene, double t)
{
    const Vec3 user = scene.user_position(t);
    PathObservation los;
    los.id = kLosId;
    los.delay = distance(user, scene.bs_position) / kSpeedOfLight;
    los.aod = direction_of(user - scene.bs_position).angles;
    los.aoa = direction_of(scene.bs_position - user).angles;
    los.power = 1.0;
    return los;
}

ObservationFrame observe(const SceneTruth &scene, double t, const ObservationNoise &noise, Rng &rng)
{
    if (noise.sigma_delay < 0.0 || noise.sigma_angle < 0.0 || noise.sigma_doppler < 0.0)
        throw std::invalid_argument("observe: noise standard deviations must be >= 0");
    if (!(noise.carrier_hz > 0.0))
        throw std::invalid_argument("observe: carrier frequency must be > 0");

    std::normal_distribution<double> gauss(0.0, 1.0);
    auto jitter = [&](double sigma) { return sigma > 0.0 ? sigma * gauss(rng) : 0.0; };
    auto jitter_angles = [&](const AngleSet &a)
    {
        const double az = a.azimuth() + jitter(noise.sigma_angle);
        const double el = a.elevation() + jitter(noise.sigma_angle);
        return AngleSet{az, el};
    };

    ObservationFrame frame;
    frame.time = t;
    const Vec3 user = scene.user_position(t);

    PathObservation los = los_observation(scene, t);
    los.delay += jitter(noise.sigma_delay);
    los.aod = jitter_angles(los.aod);
    los.aoa = jitter_angles(los.aoa);
    frame.los = los;

    for (const auto &p : ground_truth_paths(scene, t))
    {
        PathObservation o;
        o.id = p.id;
        o.cluster_id = p.cluster_id;
        o.delay = p.delay + jitter(noise.sigma_delay);
        o.aod = jitter_angles(direction_of(p.first_bounce - scene.bs_position).angles);
        o.aoa = jitter_angles(direction_of(p.last_bounce - user).angles);
        o.power = p.power;
        frame.comm_paths.push_back(o);
    }

    const double wavelength = kSpeedOfLight / noise.carrier_hz;
    for (const auto &s : scene.scatterers)
    {
        if (s.role != ScattererRole::FirstBounce || !s.alive_at(t))
            continue;
        const Vec3 offset = s.position_at(t) - scene.bs_position;
        const double range = norm(offset);
        SensingDetection d;
        d.scatterer_id = s.id;
        d.round_trip_delay = sensing::echo_delay(range) + jitter(noise.sigma_delay);
        d.angle = jitter_angles(direction_of(offset).angles);
        d.doppler = sensing::doppler_shift(sensing::closing_speed(offset, s.velocity), wavelength) +
                    jitter(noise.sigma_doppler);
        d.gain = sensing::sensing_gain(range, s.rcs, wavelength);
        frame.sensing.push_back(d);
    }
    return frame;
}

// ---------- scene file ----------

namespace
{

const char *role_token(ScattererRole r) { return r == ScattererRole::FirstBounce ? "FB" : "LB"; }

[[noreturn]] void scene_error(int line, const std::string &msg)
{
    throw std::runtime_error("scene file line " + std::to_string(line) + ": " + msg);
}

} // namespace

void save_scene(std::ostream &os, const SceneTruth &scene)
{
    using io::format_double;
    auto vec = [](const Vec3 &v) { return format_double(v.x) + ' ' + format_double(v.y) + ' ' + format_double(v.z); };

    os << "# isacsim:scene v1\n";
    os << "duration " << format_double(scene.duration) << '\n';
    os << "bs_position " << vec(scene.bs_position) << '\n';
    os << "user_start " << vec(scene.user_start) << '\n';
    os << "user_velocity " << vec(scene.user_velocity) << '\n';
    os << "tau_decay " << format_double(scene.tau_decay) << '\n';
    os << "virtual_delay_max " << format_double(scene.virtual_delay_max) << '\n';
    os << "include_bounce_leg " << (scene.include_bounce_leg ? 1 : 0) << '\n';
    os << "seed " << scene.seed << '\n';
    os << "clusters";
    for (auto k : scene.clusters)
        os << ' ' << (k == ClusterKind::SingleBounce ? 'S' : 'D');
    os << '\n';
    os << "# scatterer id cluster role birth death px py pz vx vy vz rcs\n";
    for (const auto &s : scene.scatterers)
    {
        os << "scatterer " << s.id << ' ' << s.cluster_id << ' ' << role_token(s.role) << ' '
           << format_double(s.birth_time) << ' ' << format_double(s.death_time) << ' ' << vec(s.position) << ' '
           << vec(s.velocity) << ' ' << format_double(s.rcs) << '\n';
    }
}

SceneTruth load_scene(std::istream &is)
{
    SceneTruth scene;
    std::string line;
    int line_no = 0;
    bool header_seen = false;

    auto read_vec = [&](std::istringstream &ss) -> Vec3
    {
        std::string a, b, c;
        if (!(ss >> a >> b >> c))
            scene_error(line_no, "expected three numbers");
        return {io::parse_double(a), io::parse_double(b), io::parse_double(c)};
    };
    auto read_num = [&](std::istringstream &ss) -> double
    {
        std::string a;
        if (!(ss >> a))
            scene_error(line_no, "expected a number");
        return io::parse_double(a);
    };

    while (std::getline(is, line))
    {
        ++line_no;
        if (line_no == 1)
        {
            if (io::trim(line) != "# isacsim:scene v1")
                scene_error(line_no, "missing '# isacsim:scene v1' header");
            header_seen = true;
            continue;
        }
        const auto body = io::trim(line);
        if (body.empty() || body.front() == '#')
            continue;

        std::istringstream ss{std::string(body)};
        std::string key;
        ss >> key;
        try
        {
            if (key == "duration")
                scene.duration = read_num(ss);
            else if (key == "bs_position")
                scene.bs_position = read_vec(ss);
            else if (key == "user_start")
                scene.user_start = read_vec(ss);
            else if (key == "user_velocity")
                scene.user_velocity = read_vec(ss);
            else if (key == "tau_decay")
                scene.tau_decay = read_num(ss);
            else if (key == "virtual_delay_max")
                scene.virtual_delay_max = read_num(ss);
            else if (key == "include_bounce_leg")
                scene.include_bounce_leg = read_num(ss) != 0.0;
            else if (key == "seed")
            {
                std::string v;
                ss >> v;
                scene.seed = static_cast<std::uint64_t>(io::parse_uint(v));
            }
            else if (key == "clusters")
            {
                std::string tok;
                while (ss >> tok)
                {
                    if (tok == "S")
                        scene.clusters.push_back(ClusterKind::SingleBounce);
                    else if (tok == "D")
                        scene.clusters.push_back(ClusterKind::DoubleBounce);
                    else
                        scene_error(line_no, "cluster kind must be S or D");
                }
            }
            else if (key == "scatterer")
            {
                ScattererTruth s;
                std::string id, cluster, role;
                if (!(ss >> id >> cluster >> role))
                    scene_error(line_no, "truncated scatterer record");
                s.id = static_cast<int>(io::parse_int(id));
                s.cluster_id = static_cast<int>(io::parse_int(cluster));
                if (role == "FB")
                    s.role = ScattererRole::FirstBounce;
                else if (role == "LB")
                    s.role = ScattererRole::LastBounce;
                else
                    scene_error(line_no, "role must be FB or LB");
                s.birth_time = read_num(ss);
                s.death_time = read_num(ss);
                s.position = read_vec(ss);
                s.velocity = read_vec(ss);
                s.rcs = read_num(ss);
                if (s.id != static_cast<int>(scene.scatterers.size()))
                    scene_error(line_no, "scatterer ids must be consecutive from 0");
                if (!(s.birth_time < s.death_time) || !(s.rcs > 0.0))
                    scene_error(line_no, "scatterer needs birth < death and rcs > 0");
                scene.scatterers.push_back(s);
            }
            else
                scene_error(line_no, "unknown record '" + key + "'");
        }
        catch (const std::invalid_argument &e)
        {
            scene_error(line_no, e.what());
        }
    }
    if (!header_seen)
        scene_error(0, "empty scene file");
    for (const auto &s : scene.scatterers)
        if (s.cluster_id < 0 || static_cast<std::size_t>(s.cluster_id) >= scene.clusters.size())
            throw std::runtime_error("scene file: scatterer " + std::to_string(s.id) + " references unknown cluster");
    return scene;
}

} // namespace isac
