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

#include "isac/tracker.hpp"

#include <stdexcept>

namespace isac::tracking
{

namespace
{

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

enum StreamTag : std::uint64_t
{
    kUserStream = 0x75736572,
    kFirstBounceStream = 0x66627374,
    kLastBounceStream = 0x6c627374,
};

double sq(double x) { return x * x; }

} // namespace

ParticleCloud ParticleCloud::uniform(std::vector<EntityState> particles)
{
    if (particles.empty())
        throw std::invalid_argument("ParticleCloud: at least one particle required");
    ParticleCloud c;
    c.weights.assign(particles.size(), 1.0 / static_cast<double>(particles.size()));
    c.particles = std::move(particles);
    return c;
}

void predict(ParticleCloud &cloud, double ts, const ProcessNoise &noise, Rng &rng)
{
    if (!(ts > 0.0))
        throw std::invalid_argument("predict: Ts must be > 0");
    std::normal_distribution<double> g(0.0, 1.0);
    const double sp = noise.position_std;
    const double sv = noise.velocity_std;
    for (auto &s : cloud.particles)
    {
        s.position += s.velocity * ts;
        if (sp > 0.0)
        {
            const double nx = g(rng), ny = g(rng), nz = g(rng);
            s.position += Vec3{sp * nx, sp * ny, sp * nz};
        }
        if (sv > 0.0)
        {
            const double nx = g(rng), ny = g(rng), nz = g(rng);
            s.velocity += Vec3{sv * nx, sv * ny, sv * nz};
        }
    }
}

MeasurementPrediction predict_measurement(const MeasurementModel &model, const EntityState &user,
                                          const EntityState &first_bounce, const EntityState &last_bounce,
                                          double virtual_delay)
{
    const Vec3 tx_leg = first_bounce.position - model.bs_position;
    const Vec3 rx_leg = last_bounce.position - user.position;
    const double d_tx = norm(tx_leg);
    const double d_rx = norm(rx_leg);

    MeasurementPrediction h;
    double length = d_tx + d_rx;
    if (model.include_bounce_leg)
        length += distance(first_bounce.position, last_bounce.position);
    h.delay = length / kSpeedOfLight + virtual_delay;

    const Direction dep = direction_of(tx_leg);
    const Direction arr = direction_of(rx_leg);
    h.aod = dep.angles;
    h.aoa = arr.angles;
    h.degenerate = dep.degenerate || arr.degenerate;
    return h;
}

MeasurementPrediction predict_los(const MeasurementModel &model, const EntityState &user)
{
    const Vec3 leg = user.position - model.bs_position;
    const Direction dep = direction_of(leg);
    const Direction arr = direction_of(-leg);
    MeasurementPrediction h;
    h.delay = norm(leg) / kSpeedOfLight;
    h.aod = dep.angles;
    h.aoa = arr.angles;
    h.degenerate = dep.degenerate || arr.degenerate;
    return h;
}

double log_likelihood(const PathObservation &z, const MeasurementPrediction &h, unsigned components,
                      const MeasurementNoise &noise)
{
    if (h.degenerate)
        return kNegInf;
    double q = 0.0;
    if (components & kDelay)
        q += sq((z.delay - h.delay) / noise.sigma_delay);
    if (components & kAodAzimuth)
        q += sq(wrap_angle(z.aod.azimuth() - h.aod.azimuth()) / noise.sigma_angle);
    if (components & kAodElevation)
        q += sq((z.aod.elevation() - h.aod.elevation()) / noise.sigma_angle);
    if (components & kAoaAzimuth)
        q += sq(wrap_angle(z.aoa.azimuth() - h.aoa.azimuth()) / noise.sigma_angle);
    if (components & kAoaElevation)
        q += sq((z.aoa.elevation() - h.aoa.elevation()) / noise.sigma_angle);
    return -0.5 * q;
}

ParticleCloud resample(const ParticleCloud &cloud, Rng &rng)
{
    const std::size_t n = cloud.size();
    if (n == 0)
        throw std::invalid_argument("resample: empty cloud");

    double total = 0.0;
    for (double w : cloud.weights)
        total += w;

    // One uniform offset in (0, 1]; comb positions u_j = total * (j + offset) / n never sit
    // at zero, so zero-weight particles are never selected.
    const double offset = 1.0 - std::uniform_real_distribution<double>(0.0, 1.0)(rng);

    ParticleCloud out;
    out.particles.reserve(n);
    std::size_t i = 0;
    double cumulative = cloud.weights[0];
    for (std::size_t j = 0; j < n; ++j)
    {
        const double u = total * (static_cast<double>(j) + offset) / static_cast<double>(n);
        while (cumulative < u && i + 1 < n)
            cumulative += cloud.weights[++i];
        out.particles.push_back(cloud.particles[i]);
    }
    out.weights.assign(n, 1.0 / static_cast<double>(n));
    return out;
}

EntityState estimate(const ParticleCloud &cloud)
{
    if (cloud.size() == 0)
        throw std::invalid_argument("estimate: empty cloud");
    const auto it = std::max_element(cloud.weights.begin(), cloud.weights.end());
    return cloud.particles[static_cast<std::size_t>(it - cloud.weights.begin())];
}

void TrackerConfig::validate() const
{
    auto require = [](bool ok, const char *what)
    {
        if (!ok)
            throw std::invalid_argument(std::string("TrackerConfig: ") + what);
    };
    require(particles >= 1, "particles must be >= 1");
    require(ts > 0.0, "ts must be > 0");
    require(process.position_std >= 0.0 && process.velocity_std >= 0.0, "process noise must be >= 0");
    require(measurement.sigma_delay > 0.0 && measurement.sigma_angle > 0.0, "measurement noise must be > 0");
    require(init_position_std >= 0.0 && init_velocity_std >= 0.0, "initial spread must be >= 0");
    require(gate_sigmas > 0.0, "gate_sigmas must be > 0");
    require(max_coast_steps >= 0, "max_coast_steps must be >= 0");
    require(carrier_hz > 0.0, "carrier_hz must be > 0");
}

std::optional<double> solve_ray_range(const Vec3 &origin, const Vec3 &u, const Vec3 &anchor, double remaining)
{
    // |w + r u|^2 = (L - r)^2 with |u| = 1 is linear in r.
    const Vec3 w = origin - anchor;
    const double denom = 2.0 * (dot(w, u) + remaining);
    if (!(denom > 0.0))
        return std::nullopt;
    const double r = (remaining * remaining - dot(w, w)) / denom;
    if (!(r >= 0.0) || !(r <= remaining) || !std::isfinite(r))
        return std::nullopt;
    return r;
}

Tracker::Tracker(const TrackerConfig &config, const Vec3 &bs_position, const EntityState &user0, double t0)
    : config_(config), model_{bs_position, config.include_bounce_leg}, time_(t0),
      user_rng_(make_stream({config.seed, kUserStream})), user_estimate_(user0)
{
    config_.validate();
    user_ = ParticleCloud::uniform(std::vector<EntityState>(config_.particles, user0));
    report_.time = t0;
}

ParticleCloud Tracker::seeded_cloud(const EntityState &centre, double pos_std, double vel_std, Rng &rng) const
{
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<EntityState> ps(config_.particles, centre);
    for (auto &s : ps)
    {
        if (pos_std > 0.0)
        {
            const double nx = g(rng), ny = g(rng), nz = g(rng);
            s.position += Vec3{pos_std * nx, pos_std * ny, pos_std * nz};
        }
        if (vel_std > 0.0)
        {
            const double nx = g(rng), ny = g(rng), nz = g(rng);
            s.velocity += Vec3{vel_std * nx, vel_std * ny, vel_std * nz};
        }
    }
    return ParticleCloud::uniform(std::move(ps));
}

namespace
{

bool detection_matches(const SensingDetection &d, const PathObservation &z, const TrackerConfig &cfg)
{
    // Both sides carry independent noise, so the gate is on the difference.
    const double gate_angle = std::max(cfg.gate_sigmas * cfg.measurement.sigma_angle * std::sqrt(2.0), 1e-9);
    const double gate_delay = std::max(cfg.gate_sigmas * cfg.measurement.sigma_delay * std::sqrt(2.0), 1e-15);
    return std::abs(wrap_angle(d.angle.azimuth() - z.aod.azimuth())) <= gate_angle &&
           std::abs(d.angle.elevation() - z.aod.elevation()) <= gate_angle &&
           0.5 * d.round_trip_delay <= z.delay + gate_delay;
}

} // namespace

std::optional<PathInitialization> Tracker::locate(const PathObservation &z, const ObservationFrame &frame) const
{
    const Vec3 user = user_estimate_.position;
    const Vec3 arrival = unit_vector_from_angles(z.aoa);
    const double wavelength = kSpeedOfLight / config_.carrier_hz;
    const double path_length = kSpeedOfLight * z.delay;

    PathInitialization init;
    const SensingDetection *det = frame.find_detection(z.id.first);
    if (det && detection_matches(*det, z, config_))
    {
        const double range = 0.5 * kSpeedOfLight * det->round_trip_delay;
        const Vec3 toward = unit_vector_from_angles(det->angle);
        init.first_bounce.position = model_.bs_position + range * toward;
        // Doppler gives the radial velocity only.
        init.first_bounce.velocity = -(0.5 * det->doppler * wavelength) * toward;
        init.first_bounce_sensed = true;

        const double remaining = path_length - range;
        std::optional<double> r;
        if (model_.include_bounce_leg && !z.id.single_bounce())
            r = solve_ray_range(user, arrival, init.first_bounce.position, remaining);
        else if (remaining >= 0.0)
            r = remaining;
        if (!r)
            return std::nullopt;

        init.last_bounce.position = user + *r * arrival;
        if (z.id.single_bounce())
            init.last_bounce.velocity = init.first_bounce.velocity;
    }
    else
    {
        // No usable echo: assume a single bounce on the AoA ray, |P - bs| + |P - user| = c tau.
        const auto r = solve_ray_range(user, arrival, model_.bs_position, path_length);
        if (!r)
            return std::nullopt;
        init.last_bounce.position = user + *r * arrival;
        init.first_bounce = init.last_bounce;
        init.first_bounce_sensed = false;
    }
    return init;
}

void Tracker::seed_track(PathId id, int cluster_id, const EntityState &first_bounce, const EntityState &last_bounce,
                         bool first_bounce_sensed)
{
    const auto a = static_cast<std::uint64_t>(id.first);
    const auto b = static_cast<std::uint64_t>(id.last);
    PathTrack track;
    track.id = id;
    track.cluster_id = cluster_id;
    track.first_bounce_sensed = first_bounce_sensed;
    track.first_bounce_rng = make_stream({config_.seed, kFirstBounceStream, a, b});
    track.last_bounce_rng = make_stream({config_.seed, kLastBounceStream, a, b});
    track.first_bounce =
        seeded_cloud(first_bounce, config_.init_position_std, config_.init_velocity_std, track.first_bounce_rng);
    track.last_bounce =
        seeded_cloud(last_bounce, config_.init_position_std, config_.init_velocity_std, track.last_bounce_rng);
    track.first_bounce_estimate = first_bounce;
    track.last_bounce_estimate = last_bounce;
    track.updated = true;
    tracks_.insert_or_assign(id, std::move(track));
}

void Tracker::start_track(const PathObservation &z, const ObservationFrame &frame)
{
    const auto init = locate(z, frame);
    if (!init)
    {
        report_.init_failed.push_back(z.id);
        return;
    }
    seed_track(z.id, z.cluster_id, init->first_bounce, init->last_bounce, init->first_bounce_sensed);
    report_.initialized.push_back(z.id);
}

void Tracker::begin_step()
{
    report_ = StepReport{};
    ++index_;
    for (auto &[id, track] : tracks_)
        track.updated = false;
}

void Tracker::update_track(PathTrack &track, const PathObservation &z, const ObservationFrame &frame)
{
    const auto &noise = config_.measurement;
    predict(track.first_bounce, config_.ts, config_.process, track.first_bounce_rng);
    predict(track.last_bounce, config_.ts, config_.process, track.last_bounce_rng);

    const SensingDetection *det = track.first_bounce_sensed ? frame.find_detection(track.id.first) : nullptr;
    if (det && !detection_matches(*det, z, config_))
        det = nullptr;

    // First bounce: communication AoD plus, when sensed, the echo delay and angle.
    const Vec3 bs = model_.bs_position;
    const auto fb_outcome = weight(track.first_bounce,
                                   [&](const EntityState &s)
                                   {
                                       const Vec3 off = s.position - bs;
                                       const double range = norm(off);
                                       if (range == 0.0)
                                           return kNegInf;
                                       const AngleSet a = direction_of(off).angles;
                                       double q = sq(wrap_angle(z.aod.azimuth() - a.azimuth()) / noise.sigma_angle) +
                                                  sq((z.aod.elevation() - a.elevation()) / noise.sigma_angle);
                                       if (det)
                                       {
                                           q += sq((det->round_trip_delay - 2.0 * range / kSpeedOfLight) /
                                                   noise.sigma_delay);
                                           q += sq(wrap_angle(det->angle.azimuth() - a.azimuth()) / noise.sigma_angle);
                                           q += sq((det->angle.elevation() - a.elevation()) / noise.sigma_angle);
                                       }
                                       return -0.5 * q;
                                   });
    track.first_bounce_estimate = estimate(track.first_bounce);
    track.first_bounce = resample(track.first_bounce, track.first_bounce_rng);

    // Last bounce: AoA and the delay left over once the user and first bounce are fixed.
    const EntityState user = user_estimate_;
    const EntityState fb = track.first_bounce_estimate;
    const auto lb_outcome = weight(
        track.last_bounce, z, [&](const EntityState &s) { return predict_measurement(model_, user, fb, s); },
        kDelay | kAoa, noise);
    track.last_bounce_estimate = estimate(track.last_bounce);
    track.last_bounce = resample(track.last_bounce, track.last_bounce_rng);

    if (fb_outcome.divergent || lb_outcome.divergent)
        report_.divergent.push_back(track.id);
    track.missed_steps = 0;
    track.updated = true;
}

const StepReport &Tracker::step(const ObservationFrame &frame)
{
    const double expected = time_ + config_.ts;
    if (std::abs(frame.time - expected) > 1e-9 + 1e-6 * config_.ts)
        throw std::invalid_argument("Tracker::step: frame time does not follow the previous step by Ts");

    begin_step();
    time_ = frame.time;
    report_.index = index_;
    report_.time = time_;

    predict(user_, config_.ts, config_.process, user_rng_);
    if (frame.los)
    {
        const auto out = weight(
            user_, *frame.los, [&](const EntityState &s) { return predict_los(model_, s); }, kAllComponents,
            config_.measurement);
        report_.user_divergent = out.divergent;
        user_estimate_ = estimate(user_);
        user_ = resample(user_, user_rng_);
    }
    else
    {
        user_estimate_ = advance(user_estimate_, config_.ts);
        report_.user_coasted = true;
    }

    std::vector<PathId> to_drop;
    for (auto &[id, track] : tracks_)
    {
        if (const PathObservation *z = frame.find_path(id))
        {
            update_track(track, *z, frame);
            continue;
        }
        predict(track.first_bounce, config_.ts, config_.process, track.first_bounce_rng);
        predict(track.last_bounce, config_.ts, config_.process, track.last_bounce_rng);
        track.first_bounce_estimate = advance(track.first_bounce_estimate, config_.ts);
        track.last_bounce_estimate = advance(track.last_bounce_estimate, config_.ts);
        report_.coasted.push_back(id);
        if (++track.missed_steps > config_.max_coast_steps)
            to_drop.push_back(id);
    }
    for (const auto &id : to_drop)
    {
        tracks_.erase(id);
        report_.dropped.push_back(id);
    }

    for (const auto &z : frame.comm_paths)
        if (!tracks_.contains(z.id))
            start_track(z, frame);
    return report_;
}

const StepReport &Tracker::coast()
{
    begin_step();
    time_ += config_.ts;
    report_.index = index_;
    report_.time = time_;
    report_.frame_missing = true;
    report_.user_coasted = true;

    predict(user_, config_.ts, config_.process, user_rng_);
    user_estimate_ = advance(user_estimate_, config_.ts);

    std::vector<PathId> to_drop;
    for (auto &[id, track] : tracks_)
    {
        predict(track.first_bounce, config_.ts, config_.process, track.first_bounce_rng);
        predict(track.last_bounce, config_.ts, config_.process, track.last_bounce_rng);
        track.first_bounce_estimate = advance(track.first_bounce_estimate, config_.ts);
        track.last_bounce_estimate = advance(track.last_bounce_estimate, config_.ts);
        report_.coasted.push_back(id);
        if (++track.missed_steps > config_.max_coast_steps)
            to_drop.push_back(id);
    }
    for (const auto &id : to_drop)
    {
        tracks_.erase(id);
        report_.dropped.push_back(id);
    }
    return report_;
}

const StepReport &Tracker::acquire(const ObservationFrame &frame)
{
    if (std::abs(frame.time - time_) > 1e-9 + 1e-6 * config_.ts)
        throw std::invalid_argument("Tracker::acquire: frame time differs from the tracker time");
    report_.time = time_;
    report_.index = index_;
    for (const auto &z : frame.comm_paths)
        if (!tracks_.contains(z.id))
            start_track(z, frame);
    return report_;
}

std::vector<PathObservation> Tracker::reconstruct(double tau_decay) const
{
    std::vector<PathObservation> out;
    std::vector<double> delays;
    for (const auto &[id, track] : tracks_)
    {
        if (!track.updated)
            continue;
        const auto h = predict_measurement(model_, user_estimate_, track.first_bounce_estimate,
                                           track.last_bounce_estimate);
        PathObservation p;
        p.id = id;
        p.cluster_id = track.cluster_id;
        p.delay = h.delay;
        p.aod = h.aod;
        p.aoa = h.aoa;
        out.push_back(p);
        delays.push_back(h.delay);
    }
    const auto powers = path_powers(delays, tau_decay);
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i].power = powers[i];
    return out;
}

Tracker initialize(const ObservationFrame &frame0, const Vec3 &bs_position, const EntityState &user0,
                   const TrackerConfig &config)
{
    Tracker tracker(config, bs_position, user0, frame0.time);
    tracker.acquire(frame0);
    return tracker;
}

} // namespace isac::tracking
