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

#ifndef ISAC_TRACKER_HPP
#define ISAC_TRACKER_HPP

#include "isac/geometry.hpp"
#include "isac/random.hpp"
#include "isac/scene.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <vector>

namespace isac::tracking
{

struct EntityState
{
    Vec3 position; // m
    Vec3 velocity; // m/s

    friend bool operator==(const EntityState &, const EntityState &) = default;
};

struct ParticleCloud
{
    std::vector<EntityState> particles;
    std::vector<double> weights;

    static ParticleCloud uniform(std::vector<EntityState> particles);
    std::size_t size() const { return particles.size(); }
};

struct ProcessNoise
{
    double position_std = 0.1;  // m per axis per step
    double velocity_std = 0.05; // m/s per axis per step
};

struct MeasurementNoise
{
    double sigma_delay = 5e-9;
    double sigma_angle = deg_to_rad(1.0);
};

// Where the ISAC BS sits and whether double-bounce path lengths include the
// first-to-last bounce leg. Must match the scene that produced the observations.
struct MeasurementModel
{
    Vec3 bs_position;
    bool include_bounce_leg = false;
};

// Constant-velocity transition without noise.
inline EntityState advance(const EntityState &s, double ts) { return {s.position + s.velocity * ts, s.velocity}; }

// position += velocity * ts + n_p, velocity += n_v, i.i.d. Gaussian per axis.
void predict(ParticleCloud &cloud, double ts, const ProcessNoise &noise, Rng &rng);

struct MeasurementPrediction
{
    double delay = 0.0;
    AngleSet aod;
    AngleSet aoa;
    bool degenerate = false; // a zero-length leg or an undefined azimuth
};

// Delay, AoD (BS toward first bounce) and AoA (user toward last bounce) implied by
// a user / first-bounce / last-bounce hypothesis.
MeasurementPrediction predict_measurement(const MeasurementModel &model, const EntityState &user,
                                          const EntityState &first_bounce, const EntityState &last_bounce,
                                          double virtual_delay = 0.0);

// LoS delay, AoD at the BS and AoA at the user.
MeasurementPrediction predict_los(const MeasurementModel &model, const EntityState &user);

// Observation components consulted by a weighting pass.
enum Component : unsigned
{
    kDelay = 1u << 0,
    kAodAzimuth = 1u << 1,
    kAodElevation = 1u << 2,
    kAoaAzimuth = 1u << 3,
    kAoaElevation = 1u << 4,
    kAod = kAodAzimuth | kAodElevation,
    kAoa = kAoaAzimuth | kAoaElevation,
    kAllComponents = kDelay | kAod | kAoa,
};

// -1/2 sum (r_i / sigma_i)^2 over the selected components; azimuth residuals wrapped.
// Degenerate predictions score -inf.
double log_likelihood(const PathObservation &z, const MeasurementPrediction &h, unsigned components,
                      const MeasurementNoise &noise);

struct WeightOutcome
{
    bool divergent = false;     // every weight underflowed; weights were reset to uniform
    double max_log_weight = 0.0; // log of the largest unnormalized weight
};

// Below this, exp() of every unnormalized weight is zero in double precision.
inline const double kUnderflowLogWeight = std::log(std::numeric_limits<double>::denorm_min());

// Multiplies each weight by exp(log_lik(particle)) and renormalizes. Computed in the log
// domain; falls back to uniform weights when all of them would underflow.
template <class LogLikelihood> WeightOutcome weight(ParticleCloud &cloud, LogLikelihood &&log_lik)
{
    const std::size_t n = cloud.size();
    std::vector<double> logw(n);
    double max_logw = -std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < n; ++c)
    {
        double lw = std::log(cloud.weights[c]) + log_lik(cloud.particles[c]);
        if (std::isnan(lw))
            lw = -std::numeric_limits<double>::infinity();
        logw[c] = lw;
        max_logw = std::max(max_logw, lw);
    }

    WeightOutcome out;
    out.max_log_weight = max_logw;
    if (!(max_logw >= kUnderflowLogWeight))
    {
        std::fill(cloud.weights.begin(), cloud.weights.end(), 1.0 / static_cast<double>(n));
        out.divergent = true;
        return out;
    }

    double total = 0.0;
    for (std::size_t c = 0; c < n; ++c)
    {
        cloud.weights[c] = std::exp(logw[c] - max_logw);
        total += cloud.weights[c];
    }
    for (auto &w : cloud.weights)
        w /= total;
    return out;
}

// Weights against one observation through a measurement function h(particle).
template <class MeasurementFn>
WeightOutcome weight(ParticleCloud &cloud, const PathObservation &z, MeasurementFn &&h, unsigned components,
                     const MeasurementNoise &noise)
{
    return weight(cloud, [&](const EntityState &s) { return log_likelihood(z, h(s), components, noise); });
}

// Systematic resampling to the same particle count; weights reset to 1/C.
ParticleCloud resample(const ParticleCloud &cloud, Rng &rng);

// Highest-weight particle; ties resolve to the lowest index.
EntityState estimate(const ParticleCloud &cloud);

struct TrackerConfig
{
    std::size_t particles = 1000;
    double ts = 0.1; // s
    ProcessNoise process;
    MeasurementNoise measurement;
    double init_position_std = 1.0; // m
    double init_velocity_std = 0.5; // m/s
    double gate_sigmas = 3.0;
    int max_coast_steps = 10;
    double carrier_hz = 28e9;
    bool include_bounce_leg = false;
    std::uint64_t seed = 1;

    void validate() const;
};

struct PathTrack
{
    PathId id;
    int cluster_id = -1;
    bool first_bounce_sensed = true; // false: initialized under the single-bounce hypothesis
    ParticleCloud first_bounce;
    ParticleCloud last_bounce;
    Rng first_bounce_rng;
    Rng last_bounce_rng;
    EntityState first_bounce_estimate;
    EntityState last_bounce_estimate;
    int missed_steps = 0;
    bool updated = false; // observed in the most recent step
};

struct StepReport
{
    int index = 0;
    double time = 0.0;
    bool frame_missing = false;
    bool user_coasted = false;
    bool user_divergent = false;
    std::vector<PathId> initialized;
    std::vector<PathId> init_failed;
    std::vector<PathId> coasted;
    std::vector<PathId> divergent;
    std::vector<PathId> dropped;
};

// Result of placing a path's scatterers from one frame.
struct PathInitialization
{
    EntityState first_bounce;
    EntityState last_bounce;
    bool first_bounce_sensed = false;
};

class Tracker
{
  public:
    Tracker(const TrackerConfig &config, const Vec3 &bs_position, const EntityState &user0, double t0 = 0.0);

    // Places the first bounce from a gated sensing detection (or, failing the gate, on the
    // single-bounce hypothesis) and the last bounce along the AoA ray.
    std::optional<PathInitialization> locate(const PathObservation &z, const ObservationFrame &frame) const;

    // Seeds clouds around the given states with the configured initial spread.
    void seed_track(PathId id, int cluster_id, const EntityState &first_bounce, const EntityState &last_bounce,
                    bool first_bounce_sensed = true);

    // predict -> weight -> estimate -> resample for every entity. Tracks absent from the frame
    // coast; unknown paths are initialized. Throws std::invalid_argument unless
    // frame.time == time() + ts.
    const StepReport &step(const ObservationFrame &frame);

    // Predict-only step for a frame that never arrived.
    const StepReport &coast();

    // Starts a track for every untracked path in a frame taken at time().
    const StepReport &acquire(const ObservationFrame &frame);

    int index() const { return index_; }
    double time() const { return time_; }
    const TrackerConfig &config() const { return config_; }
    const MeasurementModel &model() const { return model_; }
    const EntityState &user_estimate() const { return user_estimate_; }
    const ParticleCloud &user_cloud() const { return user_; }
    const std::map<PathId, PathTrack> &tracks() const { return tracks_; }
    const StepReport &last_report() const { return report_; }

    // Channel parameters implied by the current estimates of every track updated in the
    // latest step, with powers from an exponential power-delay profile.
    std::vector<PathObservation> reconstruct(double tau_decay) const;

  private:
    void start_track(const PathObservation &z, const ObservationFrame &frame);
    void update_track(PathTrack &track, const PathObservation &z, const ObservationFrame &frame);
    ParticleCloud seeded_cloud(const EntityState &centre, double pos_std, double vel_std, Rng &rng) const;
    void begin_step();

    TrackerConfig config_;
    MeasurementModel model_;
    int index_ = 0;
    double time_ = 0.0;
    ParticleCloud user_;
    Rng user_rng_;
    EntityState user_estimate_;
    std::map<PathId, PathTrack> tracks_;
    StepReport report_;
};

// Tracker at frame0.time with the user at user0 and one track per locatable path in frame0.
Tracker initialize(const ObservationFrame &frame0, const Vec3 &bs_position, const EntityState &user0,
                   const TrackerConfig &config);

// Range r >= 0 along unit ray u from `origin` such that |anchor - (origin + r u)| = remaining - r.
// Returns nullopt when no such r exists.
std::optional<double> solve_ray_range(const Vec3 &origin, const Vec3 &u, const Vec3 &anchor, double remaining);

} // namespace isac::tracking

#endif
