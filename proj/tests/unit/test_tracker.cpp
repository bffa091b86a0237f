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

#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <stdexcept>

using namespace isac;
using namespace isac::tracking;

namespace
{

ParticleCloud cloud_of(std::vector<Vec3> positions)
{
    std::vector<EntityState> states;
    for (const auto &p : positions)
        states.push_back({p, {}});
    return ParticleCloud::uniform(std::move(states));
}

double weight_sum(const ParticleCloud &c)
{
    double s = 0.0;
    for (double w : c.weights)
        s += w;
    return s;
}

bool contains(const std::vector<EntityState> &pool, const EntityState &s)
{
    return std::find(pool.begin(), pool.end(), s) != pool.end();
}

// BS at the origin, one single-bounce scatterer, user on the x axis.
struct Toy
{
    MeasurementModel model{{0, 0, 0}, false};
    EntityState user{{6, 8, 0}, {}};
};

TrackerConfig quiet_config()
{
    TrackerConfig cfg;
    cfg.particles = 50;
    cfg.process = {0.0, 0.0};
    cfg.init_position_std = 0.0;
    cfg.init_velocity_std = 0.0;
    cfg.measurement = {1e-12, 1e-9};
    return cfg;
}

} // namespace

TEST(Predict, ZeroNoiseCases)
{
    Rng rng(1);
    ParticleCloud c = ParticleCloud::uniform({{{0, 0, 0}, {1, 0, 0}}, {{2, 2, 2}, {}}});
    predict(c, 0.1, {0.0, 0.0}, rng);
    EXPECT_EQ(c.particles[0].position, (Vec3{0.1, 0, 0}));
    EXPECT_EQ(c.particles[0].velocity, (Vec3{1, 0, 0}));
    EXPECT_EQ(c.particles[1].position, (Vec3{2, 2, 2}));
}

TEST(Predict, SemigroupAndLinearity)
{
    Rng rng(2);
    std::uniform_real_distribution<double> u(-10, 10);
    for (int i = 0; i < 200; ++i)
    {
        const EntityState s{{u(rng), u(rng), u(rng)}, {u(rng), u(rng), u(rng)}};
        ParticleCloud twice = ParticleCloud::uniform({s}), once = ParticleCloud::uniform({s});
        predict(twice, 0.1, {0.0, 0.0}, rng);
        predict(twice, 0.1, {0.0, 0.0}, rng);
        predict(once, 0.2, {0.0, 0.0}, rng);
        EXPECT_NEAR(distance(twice.particles[0].position, once.particles[0].position), 0.0, 1e-12);

        const double a = u(rng);
        ParticleCloud scaled = ParticleCloud::uniform({{s.position * a, s.velocity * a}});
        ParticleCloud base = ParticleCloud::uniform({s});
        predict(scaled, 0.3, {0.0, 0.0}, rng);
        predict(base, 0.3, {0.0, 0.0}, rng);
        EXPECT_NEAR(distance(scaled.particles[0].position, base.particles[0].position * a), 0.0, 1e-12);
        EXPECT_NEAR(distance(scaled.particles[0].velocity, base.particles[0].velocity * a), 0.0, 1e-12);
    }
}

TEST(Predict, NoisePreservesCount)
{
    Rng rng(3);
    ParticleCloud c = cloud_of(std::vector<Vec3>(37));
    predict(c, 0.1, {}, rng);
    EXPECT_EQ(c.size(), 37u);
    EXPECT_EQ(c.weights.size(), 37u);
    EXPECT_NE(c.particles[0].position, c.particles[1].position);
}

TEST(PredictMeasurement, HandCase)
{
    const Toy toy;
    const EntityState scatterer{{3, 4, 0}, {}};
    const auto h = predict_measurement(toy.model, toy.user, scatterer, scatterer);
    EXPECT_FALSE(h.degenerate);
    EXPECT_NEAR(h.delay, 3.33564095198152050e-8, 1e-22);
    EXPECT_NEAR(h.aod.azimuth(), 0.927295218001612232, 1e-15);
    EXPECT_EQ(h.aod.elevation(), 0.0);
    EXPECT_NEAR(wrap_angle(h.aoa.azimuth() - (0.927295218001612232 - kPi)), 0.0, 1e-15);

    EXPECT_NEAR(predict_measurement(toy.model, toy.user, scatterer, scatterer, 4e-9).delay,
                3.33564095198152050e-8 + 4e-9, 1e-22);
}

TEST(PredictMeasurement, AxisAndZenith)
{
    const Toy toy;
    const EntityState on_x{{7, 0, 0}, {}};
    const auto h = predict_measurement(toy.model, toy.user, on_x, on_x);
    EXPECT_EQ(h.aod.azimuth(), 0.0);
    EXPECT_EQ(h.aod.elevation(), 0.0);

    const EntityState above{{6, 8, 12}, {}};
    const auto z = predict_measurement(toy.model, toy.user, on_x, above);
    EXPECT_TRUE(z.degenerate);
    EXPECT_DOUBLE_EQ(z.aoa.elevation(), kPi / 2);
}

TEST(PredictMeasurement, BounceLegOption)
{
    MeasurementModel model{{0, 0, 0}, false};
    const EntityState user{{10, 0, 0}, {}}, fb{{0, 5, 0}, {}}, lb{{10, 5, 0}, {}};
    EXPECT_NEAR(predict_measurement(model, user, fb, lb).delay * kSpeedOfLight, 10.0, 1e-12);
    model.include_bounce_leg = true;
    EXPECT_NEAR(predict_measurement(model, user, fb, lb).delay * kSpeedOfLight, 20.0, 1e-12);
}

TEST(PredictLos, Geometry)
{
    const Toy toy;
    const auto h = predict_los(toy.model, toy.user);
    EXPECT_NEAR(h.delay * kSpeedOfLight, 10.0, 1e-12);
    EXPECT_NEAR(h.aod.azimuth(), std::atan2(8.0, 6.0), 1e-15);
    EXPECT_NEAR(wrap_angle(h.aoa.azimuth() - std::atan2(-8.0, -6.0)), 0.0, 1e-15);
}

TEST(Weight, PerfectParticleIsHeaviest)
{
    const Toy toy;
    const EntityState truth{{3, 4, 0}, {}};
    const auto z_pred = predict_measurement(toy.model, toy.user, truth, truth);
    const PathObservation z{{0, 0}, 0, z_pred.delay, z_pred.aod, z_pred.aoa, 1.0};
    auto h = [&](const EntityState &s) { return predict_measurement(toy.model, toy.user, s, s); };

    ParticleCloud c = cloud_of({{3.5, 4, 0}, {3, 4, 0}, {2, 4.2, 0.3}});
    const auto out = weight(c, z, h, kAllComponents, {});
    EXPECT_FALSE(out.divergent);
    EXPECT_EQ(std::max_element(c.weights.begin(), c.weights.end()) - c.weights.begin(), 1);
    EXPECT_NEAR(weight_sum(c), 1.0, 1e-12);

    ParticleCloud two = cloud_of({{3, 4, 0}, {-40, 30, 10}});
    weight(two, z, h, kAllComponents, {});
    EXPECT_NEAR(two.weights[0], 1.0, 1e-15);
    EXPECT_NEAR(two.weights[1], 0.0, 1e-15);

    ParticleCloud same = cloud_of({{1, 1, 1}, {1, 1, 1}, {1, 1, 1}, {1, 1, 1}});
    weight(same, z, h, kAllComponents, {});
    for (double w : same.weights)
        EXPECT_DOUBLE_EQ(w, 0.25);
}

TEST(Weight, UnderflowFallsBackToUniform)
{
    ParticleCloud c = cloud_of({{0, 0, 0}, {1, 0, 0}, {2, 0, 0}});
    c.weights = {0.7, 0.2, 0.1};
    const auto out = weight(c, [](const EntityState &s) { return -1e6 - s.position.x; });
    EXPECT_TRUE(out.divergent);
    for (double w : c.weights)
        EXPECT_DOUBLE_EQ(w, 1.0 / 3.0);

    const auto nan = weight(c, [](const EntityState &) { return std::nan(""); });
    EXPECT_TRUE(nan.divergent);
}

TEST(Weight, LargeButFiniteLogLikelihoodsNormalize)
{
    ParticleCloud c = cloud_of({{0, 0, 0}, {1, 0, 0}});
    const auto out = weight(c, [](const EntityState &s) { return -500.0 - s.position.x; });
    EXPECT_FALSE(out.divergent);
    EXPECT_NEAR(c.weights[0], 1.0 / (1.0 + std::exp(-1.0)), 1e-15);
}

TEST(LogLikelihood, DegenerateIsMinusInfinity)
{
    MeasurementPrediction h;
    h.degenerate = true;
    EXPECT_EQ(log_likelihood({}, h, kAllComponents, {}), -std::numeric_limits<double>::infinity());
}

TEST(LogLikelihood, AzimuthResidualIsWrapped)
{
    PathObservation z;
    z.aod = {kPi - 0.01, 0.0};
    MeasurementPrediction h;
    h.aod = {-kPi + 0.01, 0.0};
    const MeasurementNoise noise{1e-9, 0.01};
    EXPECT_NEAR(log_likelihood(z, h, kAodAzimuth, noise), -0.5 * 4.0, 1e-9);
}

TEST(Resample, Cases)
{
    Rng rng(4);
    ParticleCloud c = cloud_of({{0, 0, 0}, {1, 0, 0}, {2, 0, 0}, {3, 0, 0}});
    c.weights = {0.0, 0.0, 1.0, 0.0};
    const auto r = resample(c, rng);
    ASSERT_EQ(r.size(), 4u);
    for (const auto &p : r.particles)
        EXPECT_EQ(p.position, (Vec3{2, 0, 0}));
    for (double w : r.weights)
        EXPECT_DOUBLE_EQ(w, 0.25);

    ParticleCloud u = cloud_of({{0, 0, 0}, {1, 0, 0}, {2, 0, 0}, {3, 0, 0}, {4, 0, 0}});
    const auto ru = resample(u, rng);
    for (std::size_t i = 0; i < u.size(); ++i)
        EXPECT_EQ(std::count(ru.particles.begin(), ru.particles.end(), u.particles[i]), 1);
}

TEST(ResampleProperty, CountNormalizationAndSubset)
{
    Rng rng(5);
    std::uniform_int_distribution<int> size(1, 40);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 2000; ++trial)
    {
        const int n = size(rng);
        std::vector<Vec3> pos;
        for (int i = 0; i < n; ++i)
            pos.push_back({static_cast<double>(i), u(rng), 0.0});
        ParticleCloud c = cloud_of(pos);
        for (auto &w : c.weights)
            w = u(rng) < 0.3 ? 0.0 : u(rng);
        c.weights[0] += 1e-3;
        double total = weight_sum(c);
        for (auto &w : c.weights)
            w /= total;

        const auto r = resample(c, rng);
        ASSERT_EQ(r.size(), c.size());
        ASSERT_NEAR(weight_sum(r), 1.0, 1e-12);
        for (const auto &p : r.particles)
        {
            ASSERT_TRUE(contains(c.particles, p));
            const auto idx = static_cast<std::size_t>(p.position.x);
            ASSERT_GT(c.weights[idx], 0.0);
        }
    }
}

TEST(Estimate, Cases)
{
    ParticleCloud one = cloud_of({{5, 5, 5}});
    EXPECT_EQ(estimate(one).position, (Vec3{5, 5, 5}));

    ParticleCloud two = cloud_of({{1, 0, 0}, {2, 0, 0}});
    two.weights = {0.1, 0.9};
    EXPECT_EQ(estimate(two).position, (Vec3{2, 0, 0}));

    ParticleCloud tie = cloud_of({{1, 0, 0}, {2, 0, 0}, {3, 0, 0}});
    tie.weights = {0.2, 0.4, 0.4};
    EXPECT_EQ(estimate(tie).position, (Vec3{2, 0, 0}));
}

TEST(EstimateProperty, ScaleInvariant)
{
    Rng rng(6);
    std::uniform_real_distribution<double> u(0.0, 1.0), scale(1e-6, 1e6);
    for (int trial = 0; trial < 500; ++trial)
    {
        ParticleCloud c = cloud_of(std::vector<Vec3>(10));
        for (std::size_t i = 0; i < c.size(); ++i)
        {
            c.particles[i].position.x = static_cast<double>(i);
            c.weights[i] = u(rng);
        }
        const auto before = estimate(c);
        const double s = scale(rng);
        for (auto &w : c.weights)
            w *= s;
        EXPECT_EQ(estimate(c), before);
    }
}

TEST(SolveRayRange, HandCase)
{
    const auto r = solve_ray_range({10, 0, 0}, {0, 1, 0}, {0, 5, 0}, 15.0);
    ASSERT_TRUE(r.has_value());
    EXPECT_NEAR(*r, 5.0, 1e-12);
    EXPECT_FALSE(solve_ray_range({10, 0, 0}, {0, 1, 0}, {0, 5, 0}, 5.0).has_value());
}

TEST(SolveRayRange, SingleBounceClosure)
{
    // |P - bs| + |P - user| = c tau with P on the ray from the user.
    const Vec3 bs{0, 0, 10}, user{-60, 5, 1.5}, p{-30, 12, 6};
    const double total = distance(p, bs) + distance(p, user);
    const Vec3 u = (p - user) / distance(p, user);
    const auto r = solve_ray_range(user, u, bs, total);
    ASSERT_TRUE(r.has_value());
    EXPECT_NEAR(*r, distance(p, user), 1e-9);
}

TEST(TrackerConfig, Validate)
{
    TrackerConfig cfg;
    EXPECT_NO_THROW(cfg.validate());
    cfg.particles = 0;
    EXPECT_THROW(cfg.validate(), std::invalid_argument);
    cfg = {};
    cfg.ts = 0.0;
    EXPECT_THROW(cfg.validate(), std::invalid_argument);
    cfg = {};
    cfg.measurement.sigma_delay = 0.0;
    EXPECT_THROW(cfg.validate(), std::invalid_argument);
}

namespace
{

ObservationFrame toy_frame(double t, const Vec3 &bs, const Vec3 &user, const Vec3 &fb, const Vec3 &lb, PathId id,
                           bool with_detection)
{
    const MeasurementModel model{bs, false};
    const EntityState u{user, {}};
    ObservationFrame f;
    f.time = t;
    const auto los = predict_los(model, u);
    f.los = PathObservation{kLosId, -1, los.delay, los.aod, los.aoa, 1.0};
    const auto h = predict_measurement(model, u, {fb, {}}, {lb, {}});
    f.comm_paths.push_back({id, 0, h.delay, h.aod, h.aoa, 1.0});
    if (with_detection)
    {
        SensingDetection d;
        d.scatterer_id = id.first;
        d.round_trip_delay = 2.0 * distance(fb, bs) / kSpeedOfLight;
        d.angle = direction_of(fb - bs).angles;
        f.sensing.push_back(d);
    }
    return f;
}

} // namespace

TEST(Initialize, SensedFirstBounceAndLastBounceRay)
{
    const Vec3 bs{0, 0, 0}, user{10, 0, 0}, fb{0, 5, 0}, lb{10, 5, 0};
    const auto frame = toy_frame(0.0, bs, user, fb, lb, {0, 1}, true);
    auto cfg = quiet_config();
    cfg.include_bounce_leg = false;
    const auto tracker = initialize(frame, bs, {user, {}}, cfg);
    ASSERT_EQ(tracker.tracks().size(), 1u);
    const auto &track = tracker.tracks().begin()->second;
    EXPECT_TRUE(track.first_bounce_sensed);
    EXPECT_NEAR(distance(track.first_bounce_estimate.position, fb), 0.0, 1e-12);
    EXPECT_NEAR(distance(track.last_bounce_estimate.position, lb), 0.0, 1e-9);
}

TEST(Initialize, BounceLegHandCase)
{
    // Path length including the bounce leg: 5 + 10 + 5 = 20 m, as in the ray-range example.
    const Vec3 bs{0, 0, 0}, user{10, 0, 0}, fb{0, 5, 0}, lb{10, 5, 0};
    auto frame = toy_frame(0.0, bs, user, fb, lb, {0, 1}, true);
    frame.comm_paths[0].delay = 20.0 / kSpeedOfLight;
    auto cfg = quiet_config();
    cfg.include_bounce_leg = true;
    const auto tracker = initialize(frame, bs, {user, {}}, cfg);
    ASSERT_EQ(tracker.tracks().size(), 1u);
    EXPECT_NEAR(distance(tracker.tracks().begin()->second.last_bounce_estimate.position, lb), 0.0, 1e-9);
}

TEST(Initialize, WithoutEchoFallsBackToSingleBounce)
{
    const Vec3 bs{0, 0, 10}, user{-50, 5, 1.5}, p{-25, 12, 6};
    const auto frame = toy_frame(0.0, bs, user, p, p, {3, 3}, false);
    const auto tracker = initialize(frame, bs, {user, {}}, quiet_config());
    ASSERT_EQ(tracker.tracks().size(), 1u);
    const auto &track = tracker.tracks().begin()->second;
    EXPECT_FALSE(track.first_bounce_sensed);
    EXPECT_NEAR(distance(track.first_bounce_estimate.position, p), 0.0, 1e-9);
    EXPECT_EQ(track.first_bounce_estimate.position, track.last_bounce_estimate.position);
}

TEST(Initialize, ImpossibleDelayIsAnInitFailure)
{
    const Vec3 bs{0, 0, 10}, user{-50, 5, 1.5}, p{-25, 12, 6};
    auto frame = toy_frame(0.0, bs, user, p, p, {3, 3}, false);
    frame.comm_paths[0].delay = 0.5 * distance(bs, user) / kSpeedOfLight;
    const auto tracker = initialize(frame, bs, {user, {}}, quiet_config());
    EXPECT_TRUE(tracker.tracks().empty());
    ASSERT_EQ(tracker.last_report().init_failed.size(), 1u);
}

TEST(Step, FixedPointAtZeroNoise)
{
    const Vec3 bs{0, 0, 10};
    const EntityState user{{-50, 5, 1.5}, {1, 0.2, 0}}, fb{{-20, 3, 4}, {0.3, -0.1, 0}},
        lb{{-40, 20, 3}, {-0.2, 0.4, 0}};
    auto at = [](const EntityState &s, double t) { return s.position + s.velocity * t; };

    auto cfg = quiet_config();
    Tracker tracker(cfg, bs, user);
    tracker.seed_track({0, 1}, 0, fb, lb);
    for (int k = 1; k <= 50; ++k)
    {
        const double t = k * cfg.ts;
        const auto frame = toy_frame(t, bs, at(user, t), at(fb, t), at(lb, t), {0, 1}, true);
        const auto &report = tracker.step(frame);
        EXPECT_TRUE(report.divergent.empty());
        const auto &track = tracker.tracks().at({0, 1});
        ASSERT_LT(distance(track.first_bounce_estimate.position, at(fb, t)), 1e-6) << k;
        ASSERT_LT(distance(track.last_bounce_estimate.position, at(lb, t)), 1e-6) << k;
        ASSERT_LT(distance(tracker.user_estimate().position, at(user, t)), 1e-6) << k;
    }
}

TEST(Step, CoastingExtrapolatesAndDrops)
{
    const Vec3 bs{0, 0, 10};
    const EntityState user{{-50, 5, 1.5}, {1, 0, 0}}, fb{{-20, 3, 4}, {0.5, 0, 0}}, lb{{-40, 20, 3}, {0, 1, 0}};
    auto cfg = quiet_config();
    cfg.max_coast_steps = 3;
    Tracker tracker(cfg, bs, user);
    tracker.seed_track({0, 1}, 0, fb, lb);

    for (int k = 1; k <= 3; ++k)
    {
        ObservationFrame empty;
        empty.time = k * cfg.ts;
        const auto &report = tracker.step(empty);
        EXPECT_TRUE(report.user_coasted);
        ASSERT_EQ(report.coasted.size(), 1u);
        const auto &track = tracker.tracks().at({0, 1});
        EXPECT_NEAR(distance(track.first_bounce_estimate.position, fb.position + fb.velocity * (k * cfg.ts)), 0.0, 1e-12);
        EXPECT_NEAR(distance(track.last_bounce_estimate.position, lb.position + lb.velocity * (k * cfg.ts)), 0.0, 1e-12);
        EXPECT_FALSE(track.updated);
    }
    const auto &report = tracker.coast();
    EXPECT_TRUE(report.frame_missing);
    ASSERT_EQ(report.dropped.size(), 1u);
    EXPECT_TRUE(tracker.tracks().empty());
    EXPECT_NEAR(tracker.time(), 0.4, 1e-12);
    EXPECT_EQ(tracker.index(), 4);
}

TEST(Step, RejectsWrongFrameTime)
{
    Tracker tracker(quiet_config(), {0, 0, 10}, {{-50, 5, 1.5}, {}});
    ObservationFrame f;
    f.time = 0.25;
    EXPECT_THROW(tracker.step(f), std::invalid_argument);
    f.time = 0.1;
    EXPECT_NO_THROW(tracker.step(f));
}

TEST(Step, NewPathsStartTracks)
{
    const Vec3 bs{0, 0, 10}, user{-50, 5, 1.5}, p{-25, 12, 6};
    Tracker tracker(quiet_config(), bs, {user, {}});
    const auto &report = tracker.step(toy_frame(0.1, bs, user, p, p, {2, 2}, true));
    ASSERT_EQ(report.initialized.size(), 1u);
    EXPECT_EQ(report.initialized[0], (PathId{2, 2}));
    EXPECT_TRUE(tracker.tracks().at({2, 2}).updated);
}

TEST(Reconstruct, UsesEstimatesAndExponentialPowers)
{
    const Vec3 bs{0, 0, 10}, user{-50, 5, 1.5};
    Tracker tracker(quiet_config(), bs, {user, {}});
    const EntityState a{{-25, 12, 6}, {}}, b{{-10, -20, 3}, {}};
    tracker.seed_track({0, 0}, 0, a, a);
    tracker.seed_track({1, 1}, 1, b, b);
    const auto paths = tracker.reconstruct(100e-9);
    ASSERT_EQ(paths.size(), 2u);
    const auto h = predict_measurement(tracker.model(), tracker.user_estimate(), a, a);
    EXPECT_EQ(paths[0].delay, h.delay);
    EXPECT_EQ(paths[0].aod, h.aod);
    EXPECT_NEAR(paths[0].power + paths[1].power, 1.0, 1e-15);
}
