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

#include "isac/pipeline.hpp"

#include <benchmark/benchmark.h>

using namespace isac;

static void BM_AngleRoundTrip(benchmark::State &state)
{
    Vec3 d{3.0, -4.0, 1.5};
    for (auto _ : state)
    {
        const auto a = angles_from_displacement(d).angles;
        d = unit_vector_from_angles(a) * 5.0 + Vec3{1e-9, 0, 0};
        benchmark::DoNotOptimize(d);
    }
}
BENCHMARK(BM_AngleRoundTrip);

static void BM_Observe(benchmark::State &state)
{
    const RunConfig cfg;
    const auto scene = pipeline::build_scene(cfg);
    Rng rng(1);
    double t = 0.0;
    for (auto _ : state)
    {
        benchmark::DoNotOptimize(observe(scene, t, cfg.observation_noise(), rng));
        t = t >= 19.9 ? 0.0 : t + 0.1;
    }
}
BENCHMARK(BM_Observe);

static void BM_CommCirAllPairs(benchmark::State &state)
{
    const RunConfig cfg;
    const auto scene = pipeline::build_scene(cfg);
    const auto tx = cfg.tx_array(), rx = cfg.rx_array();
    const auto bank = cfg.polarization_bank();
    for (auto _ : state)
        benchmark::DoNotOptimize(comm::comm_cir(scene, 1.0, tx, rx, cfg.comm_settings(), bank));
}
BENCHMARK(BM_CommCirAllPairs)->Unit(benchmark::kMillisecond);

static void BM_MonostaticCir(benchmark::State &state)
{
    const RunConfig cfg;
    const auto scene = pipeline::build_scene(cfg);
    const auto tx = cfg.tx_array();
    for (auto _ : state)
        benchmark::DoNotOptimize(sensing::monostatic_cir(scene, 1.0, tx, cfg.carrier_hz));
}
BENCHMARK(BM_MonostaticCir);

static void BM_WeightResample(benchmark::State &state)
{
    const auto n = static_cast<std::size_t>(state.range(0));
    Rng rng(2);
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<tracking::EntityState> particles(n);
    for (auto &p : particles)
        p.position = {g(rng), g(rng), g(rng)};
    auto cloud = tracking::ParticleCloud::uniform(particles);
    for (auto _ : state)
    {
        tracking::predict(cloud, 0.1, {}, rng);
        tracking::weight(cloud, [](const tracking::EntityState &s) { return -0.5 * dot(s.position, s.position); });
        benchmark::DoNotOptimize(tracking::estimate(cloud));
        cloud = tracking::resample(cloud, rng);
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * n));
}
BENCHMARK(BM_WeightResample)->Arg(100)->Arg(1000)->Arg(10000);

static void BM_TrackerStep(benchmark::State &state)
{
    RunConfig cfg;
    cfg.tracker.particles = static_cast<std::size_t>(state.range(0));
    const auto scene = pipeline::build_scene(cfg);
    const auto frames = pipeline::simulate_observations(scene, cfg);
    const tracking::EntityState user0{scene.user_start, scene.user_velocity};
    auto tracker = tracking::initialize(frames[0], scene.bs_position, user0, cfg.tracker_config());
    std::size_t k = 1;
    for (auto _ : state)
    {
        if (k == frames.size())
        {
            state.PauseTiming();
            tracker = tracking::initialize(frames[0], scene.bs_position, user0, cfg.tracker_config());
            k = 1;
            state.ResumeTiming();
        }
        benchmark::DoNotOptimize(tracker.step(frames[k++]));
    }
}
BENCHMARK(BM_TrackerStep)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

static void BM_SpreadsFromPaths(benchmark::State &state)
{
    const RunConfig cfg;
    const auto scene = pipeline::build_scene(cfg);
    std::vector<io::PathRecord> paths;
    std::vector<io::DetectionRecord> detections;
    io::flatten(pipeline::simulate_observations(scene, cfg), paths, detections);
    for (auto _ : state)
        benchmark::DoNotOptimize(pipeline::spreads_from_paths(paths));
}
BENCHMARK(BM_SpreadsFromPaths)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
