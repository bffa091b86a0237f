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

#include <cmath>
#include <map>
#include <ostream>
#include <stdexcept>

namespace isac::pipeline
{

namespace
{

constexpr std::uint64_t kFrameStream = 0x6672616d;

double sq(double x) { return x * x; }

double rms(double sum_sq, std::size_t n) { return n ? std::sqrt(sum_sq / static_cast<double>(n)) : 0.0; }

} // namespace

SceneTruth build_scene(const RunConfig &cfg)
{
    cfg.validate();
    return generate_scene(cfg.scene_config());
}

std::vector<ObservationFrame> simulate_observations(const SceneTruth &scene, const RunConfig &cfg)
{
    const auto noise = cfg.observation_noise();
    std::vector<ObservationFrame> frames;
    for (int k = 0; k < cfg.frame_count(); ++k)
    {
        if (cfg.is_withheld(k))
            continue;
        Rng rng = make_stream({cfg.seed, kFrameStream, static_cast<std::uint64_t>(k)});
        auto frame = observe(scene, frame_time(cfg, k), noise, rng);
        frame.index = k;
        frames.push_back(std::move(frame));
    }
    return frames;
}

TapTables synthesize_taps(const SceneTruth &scene, const RunConfig &cfg)
{
    const PlanarArray tx = cfg.tx_array();
    const PlanarArray rx = cfg.rx_array();
    const auto settings = cfg.comm_settings();
    const auto bank = cfg.polarization_bank();
    const bool reference_only = cfg.comm_taps == TapExport::ReferencePair;

    TapTables out;
    for (int k = 0; k < cfg.frame_count(); ++k)
    {
        const double t = frame_time(cfg, k);
        for (const auto &tap : sensing::monostatic_cir(scene, t, tx, cfg.carrier_hz))
            out.sensing.push_back({t, tap.scatterer_id, tap.delay, tap.doppler, tap.gain});

        const auto cir = comm::comm_cir(scene, t, tx, rx, settings, bank, reference_only);
        const std::size_t n_rx = reference_only ? 1 : cir.rx_count();
        const std::size_t n_tx = reference_only ? 1 : cir.tx_count();
        for (std::size_t q = 0; q < n_rx; ++q)
            for (std::size_t p = 0; p < n_tx; ++p)
                for (const auto &tap : cir.pair(q, p))
                    out.comm.push_back(
                        {t, q, p, tap.kind == comm::TapKind::LoS, tap.path, tap.delay, tap.amplitude});
    }
    return out;
}

namespace
{

std::optional<tracking::EntityState> scatterer_truth(const SceneTruth &scene, int id, double t)
{
    const auto &s = scene.scatterer(id);
    if (!s.alive_at(t))
        return std::nullopt;
    return tracking::EntityState{s.position_at(t), s.velocity};
}

struct ErrorAccumulator
{
    double sum_sq = 0.0;
    std::size_t n = 0;

    void add(const Vec3 &estimate, const Vec3 &truth)
    {
        sum_sq += sq(norm(estimate - truth));
        ++n;
    }
    double value() const { return rms(sum_sq, n); }
};

} // namespace

TrackingResult run_tracking(const SceneTruth &scene, std::span<const ObservationFrame> frames, const RunConfig &cfg)
{
    if (frames.empty() || frames.front().index != 0)
        throw std::invalid_argument("run_tracking: frame 0 is required to initialize the tracker");
    const double ts = cfg.tracker.ts;
    for (std::size_t i = 0; i < frames.size(); ++i)
    {
        const auto &f = frames[i];
        if (i > 0 && f.index <= frames[i - 1].index)
            throw std::invalid_argument("run_tracking: frames must be sorted by index without duplicates");
        if (std::abs(f.time - f.index * ts) > 1e-9 + 1e-6 * ts)
            throw std::invalid_argument("run_tracking: frame " + std::to_string(f.index) + " at t=" +
                                        io::format_double(f.time) + " does not match Ts=" + io::format_double(ts));
    }

    const auto tcfg = cfg.tracker_config();
    const ObservationNoise exact{0.0, 0.0, 0.0, cfg.carrier_hz};
    Rng unused = make_stream({0});

    TrackingResult result;
    auto &summary = result.summary;
    ErrorAccumulator user_acc, fb_acc, lb_acc;

    const auto &f0 = frames.front();
    const tracking::EntityState user0{scene.user_position(f0.time), scene.user_velocity};
    tracking::Tracker tracker = tracking::initialize(f0, scene.bs_position, user0, tcfg);

    auto record = [&](int k, double t, bool observed, const tracking::StepReport &report)
    {
        const tracking::EntityState user_truth{scene.user_position(t), scene.user_velocity};
        result.trajectory.push_back({k, t, "user", io::EntityKind::User, tracker.user_estimate(), user_truth});
        user_acc.add(tracker.user_estimate().position, user_truth.position);

        for (const auto &[id, track] : tracker.tracks())
        {
            const auto name = io::format_path_id(id);
            const auto fb_truth = scatterer_truth(scene, id.first, t);
            const auto lb_truth = scatterer_truth(scene, id.last, t);
            result.trajectory.push_back(
                {k, t, name, io::EntityKind::FirstBounce, track.first_bounce_estimate, fb_truth});
            result.trajectory.push_back({k, t, name, io::EntityKind::LastBounce, track.last_bounce_estimate, lb_truth});
            if (fb_truth)
                fb_acc.add(track.first_bounce_estimate.position, fb_truth->position);
            if (lb_truth)
                lb_acc.add(track.last_bounce_estimate.position, lb_truth->position);
        }

        summary.divergence_events += static_cast<int>(report.divergent.size()) + (report.user_divergent ? 1 : 0);
        summary.init_failures += static_cast<int>(report.init_failed.size());
        summary.tracks_dropped += static_cast<int>(report.dropped.size());

        if (!observed)
            return;
        for (const auto &p : tracker.reconstruct(scene.tau_decay))
            result.model_paths.push_back({k, t, p});
        const auto truth = observe(scene, t, exact, unused);
        for (const auto &p : truth.comm_paths)
            result.oracle_paths.push_back({k, t, p});
    };

    record(0, f0.time, true, tracker.last_report());

    const int last_index = std::max(frames.back().index, cfg.frame_count() - 1);
    std::size_t next = 1;
    for (int k = 1; k <= last_index; ++k)
    {
        if (next < frames.size() && frames[next].index == k)
        {
            const auto &report = tracker.step(frames[next]);
            record(k, frames[next].time, true, report);
            ++next;
        }
        else
        {
            const auto &report = tracker.coast();
            if (!summary.coast_intervals.empty() && summary.coast_intervals.back().last == k - 1)
                summary.coast_intervals.back().last = k;
            else
                summary.coast_intervals.push_back({k, k});
            record(k, tracker.time(), false, report);
        }
        ++summary.steps;
    }

    const double t_end = tracker.time();
    summary.final_time = t_end;
    summary.user_final_error = norm(tracker.user_estimate().position - scene.user_position(t_end));
    summary.final_errors.push_back({"user", io::EntityKind::User, summary.user_final_error});
    ErrorAccumulator fb_final, lb_final;
    for (const auto &[id, track] : tracker.tracks())
    {
        const auto name = io::format_path_id(id);
        if (const auto truth = scatterer_truth(scene, id.first, t_end))
        {
            fb_final.add(track.first_bounce_estimate.position, truth->position);
            summary.final_errors.push_back({name, io::EntityKind::FirstBounce,
                                            norm(track.first_bounce_estimate.position - truth->position)});
        }
        if (const auto truth = scatterer_truth(scene, id.last, t_end))
        {
            lb_final.add(track.last_bounce_estimate.position, truth->position);
            summary.final_errors.push_back({name, io::EntityKind::LastBounce,
                                            norm(track.last_bounce_estimate.position - truth->position)});
        }
    }
    summary.final_tracks = tracker.tracks().size();
    summary.fb_final_rmse = fb_final.value();
    summary.lb_final_rmse = lb_final.value();
    summary.user_run_rmse = user_acc.value();
    summary.fb_run_rmse = fb_acc.value();
    summary.lb_run_rmse = lb_acc.value();
    return result;
}

void write_summary(std::ostream &os, const TrackingSummary &s)
{
    using io::format_double;
    os << "# isacsim:tracking_summary v1\n";
    os << "steps " << s.steps << '\n';
    os << "final_time " << format_double(s.final_time) << '\n';
    os << "final_tracks " << s.final_tracks << '\n';
    os << "user_final_error_m " << format_double(s.user_final_error) << '\n';
    os << "fb_final_rmse_m " << format_double(s.fb_final_rmse) << '\n';
    os << "lb_final_rmse_m " << format_double(s.lb_final_rmse) << '\n';
    os << "user_run_rmse_m " << format_double(s.user_run_rmse) << '\n';
    os << "fb_run_rmse_m " << format_double(s.fb_run_rmse) << '\n';
    os << "lb_run_rmse_m " << format_double(s.lb_run_rmse) << '\n';
    os << "divergence_events " << s.divergence_events << '\n';
    os << "init_failures " << s.init_failures << '\n';
    os << "tracks_dropped " << s.tracks_dropped << '\n';
    os << "coast_intervals";
    if (s.coast_intervals.empty())
        os << " none";
    for (const auto &c : s.coast_intervals)
        os << ' ' << c.first << '-' << c.last;
    os << '\n';
    for (const auto &e : s.final_errors)
    {
        const char *kind = e.kind == io::EntityKind::User ? "user" : e.kind == io::EntityKind::FirstBounce ? "FB" : "LB";
        os << "final_error " << e.entity_id << ' ' << kind << ' ' << format_double(e.error) << '\n';
    }
}

// ---------- spreads ----------

std::vector<io::SpreadRecord> spreads_from_paths(std::span<const io::PathRecord> rows)
{
    std::map<int, std::pair<double, std::vector<PathObservation>>> by_frame;
    for (const auto &r : rows)
    {
        if (r.path.id == kLosId)
            continue;
        auto &slot = by_frame[r.k];
        slot.first = r.t;
        slot.second.push_back(r.path);
    }
    std::vector<io::SpreadRecord> out;
    out.reserve(by_frame.size());
    for (const auto &[k, slot] : by_frame)
        out.push_back({slot.first, stats::all_spreads(stats::ensemble_from(slot.second))});
    return out;
}

std::vector<io::SpreadRecord> spreads_from_taps(std::span<const io::CommTapRecord> rows)
{
    constexpr double nan = std::numeric_limits<double>::quiet_NaN();
    std::map<double, stats::PathEnsemble> by_time;
    for (const auto &r : rows)
    {
        if (r.los || r.q != 0 || r.p != 0)
            continue;
        by_time[r.t].push_back({std::norm(r.amplitude), r.delay, {}, {}});
    }
    std::vector<io::SpreadRecord> out;
    for (const auto &[t, e] : by_time)
    {
        double total = 0.0;
        for (const auto &x : e)
            total += x.power;
        if (!(total > 0.0))
            continue;
        out.push_back({t, {stats::delay_spread(e), nan, nan, nan, nan}});
    }
    return out;
}

std::vector<Series> spread_series(std::span<const io::SpreadRecord> rows)
{
    using Getter = double (*)(const stats::SpreadSet &);
    const std::pair<const char *, Getter> quantities[] = {
        {"delay_spread", [](const stats::SpreadSet &s) { return s.delay; }},
        {"aod_az_spread", [](const stats::SpreadSet &s) { return s.aod_azimuth; }},
        {"aod_el_spread", [](const stats::SpreadSet &s) { return s.aod_elevation; }},
        {"aoa_az_spread", [](const stats::SpreadSet &s) { return s.aoa_azimuth; }},
        {"aoa_el_spread", [](const stats::SpreadSet &s) { return s.aoa_elevation; }},
    };
    std::vector<Series> out;
    if (rows.empty())
        return out;
    for (const auto &[name, get] : quantities)
    {
        Series s{name, {}};
        bool finite = true;
        for (const auto &r : rows)
        {
            const double v = get(r.spreads);
            finite = finite && std::isfinite(v);
            s.values.push_back(v);
        }
        if (finite)
            out.push_back(std::move(s));
    }
    return out;
}

std::vector<io::KsRecord> compare_spreads(std::span<const io::SpreadRecord> a, std::span<const io::SpreadRecord> b)
{
    const auto sa = spread_series(a);
    const auto sb = spread_series(b);
    if (sa.empty() || sb.empty())
        throw std::invalid_argument("compare: a spread table has no complete quantity");
    bool same = sa.size() == sb.size();
    for (std::size_t i = 0; same && i < sa.size(); ++i)
        same = sa[i].quantity == sb[i].quantity;
    if (!same)
        throw std::invalid_argument("compare: the two runs report different spread quantities");

    std::vector<io::KsRecord> out;
    for (std::size_t i = 0; i < sa.size(); ++i)
    {
        const stats::EmpiricalCdf ca(sa[i].values), cb(sb[i].values);
        out.push_back({sa[i].quantity, stats::ks_distance(ca, cb), ca.size(), cb.size()});
    }
    return out;
}

} // namespace isac::pipeline
