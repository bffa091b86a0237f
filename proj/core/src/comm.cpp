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

#include "isac/comm.hpp"

#include <stdexcept>

namespace isac::comm
{

using cplx = std::complex<double>;

PolarizedPattern PolarizedPattern::isotropic_vertical()
{
    return {[](const AngleSet &) { return 1.0; }, [](const AngleSet &) { return 0.0; }};
}

PolarizedPattern PolarizedPattern::isotropic_horizontal()
{
    return {[](const AngleSet &) { return 0.0; }, [](const AngleSet &) { return 1.0; }};
}

PolarizationDraw draw_polarization(Rng &rng, double kappa, double mu)
{
    if (!(kappa > 0.0) || !(mu > 0.0))
        throw std::invalid_argument("draw_polarization: kappa and mu must be > 0");
    std::uniform_real_distribution<double> phase(0.0, kTwoPi);
    PolarizationDraw d;
    d.xi_vv = phase(rng);
    d.xi_vh = phase(rng);
    d.xi_hv = phase(rng);
    d.xi_hh = phase(rng);
    d.kappa = kappa;
    d.mu = mu;
    return d;
}

PolarizationBank::PolarizationBank(std::uint64_t seed, double kappa, double mu) : seed_(seed), kappa_(kappa), mu_(mu)
{
    if (!(kappa > 0.0) || !(mu > 0.0))
        throw std::invalid_argument("PolarizationBank: kappa and mu must be > 0");
}

PolarizationDraw PolarizationBank::for_path(PathId id) const
{
    Rng rng = make_stream({seed_, 0x706f6cULL, static_cast<std::uint64_t>(id.first), static_cast<std::uint64_t>(id.last)});
    return draw_polarization(rng, kappa_, mu_);
}

namespace
{

// rx_row * M * tx_col with M a 2x2 complex matrix in row-major order.
cplx bilinear(const PolarizedPattern &rx, const AngleSet &aoa, const cplx (&m)[4], const PolarizedPattern &tx,
              const AngleSet &aod)
{
    const double rv = rx.vertical(aoa), rh = rx.horizontal(aoa);
    const double tv = tx.vertical(aod), th = tx.horizontal(aod);
    return rv * (m[0] * tv + m[1] * th) + rh * (m[2] * tv + m[3] * th);
}

} // namespace

CommTap los_tap(std::size_t p, std::size_t q, const PlanarArray &tx, const PlanarArray &rx,
                const AntennaPatterns &patterns, double carrier_hz, const PolarizationDraw &draw)
{
    const Vec3 tx_ant = tx.element_position(p);
    const Vec3 rx_ant = rx.element_position(q);
    const double length = distance(rx_ant, tx_ant);
    if (length == 0.0)
        throw std::domain_error("los_tap: transmit and receive antennas coincide");

    const AngleSet aod = direction_of(rx.origin() - tx.origin()).angles;
    const AngleSet aoa = direction_of(tx.origin() - rx.origin()).angles;

    const cplx m[4] = {std::polar(1.0, draw.xi_vv), 0.0, 0.0, -std::polar(1.0, draw.xi_hh)};

    CommTap tap;
    tap.tx_index = p;
    tap.rx_index = q;
    tap.kind = TapKind::LoS;
    tap.path = kLosId;
    tap.delay = length / kSpeedOfLight;
    tap.amplitude = bilinear(patterns.rx, aoa, m, patterns.tx, aod) * std::polar(1.0, kTwoPi * carrier_hz * tap.delay);
    return tap;
}

CommTap nlos_tap(std::size_t p, std::size_t q, const PlanarArray &tx, const PlanarArray &rx, const NlosPath &path,
                 const AntennaPatterns &patterns, double carrier_hz, const PolarizationDraw &draw)
{
    const Vec3 tx_ant = tx.element_position(p);
    const Vec3 rx_ant = rx.element_position(q);
    const Vec3 departure = path.first_bounce - tx.origin();
    const Vec3 arrival = path.last_bounce - rx.origin();
    if (norm(departure) == 0.0 || norm(arrival) == 0.0 || distance(path.first_bounce, tx_ant) == 0.0 ||
        distance(path.last_bounce, rx_ant) == 0.0)
        throw std::domain_error("nlos_tap: zero-length propagation leg");

    double length = path_distance(tx_ant, path.first_bounce, path.last_bounce, rx_ant);
    if (path.include_bounce_leg)
        length += distance(path.first_bounce, path.last_bounce);

    const AngleSet aod = direction_of(departure).angles;
    const AngleSet aoa = direction_of(arrival).angles;

    const cplx m[4] = {
        std::polar(1.0, draw.xi_vv),
        std::sqrt(draw.mu / draw.kappa) * std::polar(1.0, draw.xi_vh),
        std::sqrt(1.0 / draw.kappa) * std::polar(1.0, draw.xi_hv),
        std::sqrt(draw.mu) * std::polar(1.0, draw.xi_hh),
    };

    CommTap tap;
    tap.tx_index = p;
    tap.rx_index = q;
    tap.kind = TapKind::NLoS;
    tap.path = path.id;
    tap.delay = length / kSpeedOfLight + path.virtual_delay;
    tap.amplitude = bilinear(patterns.rx, aoa, m, patterns.tx, aod) * std::sqrt(path.power) *
                    std::polar(1.0, kTwoPi * carrier_hz * tap.delay);
    return tap;
}

std::vector<CommTap> combine_rician(std::span<const CommTap> los, std::span<const CommTap> nlos, double k_factor)
{
    if (!(k_factor >= 0.0))
        throw std::invalid_argument("combine_rician: K must be >= 0");
    const double w_los = std::sqrt(k_factor / (k_factor + 1.0));
    const double w_nlos = std::sqrt(1.0 / (k_factor + 1.0));

    std::vector<CommTap> out;
    out.reserve(los.size() + nlos.size());
    for (auto t : los)
    {
        t.amplitude *= w_los;
        out.push_back(t);
    }
    for (auto t : nlos)
    {
        t.amplitude *= w_nlos;
        out.push_back(t);
    }
    return out;
}

CommCir comm_cir(const SceneTruth &scene, double t, const PlanarArray &tx, const PlanarArray &rx,
                 const CommSettings &settings, const PolarizationBank &draws, bool reference_pair_only)
{
    const PlanarArray rx_here = rx.moved_to(scene.user_position(t));
    const auto truth = ground_truth_paths(scene, t);

    std::vector<NlosPath> paths;
    std::vector<PolarizationDraw> path_draws;
    paths.reserve(truth.size());
    for (const auto &p : truth)
    {
        paths.push_back({p.id, p.first_bounce, p.last_bounce, p.virtual_delay, p.power, scene.include_bounce_leg});
        path_draws.push_back(draws.for_path(p.id));
    }
    const PolarizationDraw los_draw = draws.los();

    CommCir cir(tx.element_count(), rx_here.element_count());
    const std::size_t n_rx = reference_pair_only ? 1 : rx_here.element_count();
    const std::size_t n_tx = reference_pair_only ? 1 : tx.element_count();

    std::vector<CommTap> nlos;
    for (std::size_t q = 0; q < n_rx; ++q)
    {
        for (std::size_t p = 0; p < n_tx; ++p)
        {
            const CommTap los = los_tap(p, q, tx, rx_here, settings.patterns, settings.carrier_hz, los_draw);
            nlos.clear();
            for (std::size_t i = 0; i < paths.size(); ++i)
                nlos.push_back(nlos_tap(p, q, tx, rx_here, paths[i], settings.patterns, settings.carrier_hz, path_draws[i]));
            cir.pair(q, p) = combine_rician(std::span(&los, 1), nlos, settings.k_factor);
        }
    }
    return cir;
}

} // namespace isac::comm
