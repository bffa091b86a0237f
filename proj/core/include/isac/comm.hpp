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

#ifndef ISAC_COMM_HPP
#define ISAC_COMM_HPP

#include "isac/random.hpp"
#include "isac/scene.hpp"
#include "isac/sensing.hpp"

#include <complex>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace isac::comm
{

// Vertical and horizontal field patterns of one antenna element.
struct PolarizedPattern
{
    std::function<double(const AngleSet &)> vertical;
    std::function<double(const AngleSet &)> horizontal;

    static PolarizedPattern isotropic_vertical();
    static PolarizedPattern isotropic_horizontal();
};

// Per-path polarization parameters. Phases in [0, 2pi); kappa is the linear
// cross-polarization power ratio, mu the co-polarization imbalance.
struct PolarizationDraw
{
    double xi_vv = 0.0;
    double xi_vh = 0.0;
    double xi_hv = 0.0;
    double xi_hh = 0.0;
    double kappa = 1.0;
    double mu = 1.0;
};

PolarizationDraw draw_polarization(Rng &rng, double kappa, double mu);

// Reproducible draws keyed by path id: the same path always gets the same phases,
// independent of the order in which paths are synthesized.
class PolarizationBank
{
  public:
    PolarizationBank(std::uint64_t seed, double kappa, double mu);
    PolarizationDraw los() const { return for_path(kLosId); }
    PolarizationDraw for_path(PathId id) const;

  private:
    std::uint64_t seed_;
    double kappa_;
    double mu_;
};

enum class TapKind
{
    LoS,
    NLoS
};

struct CommTap
{
    std::size_t tx_index = 0; // p
    std::size_t rx_index = 0; // q
    std::complex<double> amplitude;
    double delay = 0.0; // s
    TapKind kind = TapKind::LoS;
    PathId path = kLosId;
};

struct AntennaPatterns
{
    PolarizedPattern tx = PolarizedPattern::isotropic_vertical();
    PolarizedPattern rx = PolarizedPattern::isotropic_vertical();
};

// LoS tap between tx element p and rx element q (rx array already placed at the user).
// Throws std::domain_error when the two elements coincide.
CommTap los_tap(std::size_t p, std::size_t q, const PlanarArray &tx, const PlanarArray &rx,
                const AntennaPatterns &patterns, double carrier_hz, const PolarizationDraw &draw);

struct NlosPath
{
    PathId id;
    Vec3 first_bounce;
    Vec3 last_bounce;
    double virtual_delay = 0.0;
    double power = 0.0;
    bool include_bounce_leg = false;
};

// NLoS tap between tx element p and rx element q through the path's scatterers.
// Departure angles are taken from the tx reference element toward the first bounce,
// arrival angles from the rx reference element toward the last bounce.
// Throws std::domain_error for a zero-length leg.
CommTap nlos_tap(std::size_t p, std::size_t q, const PlanarArray &tx, const PlanarArray &rx, const NlosPath &path,
                 const AntennaPatterns &patterns, double carrier_hz, const PolarizationDraw &draw);

// Scales LoS taps by sqrt(K/(K+1)) and NLoS taps by sqrt(1/(K+1)) and returns the union.
// Throws std::invalid_argument for K < 0.
std::vector<CommTap> combine_rician(std::span<const CommTap> los, std::span<const CommTap> nlos, double k_factor);

struct CommSettings
{
    double carrier_hz = 28e9;
    double k_factor = 3.0; // linear
    AntennaPatterns patterns;
};

// Per antenna pair tap lists, indexed pair(q, p).
class CommCir
{
  public:
    CommCir(std::size_t n_tx, std::size_t n_rx) : n_tx_(n_tx), n_rx_(n_rx), taps_(n_tx * n_rx) {}

    std::size_t tx_count() const { return n_tx_; }
    std::size_t rx_count() const { return n_rx_; }
    std::vector<CommTap> &pair(std::size_t q, std::size_t p) { return taps_.at(q * n_tx_ + p); }
    const std::vector<CommTap> &pair(std::size_t q, std::size_t p) const { return taps_.at(q * n_tx_ + p); }

  private:
    std::size_t n_tx_;
    std::size_t n_rx_;
    std::vector<std::vector<CommTap>> taps_;
};

// Full bi-static CIR at time t. `rx` is re-centred on the user position at t.
// With `reference_pair_only` set, only pair (0, 0) is synthesized.
CommCir comm_cir(const SceneTruth &scene, double t, const PlanarArray &tx, const PlanarArray &rx,
                 const CommSettings &settings, const PolarizationBank &draws, bool reference_pair_only = false);

} // namespace isac::comm

#endif
