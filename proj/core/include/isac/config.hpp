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

#ifndef ISAC_CONFIG_HPP
#define ISAC_CONFIG_HPP

#include "isac/comm.hpp"
#include "isac/scene.hpp"
#include "isac/sensing.hpp"
#include "isac/tracker.hpp"

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace isac
{

// Parse or validation failure. what() is "<source>:<line>: <message>" when a line is known.
class ConfigError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

struct ArrayConfig
{
    std::size_t rows = 1;
    std::size_t cols = 1;
};

// Inclusive frame-index range whose observations are withheld from the tracker.
struct FrameRange
{
    int first = 0;
    int last = 0;

    friend bool operator==(const FrameRange &, const FrameRange &) = default;
};

enum class TapExport
{
    ReferencePair,
    AllPairs
};

struct RunConfig
{
    SceneConfig scene;

    ArrayConfig tx{32, 4};
    ArrayConfig rx{2, 2};
    double element_spacing = 0.0; // m; 0 selects half a wavelength

    double carrier_hz = 28e9;
    double k_factor = 3.0;
    double kappa_db = 8.0;
    double mu = 1.0;

    double sigma_delay = 5e-9;  // s
    double sigma_angle_deg = 1.0;
    double sigma_doppler = 1.0; // Hz

    tracking::TrackerConfig tracker;

    std::uint64_t seed = 1;
    std::vector<FrameRange> withheld;
    TapExport comm_taps = TapExport::ReferencePair;

    double wavelength() const { return kSpeedOfLight / carrier_hz; }
    double spacing() const { return element_spacing > 0.0 ? element_spacing : 0.5 * wavelength(); }
    int frame_count() const; // frames 0..N inclusive, N = round(duration / ts)
    bool is_withheld(int k) const;

    // Module configurations with the shared fields (seed, noise, carrier) filled in.
    SceneConfig scene_config() const;
    tracking::TrackerConfig tracker_config() const;
    ObservationNoise observation_noise() const;
    comm::CommSettings comm_settings() const;
    comm::PolarizationBank polarization_bank() const;
    PlanarArray tx_array() const; // at the BS
    PlanarArray rx_array() const; // at the user's start position

    // Throws ConfigError naming the offending key.
    void validate() const;
};

// INI-style: [section] headers, "key = value" lines, '#' or ';' comments.
RunConfig parse_config(std::istream &is, const std::string &source = "<config>");
RunConfig load_config(const std::string &path);

// Writes every field, defaults included; parse_config reads it back to an identical config.
void write_config(std::ostream &os, const RunConfig &cfg);

} // namespace isac

#endif
