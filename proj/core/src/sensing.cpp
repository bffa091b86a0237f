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

#include "isac/sensing.hpp"

#include "isac/scene.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace isac
{

PlanarArray::PlanarArray(std::size_t rows, std::size_t cols, double spacing, Vec3 origin, ArrayOrientation orientation)
    : rows_(rows), cols_(cols), spacing_(spacing), origin_(origin), orientation_(orientation)
{
    if (rows == 0 || cols == 0)
        throw std::invalid_argument("PlanarArray: rows and cols must be positive");
    if (!(spacing > 0.0) || !std::isfinite(spacing))
        throw std::invalid_argument("PlanarArray: element spacing must be > 0");
    if (!is_finite(origin))
        throw std::invalid_argument("PlanarArray: origin must be finite");
    const double tol = 1e-9;
    if (std::abs(norm(orientation.row_axis) - 1.0) > tol || std::abs(norm(orientation.col_axis) - 1.0) > tol ||
        std::abs(dot(orientation.row_axis, orientation.col_axis)) > tol)
        throw std::invalid_argument("PlanarArray: orientation axes must be orthonormal");
}

Vec3 PlanarArray::element_offset(std::size_t p) const
{
    if (p >= element_count())
        throw std::out_of_range("PlanarArray: element index " + std::to_string(p) + " out of range");
    const auto r = static_cast<double>(p / cols_);
    const auto c = static_cast<double>(p % cols_);
    return spacing_ * (r * orientation_.row_axis + c * orientation_.col_axis);
}

Vec3 PlanarArray::element_position(std::size_t p) const { return origin_ + element_offset(p); }

PlanarArray PlanarArray::moved_to(const Vec3 &origin) const
{
    return PlanarArray(rows_, cols_, spacing_, origin, orientation_);
}

namespace sensing
{

ComplexVector steering_vector(const PlanarArray &arr, const AngleSet &a, double wavelength)
{
    if (!(wavelength > 0.0))
        throw std::domain_error("steering_vector: wavelength must be > 0");
    const Vec3 u = unit_vector_from_angles(a);
    const double k = kTwoPi / wavelength;
    ComplexVector out(arr.element_count());
    for (std::size_t p = 0; p < out.size(); ++p)
        out[p] = std::polar(1.0, k * dot(u, arr.element_offset(p)));
    return out;
}

double sensing_gain(double range, double rcs, double wavelength)
{
    if (!(range > 0.0))
        throw std::domain_error("sensing_gain: range must be > 0");
    if (!(rcs > 0.0))
        throw std::domain_error("sensing_gain: rcs must be > 0");
    const double d2 = range * range;
    return wavelength * wavelength * rcs / (64.0 * kPi * kPi * kPi * d2 * d2);
}

std::vector<SensingTap> monostatic_cir(const SceneTruth &scene, double t, const PlanarArray &arr, double carrier_hz)
{
    if (!(carrier_hz > 0.0))
        throw std::invalid_argument("monostatic_cir: carrier frequency must be > 0");
    const double wavelength = kSpeedOfLight / carrier_hz;

    std::vector<SensingTap> taps;
    for (const auto &s : scene.scatterers)
    {
        if (s.role != ScattererRole::FirstBounce || !s.alive_at(t))
            continue;
        const Vec3 offset = s.position_at(t) - arr.origin();
        const double range = norm(offset);
        if (range == 0.0)
            continue; // a scatterer on the array produces no resolvable echo

        SensingTap tap;
        tap.scatterer_id = s.id;
        tap.delay = echo_delay(range);
        tap.doppler = doppler_shift(closing_speed(offset, s.velocity), wavelength);
        tap.gain = sensing_gain(range, s.rcs, wavelength);
        tap.angle = direction_of(offset).angles;

        // The Doppler term multiplies the delay, not absolute time.
        const auto common = std::sqrt(tap.gain) * std::polar(1.0, kTwoPi * carrier_hz * tap.delay) *
                            std::polar(1.0, kTwoPi * tap.doppler * tap.delay);
        tap.amplitude = steering_vector(arr, tap.angle, wavelength);
        for (auto &a : tap.amplitude)
            a *= common;
        taps.push_back(std::move(tap));
    }
    std::stable_sort(taps.begin(), taps.end(), [](const auto &a, const auto &b) { return a.delay < b.delay; });
    return taps;
}

} // namespace sensing

} // namespace isac
