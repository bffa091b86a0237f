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

#ifndef ISAC_SENSING_HPP
#define ISAC_SENSING_HPP

#include "isac/geometry.hpp"

#include <complex>
#include <cstddef>
#include <vector>

namespace isac
{

struct SceneTruth;

// In-array axes. Element (r, c) sits at origin + spacing * (r * row_axis + c * col_axis).
// The default puts rows along y and columns along z, i.e. a vertical panel facing +x.
struct ArrayOrientation
{
    Vec3 row_axis{0.0, 1.0, 0.0};
    Vec3 col_axis{0.0, 0.0, 1.0};
};

class PlanarArray
{
  public:
    // Throws std::invalid_argument for empty dimensions, non-positive spacing or a
    // non-orthonormal orientation.
    PlanarArray(std::size_t rows, std::size_t cols, double spacing, Vec3 origin = {}, ArrayOrientation orientation = {});

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t element_count() const { return rows_ * cols_; }
    double spacing() const { return spacing_; }
    const Vec3 &origin() const { return origin_; }
    const ArrayOrientation &orientation() const { return orientation_; }

    // Element p = r * cols + c. Throws std::out_of_range for p >= element_count().
    Vec3 element_position(std::size_t p) const;
    Vec3 element_offset(std::size_t p) const;

    PlanarArray moved_to(const Vec3 &origin) const;

  private:
    std::size_t rows_;
    std::size_t cols_;
    double spacing_;
    Vec3 origin_;
    ArrayOrientation orientation_;
};

namespace sensing
{

using ComplexVector = std::vector<std::complex<double>>;

// Element p carries exp(+j 2pi/lambda <u(a), offset_p>), referenced to element 0.
ComplexVector steering_vector(const PlanarArray &arr, const AngleSet &a, double wavelength);

// lambda^2 rcs / (64 pi^3 d^4). Throws std::domain_error for d <= 0 or rcs <= 0.
double sensing_gain(double range, double rcs, double wavelength);

// Round-trip delay 2d/c.
inline double echo_delay(double range) { return 2.0 * range / kSpeedOfLight; }

// Two-way Doppler 2v/lambda for a closing speed v (receding targets give negative values).
inline double doppler_shift(double closing_speed, double wavelength) { return 2.0 * closing_speed / wavelength; }

// Speed at which a target at `offset` from the sensor moves toward it.
inline double closing_speed(const Vec3 &offset, const Vec3 &velocity)
{
    return -dot(velocity, offset) / norm(offset);
}

struct SensingTap
{
    int scatterer_id = 0;
    double delay = 0.0;   // s
    double doppler = 0.0; // Hz
    double gain = 0.0;    // G, so |amplitude[p]| = sqrt(G)
    AngleSet angle;
    ComplexVector amplitude; // one entry per array element
};

// Echo taps of every alive first-bounce scatterer seen from arr.origin(), sorted by delay.
std::vector<SensingTap> monostatic_cir(const SceneTruth &scene, double t, const PlanarArray &arr, double carrier_hz);

} // namespace sensing

} // namespace isac

#endif
