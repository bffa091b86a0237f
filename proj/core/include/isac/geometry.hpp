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

#ifndef ISAC_GEOMETRY_HPP
#define ISAC_GEOMETRY_HPP

#include <cmath>
#include <numbers>

namespace isac
{

inline constexpr double kSpeedOfLight = 299792458.0; // m/s
inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

constexpr double deg_to_rad(double deg) { return deg * kPi / 180.0; }
constexpr double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

// Cartesian vector in the global frame. Meters for positions, m/s for velocities.
struct Vec3
{
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    constexpr Vec3 &operator+=(const Vec3 &o)
    {
        x += o.x, y += o.y, z += o.z;
        return *this;
    }
    constexpr Vec3 &operator-=(const Vec3 &o)
    {
        x -= o.x, y -= o.y, z -= o.z;
        return *this;
    }
    constexpr Vec3 &operator*=(double s)
    {
        x *= s, y *= s, z *= s;
        return *this;
    }

    friend constexpr bool operator==(const Vec3 &, const Vec3 &) = default;
};

constexpr Vec3 operator+(Vec3 a, const Vec3 &b) { return a += b; }
constexpr Vec3 operator-(Vec3 a, const Vec3 &b) { return a -= b; }
constexpr Vec3 operator-(const Vec3 &a) { return {-a.x, -a.y, -a.z}; }
constexpr Vec3 operator*(Vec3 a, double s) { return a *= s; }
constexpr Vec3 operator*(double s, Vec3 a) { return a *= s; }
constexpr Vec3 operator/(const Vec3 &a, double s) { return {a.x / s, a.y / s, a.z / s}; }

constexpr double dot(const Vec3 &a, const Vec3 &b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
constexpr Vec3 cross(const Vec3 &a, const Vec3 &b)
{
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm(const Vec3 &a) { return std::hypot(a.x, a.y, a.z); }
inline double distance(const Vec3 &a, const Vec3 &b) { return norm(a - b); }
inline bool is_finite(const Vec3 &a) { return std::isfinite(a.x) && std::isfinite(a.y) && std::isfinite(a.z); }

// Maps any finite angle into (-pi, pi]. Idempotent.
double wrap_angle(double theta);

// Azimuth/elevation pair in radians. Elevation is measured from the horizontal plane.
// The azimuth is wrapped and the elevation clamped once, at construction.
class AngleSet
{
  public:
    constexpr AngleSet() = default;
    AngleSet(double azimuth, double elevation);

    double azimuth() const { return azimuth_; }
    double elevation() const { return elevation_; }

    friend bool operator==(const AngleSet &, const AngleSet &) = default;

  private:
    double azimuth_ = 0.0;
    double elevation_ = 0.0;
};

// Result of a direction estimate. `degenerate` is set when the azimuth is undefined
// (displacement along the z axis) or, for the non-throwing variant, when the
// displacement has zero length. Degenerate azimuths are reported as 0.
struct Direction
{
    AngleSet angles;
    bool degenerate = false;
};

// Unit vector (cos el cos az, cos el sin az, sin el).
Vec3 unit_vector_from_angles(const AngleSet &a);

// Quadrant-resolved azimuth and elevation-from-horizontal of a displacement.
// Throws std::domain_error for a zero-length displacement.
Direction angles_from_displacement(const Vec3 &d);

// Same as angles_from_displacement but never throws; a zero-length displacement yields
// a degenerate direction with both angles 0.
Direction direction_of(const Vec3 &d) noexcept;

// |fb - tx| + |lb - rx|. The first-bounce to last-bounce leg is not part of this length.
double path_distance(const Vec3 &tx_antenna, const Vec3 &first_bounce, const Vec3 &last_bounce,
                     const Vec3 &rx_antenna);

} // namespace isac

#endif
