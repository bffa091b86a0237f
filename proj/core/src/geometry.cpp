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

#include "isac/geometry.hpp"

#include <algorithm>
#include <stdexcept>

namespace isac
{

double wrap_angle(double theta)
{
    // std::remainder is exact and lands in [-pi, pi]; only the open end needs fixing.
    double r = std::remainder(theta, kTwoPi);
    if (r <= -kPi)
        r += kTwoPi;
    return r;
}

AngleSet::AngleSet(double azimuth, double elevation)
    : azimuth_(wrap_angle(azimuth)), elevation_(std::clamp(elevation, -kPi / 2.0, kPi / 2.0))
{
}

Vec3 unit_vector_from_angles(const AngleSet &a)
{
    const double ce = std::cos(a.elevation());
    return {ce * std::cos(a.azimuth()), ce * std::sin(a.azimuth()), std::sin(a.elevation())};
}

namespace
{

// Three-branch arctangent rule, completed on the axes where the ratio y/x is undefined.
double quadrant_azimuth(double x, double y, bool &degenerate)
{
    degenerate = false;
    if (x > 0.0)
        return std::atan(y / x);
    if (x < 0.0)
        return y >= 0.0 ? std::atan(y / x) + kPi : std::atan(y / x) - kPi;
    if (y > 0.0)
        return kPi / 2.0;
    if (y < 0.0)
        return -kPi / 2.0;
    degenerate = true;
    return 0.0;
}

} // namespace

Direction direction_of(const Vec3 &d) noexcept
{
    const double horizontal = std::hypot(d.x, d.y);
    if (horizontal == 0.0 && d.z == 0.0)
        return {AngleSet{}, true};

    bool degenerate = false;
    const double az = quadrant_azimuth(d.x, d.y, degenerate);
    // atan2(dz, horizontal) equals asin(dz / |d|) but keeps full precision near the poles.
    const double el = std::atan2(d.z, horizontal);
    return {AngleSet{az, el}, degenerate};
}

Direction angles_from_displacement(const Vec3 &d)
{
    if (d.x == 0.0 && d.y == 0.0 && d.z == 0.0)
        throw std::domain_error("angles_from_displacement: zero-length displacement");
    return direction_of(d);
}

double path_distance(const Vec3 &tx_antenna, const Vec3 &first_bounce, const Vec3 &last_bounce,
                     const Vec3 &rx_antenna)
{
    return distance(first_bounce, tx_antenna) + distance(last_bounce, rx_antenna);
}

} // namespace isac
