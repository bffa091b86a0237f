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

#include "isac/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace isac::stats
{

PathEnsemble ensemble_from(std::span<const PathObservation> paths, const PathObservation *los, double los_power)
{
    PathEnsemble e;
    e.reserve(paths.size() + 1);
    if (los)
        e.push_back({los_power, los->delay, los->aod, los->aoa});
    for (const auto &p : paths)
        e.push_back({p.power, p.delay, p.aod, p.aoa});
    return e;
}

double weighted_spread(std::span<const double> values, std::span<const double> powers)
{
    double total = 0.0;
    for (double p : powers)
        total += p;
    if (!(total > 0.0))
        throw std::invalid_argument("spread: total power must be > 0");

    double mean = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i)
        mean += powers[i] * values[i];
    mean /= total;

    // Centered second moment; algebraically the same as E[x^2] - E[x]^2 without the cancellation.
    double var = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i)
    {
        const double d = values[i] - mean;
        var += powers[i] * d * d;
    }
    return std::sqrt(var / total);
}

namespace
{

std::vector<double> powers_of(const PathEnsemble &e)
{
    std::vector<double> p;
    p.reserve(e.size());
    for (const auto &x : e)
        p.push_back(x.power);
    return p;
}

const AngleSet &angle_of(const PathEntry &x, Side side) { return side == Side::Departure ? x.aod : x.aoa; }

} // namespace

double delay_spread(const PathEnsemble &e)
{
    std::vector<double> v;
    v.reserve(e.size());
    for (const auto &x : e)
        v.push_back(x.delay);
    return weighted_spread(v, powers_of(e));
}

double azimuth_spread(const PathEnsemble &e, Side side)
{
    const auto p = powers_of(e);
    double s = 0.0, c = 0.0;
    for (std::size_t i = 0; i < e.size(); ++i)
    {
        const double az = angle_of(e[i], side).azimuth();
        s += p[i] * std::sin(az);
        c += p[i] * std::cos(az);
    }
    const double centre = std::atan2(s, c);

    std::vector<double> v;
    v.reserve(e.size());
    for (const auto &x : e)
        v.push_back(centre + wrap_angle(angle_of(x, side).azimuth() - centre));
    return weighted_spread(v, p);
}

double elevation_spread(const PathEnsemble &e, Side side)
{
    std::vector<double> v;
    v.reserve(e.size());
    for (const auto &x : e)
        v.push_back(angle_of(x, side).elevation());
    return weighted_spread(v, powers_of(e));
}

SpreadSet all_spreads(const PathEnsemble &e)
{
    return {delay_spread(e), azimuth_spread(e, Side::Departure), elevation_spread(e, Side::Departure),
            azimuth_spread(e, Side::Arrival), elevation_spread(e, Side::Arrival)};
}

EmpiricalCdf::EmpiricalCdf(std::vector<double> samples) : values_(std::move(samples))
{
    if (values_.empty())
        throw std::invalid_argument("empirical_cdf: empty sample");
    for (double v : values_)
        if (!std::isfinite(v))
            throw std::invalid_argument("empirical_cdf: non-finite sample");
    std::sort(values_.begin(), values_.end());
}

double EmpiricalCdf::operator()(double x) const
{
    const auto it = std::upper_bound(values_.begin(), values_.end(), x);
    return static_cast<double>(it - values_.begin()) / static_cast<double>(values_.size());
}

std::vector<double> EmpiricalCdf::fractions() const
{
    std::vector<double> f(values_.size());
    for (std::size_t i = 0; i < f.size(); ++i)
        f[i] = static_cast<double>(i + 1) / static_cast<double>(f.size());
    return f;
}

double ks_distance(const EmpiricalCdf &a, const EmpiricalCdf &b)
{
    // Both step functions only jump at sample points, so the supremum is attained there.
    double sup = 0.0;
    for (double x : a.values())
        sup = std::max(sup, std::abs(a(x) - b(x)));
    for (double x : b.values())
        sup = std::max(sup, std::abs(a(x) - b(x)));
    return sup;
}

} // namespace isac::stats
