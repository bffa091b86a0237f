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

#ifndef ISAC_STATS_HPP
#define ISAC_STATS_HPP

#include "isac/geometry.hpp"
#include "isac/scene.hpp"

#include <span>
#include <vector>

namespace isac::stats
{

struct PathEntry
{
    double power = 0.0;
    double delay = 0.0;
    AngleSet aod;
    AngleSet aoa;
};

using PathEnsemble = std::vector<PathEntry>;

enum class Side
{
    Departure,
    Arrival
};

// Builds an ensemble from observed or reconstructed NLoS paths. A non-null `los` is
// prepended with weight `los_power`.
PathEnsemble ensemble_from(std::span<const PathObservation> paths, const PathObservation *los = nullptr,
                           double los_power = 0.0);

// Power-weighted RMS spreads. All throw std::invalid_argument when the total power is not > 0.
double delay_spread(const PathEnsemble &e);
// Azimuths are unwrapped around their power-weighted circular mean before the linear moments are taken.
double azimuth_spread(const PathEnsemble &e, Side side);
double elevation_spread(const PathEnsemble &e, Side side);

// Power-weighted standard deviation of arbitrary values; shared by the spreads above.
double weighted_spread(std::span<const double> values, std::span<const double> powers);

struct SpreadSet
{
    double delay = 0.0;
    double aod_azimuth = 0.0;
    double aod_elevation = 0.0;
    double aoa_azimuth = 0.0;
    double aoa_elevation = 0.0;
};

SpreadSet all_spreads(const PathEnsemble &e);

class EmpiricalCdf
{
  public:
    // Throws std::invalid_argument for an empty or non-finite sample.
    explicit EmpiricalCdf(std::vector<double> samples);

    // Fraction of samples <= x.
    double operator()(double x) const;

    const std::vector<double> &values() const { return values_; }
    // fractions()[i] = (i + 1) / n, paired with values()[i].
    std::vector<double> fractions() const;
    std::size_t size() const { return values_.size(); }

  private:
    std::vector<double> values_;
};

inline EmpiricalCdf empirical_cdf(std::vector<double> samples) { return EmpiricalCdf(std::move(samples)); }

// Kolmogorov-Smirnov statistic sup_x |A(x) - B(x)|.
double ks_distance(const EmpiricalCdf &a, const EmpiricalCdf &b);

} // namespace isac::stats

#endif
