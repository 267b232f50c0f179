// SPDX-License-Identifier: Apache-2.0
//
// mmnoma: random-beamforming mmWave-NOMA performance toolkit
// Copyright (C) 2026 The mmnoma Authors
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

#ifndef MMNOMA_GEOMETRY_HPP
#define MMNOMA_GEOMETRY_HPP

#include <vector>

#include "mmnoma/random.hpp"

namespace mmnoma {

/// Wedge-shaped sector served by one beam. Directions are normalized
/// (theta in [-1, 1) on a torus of length 2), half_angle in the same units.
struct SectorRegion {
    double beam_direction = 0.0;
    double half_angle = 0.1;
    double radius = 10.0;
};

/// Raw HPPP density and exponential blockage rate (LOS probability e^{-phi r}).
struct DeploymentParams {
    double density = 1.0;
    double blockage = 0.1;
};

struct UserLocation {
    double distance = 0.0;
    double direction = 0.0;
};

/// Throws std::invalid_argument naming the violated invariant.
void validate(const SectorRegion& region);
void validate(const DeploymentParams& params);

/// Maps any direction onto [-1, 1).
double wrap_direction(double theta);

/// Shortest signed difference a - b on the direction torus, in [-1, 1).
double direction_offset(double a, double b);

/// Mean number of LOS users inside radius r of the sector:
/// 2 Delta lambda phi^-2 gamma(2, r phi).
double mean_measure_within(double r, const SectorRegion& region, const DeploymentParams& params);

/// Mean number of LOS users in the whole sector.
double mean_measure(const SectorRegion& region, const DeploymentParams& params);

double poisson_pmf(int k, double mean);

/// Probability of exactly k LOS users in the sector.
double user_count_pmf(int k, const SectorRegion& region, const DeploymentParams& params);

/// Smallest K_max whose Poisson upper tail P(K > K_max) is below `tail`.
int poisson_truncation(double mean, double tail = 1e-10);

/// P(K >= k).
double count_at_least(int k, double mean);

/// One realization of the blockage-thinned PPP in the sector.
///
/// The count is Poisson(mean_measure); given the count, radii have density
/// proportional to r e^{-phi r} on [0, R] (inverse CDF) and directions are
/// uniform over the sector.
std::vector<UserLocation> sample_users(const SectorRegion& region, const DeploymentParams& params,
                                       Rng& rng);

/// Positions of exactly `count` LOS users (the Poisson count already drawn).
std::vector<UserLocation> sample_users_given(int count, const SectorRegion& region, const DeploymentParams& params,
                                             Rng& rng);

/// Single radius draw from the thinned radial law.
double sample_radius(const SectorRegion& region, const DeploymentParams& params, Rng& rng);

/// Density of the k-th smallest LOS distance (unconditioned on K; its mass is P(K >= k)).
double ordered_distance_pdf(int k, double r, const SectorRegion& region, const DeploymentParams& params);

/// CDF of the k-th smallest LOS distance; reaches P(K >= k) at r = R.
double ordered_distance_cdf(int k, double r, const SectorRegion& region, const DeploymentParams& params);

} // namespace mmnoma

#endif
