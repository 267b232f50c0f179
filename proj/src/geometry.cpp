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

#include "mmnoma/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "mmnoma/mathkit.hpp"

namespace mmnoma {

void validate(const SectorRegion& region)
{
    if (!(region.half_angle > 0.0 && region.half_angle <= 1.0)) {
        throw std::invalid_argument("half_angle must lie in (0, 1], got " + std::to_string(region.half_angle));
    }
    if (!(region.radius > 0.0) || !std::isfinite(region.radius)) {
        throw std::invalid_argument("radius must be positive, got " + std::to_string(region.radius));
    }
    if (!std::isfinite(region.beam_direction)) {
        throw std::invalid_argument("beam_direction must be finite");
    }
}

void validate(const DeploymentParams& params)
{
    if (!(params.density > 0.0) || !std::isfinite(params.density)) {
        throw std::invalid_argument("density must be positive, got " + std::to_string(params.density));
    }
    if (!(params.blockage > 0.0) || !std::isfinite(params.blockage)) {
        throw std::invalid_argument("blockage must be positive, got " + std::to_string(params.blockage));
    }
}

double wrap_direction(double theta)
{
    double w = std::fmod(theta + 1.0, 2.0);
    if (w < 0.0) {
        w += 2.0;
    }
    return w - 1.0;
}

double direction_offset(double a, double b)
{
    return wrap_direction(a - b);
}

double mean_measure_within(double r, const SectorRegion& region, const DeploymentParams& params)
{
    if (r <= 0.0) {
        return 0.0;
    }
    const double phi = params.blockage;
    return 2.0 * region.half_angle * params.density * lower_incomplete_gamma2(r * phi) / (phi * phi);
}

double mean_measure(const SectorRegion& region, const DeploymentParams& params)
{
    return mean_measure_within(region.radius, region, params);
}

double poisson_pmf(int k, double mean)
{
    if (k < 0) {
        return 0.0;
    }
    if (mean <= 0.0) {
        return k == 0 ? 1.0 : 0.0;
    }
    return std::exp(k * std::log(mean) - mean - std::lgamma(k + 1.0));
}

double user_count_pmf(int k, const SectorRegion& region, const DeploymentParams& params)
{
    return poisson_pmf(k, mean_measure(region, params));
}

int poisson_truncation(double mean, double tail)
{
    double cdf = 0.0;
    for (int k = 0; k < 100000; ++k) {
        cdf += poisson_pmf(k, mean);
        // Past the mode the remaining tail is bounded by pmf(k+1) / (1 - mean/(k+2)).
        const double next = poisson_pmf(k + 1, mean);
        if (k + 2 > mean) {
            const double bound = next / (1.0 - mean / (k + 2.0));
            if (bound < tail) {
                return k;
            }
        }
        if (1.0 - cdf < tail * 1e-3) {
            return k;
        }
    }
    return 100000;
}

double count_at_least(int k, double mean)
{
    if (k <= 0) {
        return 1.0;
    }
    double below = 0.0;
    for (int n = 0; n < k; ++n) {
        below += poisson_pmf(n, mean);
    }
    return std::max(0.0, 1.0 - below);
}

double sample_radius(const SectorRegion& region, const DeploymentParams& params, Rng& rng)
{
    const double phi = params.blockage;
    const double x_max = region.radius * phi;
    const double target = uniform01(rng) * lower_incomplete_gamma2(x_max);

    // Solve gamma(2, x) = target on [0, x_max]; Newton inside a shrinking bracket.
    double lo = 0.0;
    double hi = x_max;
    double x = 0.5 * x_max;
    for (int iter = 0; iter < 100; ++iter) {
        const double g = lower_incomplete_gamma2(x) - target;
        if (g > 0.0) {
            hi = x;
        } else {
            lo = x;
        }
        const double slope = x * std::exp(-x);
        double next = slope > 0.0 ? x - g / slope : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) {
            next = 0.5 * (lo + hi);
        }
        if (std::abs(next - x) < 1e-14 * x_max || hi - lo < 1e-15 * x_max) {
            x = next;
            break;
        }
        x = next;
    }
    return x / phi;
}

std::vector<UserLocation> sample_users(const SectorRegion& region, const DeploymentParams& params, Rng& rng)
{
    const double mean = mean_measure(region, params);
    const int count = std::poisson_distribution<int>(mean)(rng);
    return sample_users_given(count, region, params, rng);
}

std::vector<UserLocation> sample_users_given(int count, const SectorRegion& region, const DeploymentParams& params,
                                             Rng& rng)
{
    std::vector<UserLocation> users;
    users.reserve(count);
    for (int k = 0; k < count; ++k) {
        UserLocation u;
        u.distance = sample_radius(region, params, rng);
        const double spread = (2.0 * uniform01(rng) - 1.0) * region.half_angle;
        u.direction = wrap_direction(region.beam_direction + spread);
        users.push_back(u);
    }
    return users;
}

double ordered_distance_pdf(int k, double r, const SectorRegion& region, const DeploymentParams& params)
{
    if (k < 1) {
        throw std::invalid_argument("ordered_distance_pdf: k must be >= 1");
    }
    if (r <= 0.0 || r > region.radius) {
        return 0.0;
    }
    const double intensity = 2.0 * region.half_angle * params.density * std::exp(-r * params.blockage) * r;
    return intensity * poisson_pmf(k - 1, mean_measure_within(r, region, params));
}

double ordered_distance_cdf(int k, double r, const SectorRegion& region, const DeploymentParams& params)
{
    if (k < 1) {
        throw std::invalid_argument("ordered_distance_cdf: k must be >= 1");
    }
    const double mean = mean_measure_within(std::min(r, region.radius), region, params);
    return count_at_least(k, mean);
}

} // namespace mmnoma
