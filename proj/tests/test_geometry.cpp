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

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

#include "mmnoma/geometry.hpp"
#include "mmnoma/mathkit.hpp"
#include "mmnoma/quadrature.hpp"

using namespace mmnoma;

namespace {

const SectorRegion kSector{0.0, 0.1, 10.0};
const DeploymentParams kDeploy{1.0, 0.1};
constexpr double kMu = 5.28482235314;

double chi2_critical(int dof, double level = 0.99)
{
    return boost::math::quantile(boost::math::chi_squared(dof), level);
}

// Two-sample chi-square homogeneity statistic for equal sample sizes, pooling
// the upper tail until every bin expects at least five counts per sample.
std::pair<double, int> homogeneity(const std::vector<int>& a, const std::vector<int>& b)
{
    const int top = std::max(*std::max_element(a.begin(), a.end()), *std::max_element(b.begin(), b.end()));
    std::vector<double> ca(top + 1, 0.0);
    std::vector<double> cb(top + 1, 0.0);
    for (int x : a) {
        ca[x] += 1;
    }
    for (int x : b) {
        cb[x] += 1;
    }
    double stat = 0.0;
    int bins = 0;
    double pa = 0.0;
    double pb = 0.0;
    for (int k = 0; k <= top; ++k) {
        pa += ca[k];
        pb += cb[k];
        if ((pa + pb) / 2.0 >= 5.0) {
            stat += (pa - pb) * (pa - pb) / (pa + pb);
            ++bins;
            pa = pb = 0.0;
        }
    }
    if (pa + pb > 0.0) {
        stat += (pa - pb) * (pa - pb) / (pa + pb);
        ++bins;
    }
    return {stat, bins - 1};
}

// Thinning oracle: raw HPPP of density lambda on the sector (area Delta R^2 in
// normalized-direction units), each point kept with probability e^{-phi r}.
int thinned_count_by_rejection(const SectorRegion& region, const DeploymentParams& params, Rng& rng)
{
    const double area = region.half_angle * region.radius * region.radius;
    const int raw = std::poisson_distribution<int>(params.density * area)(rng);
    int kept = 0;
    for (int k = 0; k < raw; ++k) {
        const double r = region.radius * std::sqrt(uniform01(rng));
        if (uniform01(rng) < std::exp(-params.blockage * r)) {
            ++kept;
        }
    }
    return kept;
}

double ks_distance(std::vector<double> sample, const std::function<double(double)>& cdf)
{
    std::sort(sample.begin(), sample.end());
    const double n = static_cast<double>(sample.size());
    double d = 0.0;
    for (std::size_t k = 0; k < sample.size(); ++k) {
        const double f = cdf(sample[k]);
        d = std::max({d, std::abs(f - k / n), std::abs((k + 1) / n - f)});
    }
    return d;
}

} // namespace

TEST_CASE("mean measure")
{
    CHECK(mean_measure(kSector, kDeploy) == doctest::Approx(kMu).epsilon(1e-10));
    CHECK(mean_measure(kSector, kDeploy) == doctest::Approx(20.0 * (1.0 - 2.0 * std::exp(-1.0))).epsilon(1e-13));
    // oracle: integrate the thinned intensity over r, times the 2 Delta angular width
    const double q =
        integrate([](double r) { return 2.0 * 0.1 * 1.0 * std::exp(-0.1 * r) * r; }, 0.0, 10.0).value;
    CHECK(mean_measure(kSector, kDeploy) == doctest::Approx(q).epsilon(1e-12));
    CHECK(mean_measure_within(0.0, kSector, kDeploy) == 0.0);
    CHECK(mean_measure({0.0, 0.05, 10.0}, {2.0, 0.1}) == doctest::Approx(kMu).epsilon(1e-10));
}

TEST_CASE("user count pmf")
{
    CHECK(user_count_pmf(0, kSector, kDeploy) == doctest::Approx(0.005077).epsilon(1e-3));
    CHECK(user_count_pmf(0, kSector, kDeploy) == doctest::Approx(std::exp(-kMu)).epsilon(1e-9));
    CHECK(user_count_pmf(5, kSector, kDeploy) == doctest::Approx(0.1744).epsilon(1e-3));
    double sum = 0.0;
    for (int k = 0; k <= 60; ++k) {
        sum += user_count_pmf(k, kSector, kDeploy);
    }
    CHECK(std::abs(sum - 1.0) < 1e-12);
    CHECK(poisson_pmf(-1, 2.0) == 0.0);
}

TEST_CASE("poisson truncation and tail")
{
    const int k_max = poisson_truncation(kMu);
    double tail = 1.0;
    for (int k = 0; k <= k_max; ++k) {
        tail -= poisson_pmf(k, kMu);
    }
    CHECK(tail < 1e-10);
    CHECK(poisson_truncation(kMu) > 10);
    CHECK(count_at_least(0, kMu) == 1.0);
    CHECK(count_at_least(1, kMu) == doctest::Approx(1.0 - std::exp(-kMu)).epsilon(1e-14));
}

TEST_CASE("validation rejects bad parameters")
{
    CHECK_THROWS(validate(DeploymentParams{1.0, 0.0}));
    CHECK_THROWS(validate(DeploymentParams{0.0, 0.1}));
    CHECK_THROWS(validate(SectorRegion{0.0, 0.0, 10.0}));
    CHECK_THROWS(validate(SectorRegion{0.0, 1.5, 10.0}));
    CHECK_THROWS(validate(SectorRegion{0.0, 0.1, -1.0}));
    CHECK_NOTHROW(validate(kSector));
    CHECK_NOTHROW(validate(kDeploy));
}

TEST_CASE("direction wrapping")
{
    CHECK(wrap_direction(1.0) == doctest::Approx(-1.0));
    CHECK(wrap_direction(-1.0) == doctest::Approx(-1.0));
    CHECK(wrap_direction(2.5) == doctest::Approx(0.5));
    CHECK(wrap_direction(-2.25) == doctest::Approx(-0.25));
    CHECK(direction_offset(0.95, -0.95) == doctest::Approx(-0.1));
    CHECK(direction_offset(-0.95, 0.95) == doctest::Approx(0.1));
}

TEST_CASE("sampled counts, directions and radii")
{
    Rng rng(12345);
    const int n = 100000;
    double sum = 0.0;
    double sum2 = 0.0;
    std::vector<double> radii;
    std::vector<int> theta_bins(20, 0);
    for (int t = 0; t < n; ++t) {
        const auto users = sample_users(kSector, kDeploy, rng);
        sum += users.size();
        sum2 += static_cast<double>(users.size()) * users.size();
        for (const auto& u : users) {
            if (radii.size() < 100000) {
                radii.push_back(u.distance);
            }
            const int bin = std::clamp(static_cast<int>((u.direction + 0.1) / 0.2 * 20), 0, 19);
            ++theta_bins[bin];
        }
    }
    const double mean = sum / n;
    const double se = std::sqrt((sum2 / n - mean * mean) / (n - 1));
    CHECK(std::abs(mean - kMu) < 3 * se);

    double total = 0;
    for (int c : theta_bins) {
        total += c;
    }
    double stat = 0.0;
    for (int c : theta_bins) {
        const double e = total / 20;
        stat += (c - e) * (c - e) / e;
    }
    CHECK(stat < chi2_critical(19));

    const double norm = lower_incomplete_gamma2(1.0);
    const double d = ks_distance(radii, [&](double r) { return lower_incomplete_gamma2(0.1 * r) / norm; });
    CHECK(d < 0.01);
}

TEST_CASE("thinning identity: direct sampler vs rejection oracle")
{
    Rng a(777);
    Rng b(778);
    std::vector<int> direct;
    std::vector<int> oracle;
    for (int t = 0; t < 100000; ++t) {
        direct.push_back(static_cast<int>(sample_users(kSector, kDeploy, a).size()));
        oracle.push_back(thinned_count_by_rejection(kSector, kDeploy, b));
    }
    const auto [stat, dof] = homogeneity(direct, oracle);
    CHECK(stat < chi2_critical(dof));
}

TEST_CASE("sampled locations stay inside the sector, also across the wrap point")
{
    Rng rng(4);
    for (double beam : {0.0, 0.95, -0.98}) {
        const SectorRegion region{beam, 0.1, 10.0};
        for (int t = 0; t < 2000; ++t) {
            for (const auto& u : sample_users(region, kDeploy, rng)) {
                REQUIRE(u.distance >= 0.0);
                REQUIRE(u.distance <= 10.0);
                REQUIRE(u.direction >= -1.0);
                REQUIRE(u.direction < 1.0);
                REQUIRE(std::abs(direction_offset(u.direction, beam)) <= 0.1 + 1e-12);
            }
        }
    }
}

TEST_CASE("ordered distance pdf and cdf")
{
    CHECK(ordered_distance_pdf(1, 0.0, kSector, kDeploy) == 0.0);
    CHECK(ordered_distance_cdf(1, 0.0, kSector, kDeploy) == 0.0);
    const double mass =
        integrate([](double r) { return ordered_distance_pdf(1, r, kSector, kDeploy); }, 0.0, 10.0).value;
    CHECK(mass == doctest::Approx(1.0 - std::exp(-kMu)).epsilon(1e-10));
    CHECK(mass == doctest::Approx(0.99492).epsilon(1e-5));
    // 1 - P(K <= 2) at mean 5.28482
    CHECK(ordered_distance_cdf(3, 10.0, kSector, kDeploy) == doctest::Approx(0.897377).epsilon(1e-5));

    for (int k = 1; k <= 8; ++k) {
        double tail = 0.0;
        for (int n = k; n <= 80; ++n) {
            tail += user_count_pmf(n, kSector, kDeploy);
        }
        REQUIRE(std::abs(ordered_distance_cdf(k, 10.0, kSector, kDeploy) - tail) < 1e-10);
        double prev = 0.0;
        for (double r = 0.05; r < 10.0; r += 0.05) {
            const double h = 1e-5;
            const double fd = (ordered_distance_cdf(k, r + h, kSector, kDeploy) -
                               ordered_distance_cdf(k, r - h, kSector, kDeploy)) /
                              (2 * h);
            REQUIRE(std::abs(fd - ordered_distance_pdf(k, r, kSector, kDeploy)) < 1e-6);
            const double c = ordered_distance_cdf(k, r, kSector, kDeploy);
            REQUIRE(c >= prev - 1e-15);
            prev = c;
        }
    }
}

TEST_CASE("second-nearest distance matches the renormalized pdf")
{
    Rng rng(99);
    std::vector<double> second;
    while (second.size() < 100000) {
        auto users = sample_users(kSector, kDeploy, rng);
        if (users.size() < 2) {
            continue;
        }
        std::vector<double> d;
        for (const auto& u : users) {
            d.push_back(u.distance);
        }
        std::nth_element(d.begin(), d.begin() + 1, d.end());
        second.push_back(d[1]);
    }
    const double exists = count_at_least(2, kMu);
    const double ks = ks_distance(second, [&](double r) { return ordered_distance_cdf(2, r, kSector, kDeploy) / exists; });
    CHECK(ks < 0.015);
}

TEST_CASE("sample_users_given draws exactly the requested count")
{
    Rng rng(5);
    CHECK(sample_users_given(0, kSector, kDeploy, rng).empty());
    CHECK(sample_users_given(7, kSector, kDeploy, rng).size() == 7);
}
