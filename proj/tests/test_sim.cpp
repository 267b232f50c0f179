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

#include <cmath>
#include <vector>

#include "mmnoma/analytic.hpp"
#include "mmnoma/sim.hpp"

using namespace mmnoma;

namespace {

SimUser make_user(double fading, double distance, double direction, double priority = 0.5)
{
    return {{fading, {distance, direction}}, priority};
}

Drop single_sector(std::vector<SimUser> users)
{
    Drop d;
    d.sectors.push_back(std::move(users));
    return d;
}

bool same(const OutageTally& a, const OutageTally& b)
{
    return a.total == b.total && a.excluded == b.excluded && a.outage == b.outage;
}

bool same(const RateTally& a, const RateTally& b)
{
    return a.count == b.count && a.sum == b.sum && a.sum_squares == b.sum_squares;
}

bool same(const Aggregate& a, const Aggregate& b)
{
    return same(a.weak, b.weak) && same(a.strong, b.strong) && same(a.oma_weak, b.oma_weak) &&
           same(a.oma_strong, b.oma_strong) && same(a.noma_rate, b.noma_rate) && same(a.oma_rate, b.oma_rate);
}

// |mc - analytic| within z standard errors; the error uses the analytic p so
// that a run with zero observed outages is still judged sensibly.
bool agrees(double mc, double analytic, std::uint64_t n, double z = 4.0)
{
    const double se = std::sqrt(std::max(analytic * (1.0 - analytic), 1.0 / n) / n);
    return std::abs(mc - analytic) <= z * se;
}

} // namespace

TEST_CASE("tallies")
{
    OutageTally t;
    t.add(false, true);
    t.add(true, true);
    t.add(true, false);
    t.add(true, false);
    CHECK(t.total == 4);
    CHECK(t.excluded == 1);
    CHECK(t.outage == 1);
    CHECK(t.probability() == doctest::Approx(0.5));
    CHECK(t.conditional() == doctest::Approx(1.0 / 3.0));
    CHECK(t.conditional_stderr() == doctest::Approx(std::sqrt((1.0 / 3.0) * (2.0 / 3.0) / 2.0)));
    OutageTally u;
    u.add(true, true);
    t.merge(u);
    CHECK(t.conditional() == doctest::Approx(0.5));
    CHECK(OutageTally{}.probability() == 0.0);

    RateTally r;
    for (double x : {1.0, 2.0, 3.0}) {
        r.add(x);
    }
    CHECK(r.mean() == doctest::Approx(2.0));
    CHECK(r.stderr_of_mean() == doctest::Approx(std::sqrt(1.0 / 3.0)));
}

TEST_CASE("empty sector gets no service and a lone user is served alone")
{
    SimConfig config;
    const auto none = evaluate_drop(single_sector({}), config, 1e6);
    CHECK(none.users == 0);
    CHECK(none.weak_user == -1);
    CHECK(none.strong_user == -1);
    CHECK_FALSE(none.weak_exists);
    CHECK_FALSE(none.strong_exists);
    CHECK(none.noma_rate == 0.0);
    CHECK(none.oma_rate == 0.0);

    const auto lone = evaluate_drop(single_sector({make_user(1.0, 1.0, 0.0)}), config, 1e6);
    CHECK(lone.users == 1);
    CHECK(lone.noma_rate == config.targets.weak_rate);
    CHECK(lone.oma_rate == config.targets.weak_rate);
    const auto dark = evaluate_drop(single_sector({make_user(1.0, 1.0, 0.0)}), config, 1e-3);
    CHECK(dark.noma_rate == 0.0);
}

TEST_CASE("perfect CSI schedules by gain")
{
    SimConfig config;
    config.scheme = PerfectCsi{{1, 0, false}};
    // gains: far users are weaker
    const Drop drop = single_sector({make_user(1.0, 3.0, 0.0), make_user(1.0, 1.0, 0.0), make_user(1.0, 5.0, 0.0)});
    const auto t = evaluate_drop(drop, config, 1e4);
    CHECK(t.weak_user == 2);
    CHECK(t.strong_user == 1);
    CHECK(t.weak_exists);
    CHECK(t.strong_exists);

    config.scheme = PerfectCsi{{1, 4, false}};
    const auto none = evaluate_drop(drop, config, 1e4);
    CHECK(none.noma_rate == 0.0);
    CHECK(none.weak_user == -1);
}

TEST_CASE("distance scheme serves the near user even when the far one is missing")
{
    SimConfig config;
    config.scheme = DistanceOnly{{4, 1}};
    const Drop drop = single_sector({make_user(1.0, 3.0, 0.0), make_user(1.0, 1.0, 0.0)});
    const auto t = evaluate_drop(drop, config, 1e6);
    CHECK_FALSE(t.weak_exists);
    CHECK(t.strong_exists);
    CHECK(t.strong_user == 1);
    CHECK(t.noma.weak);
}

TEST_CASE("validation")
{
    SimConfig c;
    CHECK_NOTHROW(c.validate());
    c.users = -1;
    CHECK_THROWS(c.validate());
    c.users = 200;
    CHECK_THROWS(c.validate());
    c.users = std::nullopt;
    c.scheme = MultiBeam{5, {3, 1}};
    CHECK_THROWS(c.validate());
    c.scheme = DistanceOnly{{1, 2}};
    CHECK_THROWS(c.validate());
    c.params.antennas = 8;
    c.params.half_angle = 0.3;
    c.scheme = MultiBeam{4, {3, 1}};
    CHECK_THROWS(c.validate());
}

TEST_CASE("results do not depend on the thread count and repeat exactly")
{
    SimConfig config;
    config.scheme = OneBit{{ThresholdRuleKind::midpoint}};
    const std::vector<double> grid{0.0, 20.0, 40.0};
    const auto a = sweep(config, grid, 10000, 42, 1);
    const auto b = sweep(config, grid, 10000, 42, 4);
    const auto c = sweep(config, grid, 10000, 42, 3);
    REQUIRE(a.size() == 3);
    for (std::size_t k = 0; k < grid.size(); ++k) {
        CHECK(same(a[k], b[k]));
        CHECK(same(a[k], c[k]));
        CHECK(same(a[k], run_experiment(config, grid[k], 10000, 42, 2)));
    }
    const auto other = sweep(config, grid, 10000, 43, 1);
    CHECK_FALSE(same(a[1], other[1]));
}

TEST_CASE("a single trial reproduces from its seed")
{
    SimConfig config;
    config.scheme = DistanceOnly{{3, 1}};
    for (std::uint64_t t = 0; t < 50; ++t) {
        Rng r1(trial_seed(9, t));
        Rng r2(trial_seed(9, t));
        REQUIRE(run_trial(config, 25.0, r1) == run_trial(config, 25.0, r2));
    }
}

TEST_CASE("outage counts fall with power on common drops")
{
    SimConfig config;
    config.users = 5;
    std::vector<double> grid;
    for (double p = 0.0; p <= 50.0; p += 5.0) {
        grid.push_back(p);
    }
    for (const Scheme& s : {Scheme{PerfectCsi{}}, Scheme{DistanceOnly{{4, 1}}}}) {
        config.scheme = s;
        const auto agg = sweep(config, grid, 5000, 7, 0);
        for (std::size_t k = 1; k < agg.size(); ++k) {
            CHECK(agg[k].weak.outage <= agg[k - 1].weak.outage);
            CHECK(agg[k].strong.outage <= agg[k - 1].strong.outage);
            CHECK(agg[k].oma_strong.outage <= agg[k - 1].oma_strong.outage);
            CHECK(agg[k].noma_rate.sum >= agg[k - 1].noma_rate.sum);
        }
    }
}

TEST_CASE("scaling every fading power does not change the perfect-CSI pair")
{
    SimConfig config;
    config.users = 6;
    config.scheme = PerfectCsi{{2, 5, false}};
    Rng rng(123);
    for (int t = 0; t < 2000; ++t) {
        Drop d = draw_drop(config, rng);
        const auto a = evaluate_drop(d, config, 1e4);
        for (auto& u : d.sectors[0]) {
            u.channel.fading_power *= 7.5;
        }
        const auto b = evaluate_drop(d, config, 1e4);
        REQUIRE(a.weak_user == b.weak_user);
        REQUIRE(a.strong_user == b.strong_user);
    }
}

TEST_CASE("a zero one-bit threshold picks users uniformly")
{
    SimConfig config;
    config.users = 5;
    config.scheme = OneBit{{ThresholdRuleKind::fixed, 0.0}};
    const auto dist = GainDistribution::unordered(config.params);
    const double y = 0.05;
    const double f = dist.cdf(y);
    Rng rng(55);
    const int n = 100000;
    int weak_below = 0;
    int strong_below = 0;
    for (int t = 0; t < n; ++t) {
        const Drop d = draw_drop(config, rng);
        const auto o = evaluate_drop(d, config, 1e4);
        REQUIRE(o.weak_user != o.strong_user);
        auto gain = [&](int idx) {
            return effective_gain(d.sectors[0][idx].channel, d.base_direction, config.params.antennas,
                                  config.params.path_loss_exponent);
        };
        weak_below += gain(o.weak_user) <= y;
        strong_below += gain(o.strong_user) <= y;
    }
    CHECK(agrees(static_cast<double>(weak_below) / n, f, n));
    CHECK(agrees(static_cast<double>(strong_below) / n, f, n));
}

TEST_CASE("perfect CSI simulation matches the conditional analysis")
{
    SimConfig config;
    config.users = 5;
    config.targets = {0.5, 6.0};
    config.scheme = PerfectCsi{{1, 0, false}};
    const auto dist = GainDistribution::unordered(config.params);
    const std::uint64_t n = 40000;
    const std::vector<double> grid{10.0, 20.0, 30.0};
    const auto agg = sweep(config, grid, n, 11, 0);
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const double rho = config.params.rho(grid[k]);
        const auto noma = conditional_pair_outage(dist, 1, 5, 5, config.params.split, config.targets, rho);
        const auto oma = conditional_oma_outage(dist, 1, 5, 5, config.targets, rho);
        CHECK(agrees(agg[k].weak.conditional(), noma.weak, n));
        CHECK(agrees(agg[k].strong.conditional(), noma.strong, n));
        CHECK(agrees(agg[k].oma_weak.conditional(), oma.weak, n));
        CHECK(agrees(agg[k].oma_strong.conditional(), oma.strong, n));
        CHECK(agg[k].weak.excluded == 0);
    }
}

TEST_CASE("distance scheme simulation matches the analysis, with and without existence")
{
    SimConfig config;
    config.targets = {0.5, 6.0};
    const DistancePair pair{4, 1};
    config.scheme = DistanceOnly{pair};
    const auto weak = GainDistribution::kth_nearest(config.params, 4);
    const auto strong = GainDistribution::kth_nearest(config.params, 1);
    const std::uint64_t n = 40000;
    const auto agg = sweep(config, {15.0, 30.0}, n, 12, 0);
    for (std::size_t k = 0; k < 2; ++k) {
        const double rho = config.params.rho(k == 0 ? 15.0 : 30.0);
        const auto out = distance_noma_outage(weak, strong, pair, config.params, config.targets, rho);
        CHECK(agrees(agg[k].weak.probability(), out.weak, n));
        CHECK(agrees(agg[k].strong.probability(), out.strong, n));
        const double exists = count_at_least(4, config.params.mean_users());
        const double cond = (out.weak - (1.0 - exists)) / exists;
        CHECK(agrees(agg[k].weak.conditional(), cond, agg[k].weak.total - agg[k].weak.excluded));
    }
}

TEST_CASE("one-bit simulation matches the analysis")
{
    SimConfig config;
    config.users = 3;
    config.targets = {0.5, 4.0};
    const ThresholdRule rule{ThresholdRuleKind::midpoint};
    config.scheme = OneBit{rule};
    const auto dist = GainDistribution::unordered(config.params);
    const std::uint64_t n = 40000;
    const std::vector<double> grid{10.0, 25.0};
    const auto agg = sweep(config, grid, n, 13, 0);
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const double rho = config.params.rho(grid[k]);
        const auto xi = rule.resolve(feedback_thresholds(config.params.split, config.targets, rho), rho, 3);
        const double w = onebit_outage(Role::weak, 3, xi, config.params.split, config.targets, rho, dist);
        const double s = onebit_outage(Role::strong, 3, xi, config.params.split, config.targets, rho, dist);
        const double ow = onebit_oma_outage(Role::weak, 3, xi, config.targets, rho, dist);
        const double os = onebit_oma_outage(Role::strong, 3, xi, config.targets, rho, dist);
        CHECK(agrees(agg[k].weak.conditional(), w, n));
        CHECK(agrees(agg[k].strong.conditional(), s, n));
        CHECK(agrees(agg[k].oma_weak.conditional(), ow, n));
        CHECK(agrees(agg[k].oma_strong.conditional(), os, n));
        CHECK(agg[k].noma_rate.mean() ==
              doctest::Approx(onebit_sum_rate_given(dist, 3, config.params.split, config.targets, rule, rho))
                  .epsilon(0.03));
    }
}

TEST_CASE("multi-beam simulation matches the analysis")
{
    SimConfig config;
    config.params.antennas = 8;
    config.params.density = 10.0;
    config.params.half_angle = 0.01;
    config.targets = {0.5, 5.0};
    config.scheme = MultiBeam{4, {3, 1}};
    const std::uint64_t n = 40000;
    const MultibeamOutage weak(config.params, 4, 3, MultibeamLink::noma_weak, config.targets);
    const MultibeamOutage strong(config.params, 4, 1, MultibeamLink::noma_strong, config.targets);
    const MultibeamOutage oma(config.params, 4, 1, MultibeamLink::oma_strong, config.targets);
    const auto agg = sweep(config, {10.0, 30.0}, n, 14, 0);
    for (std::size_t k = 0; k < 2; ++k) {
        const double rho = config.params.rho(k == 0 ? 10.0 : 30.0);
        CHECK(agrees(agg[k].weak.probability(), weak.outage(rho), n));
        CHECK(agrees(agg[k].strong.probability(), strong.outage(rho), n));
        CHECK(agrees(agg[k].oma_strong.probability(), oma.outage(rho), n));
    }
}

TEST_CASE("one beam reproduces the distance scheme exactly")
{
    SimConfig a;
    a.targets = {0.5, 5.0};
    a.scheme = DistanceOnly{{3, 1}};
    SimConfig b = a;
    b.scheme = MultiBeam{1, {3, 1}};
    const std::vector<double> grid{0.0, 20.0, 40.0};
    const auto ra = sweep(a, grid, 20000, 5, 0);
    const auto rb = sweep(b, grid, 20000, 5, 0);
    for (std::size_t k = 0; k < grid.size(); ++k) {
        CHECK(same(ra[k], rb[k]));
    }
    Rng r1(1);
    Rng r2(1);
    for (int t = 0; t < 200; ++t) {
        REQUIRE(run_trial(a, 30.0, r1) == run_trial(b, 30.0, r2));
    }
}
