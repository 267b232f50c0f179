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

#ifndef MMNOMA_SIM_HPP
#define MMNOMA_SIM_HPP

#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include "mmnoma/analytic.hpp"
#include "mmnoma/channel.hpp"
#include "mmnoma/noma.hpp"
#include "mmnoma/random.hpp"
#include "mmnoma/system.hpp"

namespace mmnoma {

/// Pair users by effective gain: order 1 is the weakest.
struct PerfectCsi {
    PairSelection pair;
};

/// Pair the i-th and j-th nearest users, i > j.
struct DistanceOnly {
    DistancePair pair;
};

/// One-bit feedback against threshold xi, random selection inside each set.
struct OneBit {
    ThresholdRule rule;
};

/// N random beams, each with its own sector and distance-ordered pair.
struct MultiBeam {
    int beams = 1;
    DistancePair pair;
};

using Scheme = std::variant<PerfectCsi, DistanceOnly, OneBit, MultiBeam>;

struct SimConfig {
    SystemParams params;
    RateTargets targets;
    Scheme scheme = PerfectCsi{};
    /// Condition the (first) sector on exactly this many LOS users, by rejection.
    std::optional<int> users;

    /// Throws std::invalid_argument naming the offending field.
    void validate() const;
};

struct SimUser {
    ChannelRealization channel;
    double priority = 0.0; ///< uniform key; the lowest key in a set is the random pick
};

/// Geometry and fading of one trial, shared by every power level.
struct Drop {
    double base_direction = 0.0;
    std::vector<std::vector<SimUser>> sectors; ///< one entry per beam
    bool role_coin = false;                    ///< swaps roles when one-bit picks two users from one set
};

/// Realizes one drop. Draw order: base direction, then per sector the user
/// count, positions and fading in user order.
Drop draw_drop(const SimConfig& config, Rng& rng);

struct TrialOutcome {
    int users = 0; ///< K in the first sector
    int weak_user = -1;   ///< index into the first sector, -1 when nobody is scheduled
    int strong_user = -1;
    bool weak_exists = false;
    bool strong_exists = false;
    OutageFlags noma;
    OutageFlags oma;
    double noma_rate = 0.0; ///< served bits per channel use, summed over beams
    double oma_rate = 0.0;

    bool operator==(const TrialOutcome&) const = default;
};

/// Schedules and evaluates a drop at one SNR.
TrialOutcome evaluate_drop(const Drop& drop, const SimConfig& config, double rho);

/// One complete trial at transmit power `transmit_dbm`.
TrialOutcome run_trial(const SimConfig& config, double transmit_dbm, Rng& rng);

/// Outage counts in the n1 / n2 / n3 notation: total trials, trials where the
/// user does not exist (excluded), outages among the rest.
struct OutageTally {
    std::uint64_t total = 0;
    std::uint64_t excluded = 0;
    std::uint64_t outage = 0;

    void add(bool exists, bool in_outage);
    void merge(const OutageTally& other);

    /// (n2 + n3) / n1, a missing user counts as an outage.
    double probability() const;
    double probability_stderr() const;
    /// n3 / (n1 - n2).
    double conditional() const;
    double conditional_stderr() const;
};

struct RateTally {
    std::uint64_t count = 0;
    double sum = 0.0;
    double sum_squares = 0.0;

    void add(double x);
    void merge(const RateTally& other);
    double mean() const;
    double stderr_of_mean() const;
};

struct Aggregate {
    OutageTally weak;
    OutageTally strong;
    OutageTally oma_weak;
    OutageTally oma_strong;
    RateTally noma_rate;
    RateTally oma_rate;

    void add(const TrialOutcome& t);
    void merge(const Aggregate& other);
};

/// n_trials trials at one power. Trial t uses trial_seed(master_seed, t);
/// results do not depend on `threads` (0 picks the hardware count).
Aggregate run_experiment(const SimConfig& config, double transmit_dbm, std::uint64_t n_trials,
                         std::uint64_t master_seed, unsigned threads = 0);

/// One Aggregate per grid point. Every grid point sees the same drops.
std::vector<Aggregate> sweep(const SimConfig& config, const std::vector<double>& power_dbm,
                             std::uint64_t n_trials, std::uint64_t master_seed, unsigned threads = 0);

} // namespace mmnoma

#endif
