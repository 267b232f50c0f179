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

#include "mmnoma/sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <numeric>
#include <stdexcept>
#include <string>
#include <thread>

#include "mmnoma/geometry.hpp"

namespace mmnoma {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

int sector_count(const SimConfig& config)
{
    if (const auto* mb = std::get_if<MultiBeam>(&config.scheme)) {
        return mb->beams;
    }
    return 1;
}

void fail(const std::string& field, const std::string& why)
{
    throw std::invalid_argument(field + ": " + why);
}

} // namespace

void SimConfig::validate() const
{
    params.validate();
    targets.validate();
    std::visit(overloaded{
                   [](const PerfectCsi& s) {
                       if (s.pair.weak_index < 1) {
                           fail("scheme.weak_index", "must be >= 1");
                       }
                       if (s.pair.strong_index != 0 && s.pair.strong_index <= s.pair.weak_index) {
                           fail("scheme.strong_index", "must exceed weak_index (0 means K)");
                       }
                   },
                   [](const DistanceOnly& s) {
                       if (s.pair.strong_order < 1 || s.pair.weak_order <= s.pair.strong_order) {
                           fail("scheme.weak_order", "distance pair needs 1 <= j < i");
                       }
                   },
                   [](const OneBit& s) {
                       if (s.rule.kind == ThresholdRuleKind::fixed && !std::isfinite(s.rule.fixed_value)) {
                           fail("scheme.threshold", "fixed threshold must be finite");
                       }
                   },
                   [this](const MultiBeam& s) {
                       if (s.beams < 1 || s.beams > params.antennas) {
                           fail("scheme.beams", "need 1 <= N <= M");
                       }
                       if (s.beams * 2.0 * params.half_angle > 2.0) {
                           fail("scheme.beams", "sectors overlap (N * 2 * half_angle > 2)");
                       }
                       if (s.pair.strong_order < 1 || s.pair.weak_order <= s.pair.strong_order) {
                           fail("scheme.weak_order", "distance pair needs 1 <= j < i");
                       }
                   },
               },
               scheme);
    if (users) {
        if (*users < 0) {
            fail("users", "must be >= 0");
        }
        // Rejection sampling has to terminate in reasonable time.
        if (poisson_pmf(*users, params.mean_users()) < 1e-6) {
            fail("users", "conditioning event has probability below 1e-6");
        }
    }
}

Drop draw_drop(const SimConfig& config, Rng& rng)
{
    const int n_sectors = sector_count(config);
    Drop drop;
    drop.base_direction = 2.0 * uniform01(rng) - 1.0;
    drop.sectors.resize(n_sectors);
    const DeploymentParams deploy = config.params.deployment();
    for (int m = 0; m < n_sectors; ++m) {
        const SectorRegion region =
            config.params.sector(wrap_direction(drop.base_direction + 2.0 * m / n_sectors));
        std::poisson_distribution<int> count_law(mean_measure(region, deploy));
        int count = count_law(rng);
        if (m == 0 && config.users) {
            while (count != *config.users) {
                count = count_law(rng);
            }
        }
        const std::vector<UserLocation> where = sample_users_given(count, region, deploy, rng);
        auto& users = drop.sectors[m];
        users.resize(where.size());
        for (std::size_t k = 0; k < where.size(); ++k) {
            users[k].channel.location = where[k];
            users[k].channel.fading_power = sample_fading(rng);
        }
        for (auto& u : users) {
            u.priority = uniform01(rng);
        }
    }
    drop.role_coin = uniform01(rng) < 0.5;
    return drop;
}

namespace {

struct Gains {
    std::vector<double> own;
    std::vector<double> interference;
};

Gains sector_gains(const std::vector<SimUser>& users, const std::vector<double>& beam_dirs, int sector,
                   const SystemParams& params)
{
    Gains g;
    g.own.reserve(users.size());
    g.interference.reserve(users.size());
    for (const auto& u : users) {
        g.own.push_back(effective_gain(u.channel, beam_dirs[sector], params.antennas, params.path_loss_exponent));
        double sum = 0.0;
        for (std::size_t n = 0; n < beam_dirs.size(); ++n) {
            if (static_cast<int>(n) != sector) {
                sum += effective_gain(u.channel, beam_dirs[n], params.antennas, params.path_loss_exponent);
            }
        }
        g.interference.push_back(sum);
    }
    return g;
}

std::vector<int> order_by(const std::vector<double>& key)
{
    std::vector<int> idx(key.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return key[a] < key[b]; });
    return idx;
}

std::vector<int> order_by_distance(const std::vector<SimUser>& users)
{
    std::vector<double> d;
    d.reserve(users.size());
    for (const auto& u : users) {
        d.push_back(u.channel.location.distance);
    }
    return order_by(d);
}

// A lone user is served by OMA at the weak target rate.
void serve_single(TrialOutcome& t, double gain, const RateTargets& targets, double rho)
{
    const double rate = oma_outage_event(gain, targets.weak_rate, rho) ? 0.0 : targets.weak_rate;
    t.noma_rate = rate;
    t.oma_rate = rate;
}

// Fills flags and rates of a formed pair from single-beam SINR tests.
void score_pair(TrialOutcome& t, double weak_gain, double strong_gain, const SimConfig& config, double rho)
{
    const RateTargets& tg = config.targets;
    t.noma = noma_outage_events(weak_gain, strong_gain, config.params.split, tg, rho);
    t.oma.weak = oma_outage_event(weak_gain, tg.weak_rate, rho);
    t.oma.strong = oma_outage_event(strong_gain, tg.strong_rate, rho);
    t.noma_rate = (t.noma.weak ? 0.0 : tg.weak_rate) + (t.noma.strong ? 0.0 : tg.strong_rate);
    t.oma_rate = (t.oma.weak ? 0.0 : tg.weak_rate) + (t.oma.strong ? 0.0 : tg.strong_rate);
}

TrialOutcome eval_perfect(const PerfectCsi& s, const Drop& drop, const SimConfig& config, double rho)
{
    TrialOutcome t;
    const auto& users = drop.sectors[0];
    const int K = static_cast<int>(users.size());
    t.users = K;
    if (K == 0) {
        return t;
    }
    const Gains g = sector_gains(users, {drop.base_direction}, 0, config.params);
    if (K == 1) {
        serve_single(t, g.own[0], config.targets, rho);
        return t;
    }
    const auto j = s.pair.strong_for(K);
    if (!j) {
        return t;
    }
    const std::vector<int> idx = order_by(g.own);
    t.weak_user = idx[s.pair.weak_index - 1];
    t.strong_user = idx[*j - 1];
    t.weak_exists = t.strong_exists = true;
    score_pair(t, g.own[t.weak_user], g.own[t.strong_user], config, rho);
    return t;
}

TrialOutcome eval_distance(const DistanceOnly& s, const Drop& drop, const SimConfig& config, double rho)
{
    TrialOutcome t;
    const auto& users = drop.sectors[0];
    const int K = static_cast<int>(users.size());
    t.users = K;
    const std::vector<int> idx = order_by_distance(users);
    t.weak_exists = K >= s.pair.weak_order;
    t.strong_exists = K >= s.pair.strong_order;
    if (!t.strong_exists) {
        return t;
    }
    const Gains g = sector_gains(users, {drop.base_direction}, 0, config.params);
    t.strong_user = idx[s.pair.strong_order - 1];
    // The strong user is still served when its partner is missing.
    t.weak_user = t.weak_exists ? idx[s.pair.weak_order - 1] : t.strong_user;
    score_pair(t, g.own[t.weak_user], g.own[t.strong_user], config, rho);
    if (!t.weak_exists) {
        t.weak_user = -1;
        t.noma.weak = t.oma.weak = true;
        t.noma_rate = t.noma.strong ? 0.0 : config.targets.strong_rate;
        t.oma_rate = t.oma.strong ? 0.0 : config.targets.strong_rate;
    }
    return t;
}

TrialOutcome eval_onebit(const OneBit& s, const Drop& drop, const SimConfig& config, double rho)
{
    TrialOutcome t;
    const auto& users = drop.sectors[0];
    const int K = static_cast<int>(users.size());
    t.users = K;
    if (K == 0) {
        return t;
    }
    const Gains g = sector_gains(users, {drop.base_direction}, 0, config.params);
    if (K == 1) {
        serve_single(t, g.own[0], config.targets, rho);
        return t;
    }
    const FeedbackThreshold xi =
        s.rule.resolve(feedback_thresholds(config.params.split, config.targets, rho), rho, K);
    const bool all_report_one = !(xi.value() > 0.0);
    // Lowest-priority member of each set, and the runner-up for the one-group case.
    int first[2] = {-1, -1};
    int second[2] = {-1, -1};
    for (int k = 0; k < K; ++k) {
        const int set = (all_report_one || xi.gap_to(g.own[k]) > 0.0) ? 1 : 0;
        const double p = users[k].priority;
        if (first[set] < 0 || p < users[first[set]].priority) {
            second[set] = first[set];
            first[set] = k;
        } else if (second[set] < 0 || p < users[second[set]].priority) {
            second[set] = k;
        }
    }
    if (first[0] >= 0 && first[1] >= 0) {
        t.weak_user = first[0];
        t.strong_user = first[1];
    } else {
        const int set = first[0] >= 0 ? 0 : 1;
        t.weak_user = first[set];
        t.strong_user = second[set];
        if (drop.role_coin) {
            std::swap(t.weak_user, t.strong_user);
        }
    }
    t.weak_exists = t.strong_exists = true;
    score_pair(t, g.own[t.weak_user], g.own[t.strong_user], config, rho);
    return t;
}

TrialOutcome eval_multibeam(const MultiBeam& s, const Drop& drop, const SimConfig& config, double rho)
{
    TrialOutcome t;
    const int n = s.beams;
    std::vector<double> dirs(n);
    for (int m = 0; m < n; ++m) {
        dirs[m] = wrap_direction(drop.base_direction + 2.0 * m / n);
    }
    const RateTargets& tg = config.targets;
    for (int m = 0; m < n; ++m) {
        const auto& users = drop.sectors[m];
        const int K = static_cast<int>(users.size());
        const std::vector<int> idx = order_by_distance(users);
        const bool weak_exists = K >= s.pair.weak_order;
        const bool strong_exists = K >= s.pair.strong_order;
        OutageFlags noma;
        OutageFlags oma;
        int weak = -1;
        int strong = -1;
        if (strong_exists) {
            const Gains g = sector_gains(users, dirs, m, config.params);
            strong = idx[s.pair.strong_order - 1];
            const int partner = weak_exists ? idx[s.pair.weak_order - 1] : strong;
            noma = multibeam_outage_events(g.own[partner], g.interference[partner], g.own[strong],
                                           g.interference[strong], config.params.split, tg, rho);
            oma.weak = multibeam_oma_outage_event(g.own[partner], g.interference[partner], tg.weak_rate, rho);
            oma.strong = multibeam_oma_outage_event(g.own[strong], g.interference[strong], tg.strong_rate, rho);
            if (weak_exists) {
                weak = partner;
            } else {
                noma.weak = oma.weak = true;
            }
        }
        t.noma_rate += (noma.weak ? 0.0 : tg.weak_rate) + (noma.strong ? 0.0 : tg.strong_rate);
        t.oma_rate += (oma.weak ? 0.0 : tg.weak_rate) + (oma.strong ? 0.0 : tg.strong_rate);
        if (m == 0) {
            t.users = K;
            t.weak_exists = weak_exists;
            t.strong_exists = strong_exists;
            t.weak_user = weak;
            t.strong_user = strong;
            t.noma = noma;
            t.oma = oma;
        }
    }
    return t;
}

} // namespace

TrialOutcome evaluate_drop(const Drop& drop, const SimConfig& config, double rho)
{
    return std::visit(overloaded{
                          [&](const PerfectCsi& s) { return eval_perfect(s, drop, config, rho); },
                          [&](const DistanceOnly& s) { return eval_distance(s, drop, config, rho); },
                          [&](const OneBit& s) { return eval_onebit(s, drop, config, rho); },
                          [&](const MultiBeam& s) { return eval_multibeam(s, drop, config, rho); },
                      },
                      config.scheme);
}

TrialOutcome run_trial(const SimConfig& config, double transmit_dbm, Rng& rng)
{
    const Drop drop = draw_drop(config, rng);
    return evaluate_drop(drop, config, config.params.rho(transmit_dbm));
}

// ---------------------------------------------------------------------------

void OutageTally::add(bool exists, bool in_outage)
{
    ++total;
    if (!exists) {
        ++excluded;
    } else if (in_outage) {
        ++outage;
    }
}

void OutageTally::merge(const OutageTally& other)
{
    total += other.total;
    excluded += other.excluded;
    outage += other.outage;
}

namespace {

double bernoulli_stderr(double p, std::uint64_t n)
{
    if (n < 2) {
        return 0.0;
    }
    return std::sqrt(std::max(0.0, p * (1.0 - p)) / static_cast<double>(n - 1));
}

} // namespace

double OutageTally::probability() const
{
    return total ? static_cast<double>(excluded + outage) / static_cast<double>(total) : 0.0;
}

double OutageTally::probability_stderr() const
{
    return bernoulli_stderr(probability(), total);
}

double OutageTally::conditional() const
{
    const std::uint64_t n = total - excluded;
    return n ? static_cast<double>(outage) / static_cast<double>(n) : 0.0;
}

double OutageTally::conditional_stderr() const
{
    return bernoulli_stderr(conditional(), total - excluded);
}

void RateTally::add(double x)
{
    ++count;
    sum += x;
    sum_squares += x * x;
}

void RateTally::merge(const RateTally& other)
{
    count += other.count;
    sum += other.sum;
    sum_squares += other.sum_squares;
}

double RateTally::mean() const
{
    return count ? sum / static_cast<double>(count) : 0.0;
}

double RateTally::stderr_of_mean() const
{
    if (count < 2) {
        return 0.0;
    }
    const double n = static_cast<double>(count);
    const double var = std::max(0.0, (sum_squares - sum * sum / n) / (n - 1.0));
    return std::sqrt(var / n);
}

void Aggregate::add(const TrialOutcome& t)
{
    weak.add(t.weak_exists, t.noma.weak);
    strong.add(t.strong_exists, t.noma.strong);
    oma_weak.add(t.weak_exists, t.oma.weak);
    oma_strong.add(t.strong_exists, t.oma.strong);
    noma_rate.add(t.noma_rate);
    oma_rate.add(t.oma_rate);
}

void Aggregate::merge(const Aggregate& other)
{
    weak.merge(other.weak);
    strong.merge(other.strong);
    oma_weak.merge(other.oma_weak);
    oma_strong.merge(other.oma_strong);
    noma_rate.merge(other.noma_rate);
    oma_rate.merge(other.oma_rate);
}

// ---------------------------------------------------------------------------

namespace {

constexpr std::uint64_t chunk_size = 2048;

} // namespace

std::vector<Aggregate> sweep(const SimConfig& config, const std::vector<double>& power_dbm, std::uint64_t n_trials,
                             std::uint64_t master_seed, unsigned threads)
{
    config.validate();
    if (n_trials < 1) {
        throw std::invalid_argument("trials: must be >= 1");
    }
    if (power_dbm.empty()) {
        throw std::invalid_argument("power grid: must not be empty");
    }
    std::vector<double> rho;
    rho.reserve(power_dbm.size());
    for (double p : power_dbm) {
        rho.push_back(config.params.rho(p));
    }

    const std::uint64_t n_chunks = (n_trials + chunk_size - 1) / chunk_size;
    // Partial sums per chunk, merged in chunk order below so the floating-point
    // result is the same for every thread count.
    std::vector<std::vector<Aggregate>> partial(n_chunks, std::vector<Aggregate>(rho.size()));
    std::atomic<std::uint64_t> next{0};
    std::exception_ptr error;
    std::atomic<bool> failed{false};

    auto worker = [&]() {
        try {
            for (std::uint64_t c = next++; c < n_chunks && !failed; c = next++) {
                const std::uint64_t begin = c * chunk_size;
                const std::uint64_t end = std::min(n_trials, begin + chunk_size);
                auto& acc = partial[c];
                for (std::uint64_t trial = begin; trial < end; ++trial) {
                    Rng rng(trial_seed(master_seed, trial));
                    const Drop drop = draw_drop(config, rng);
                    for (std::size_t p = 0; p < rho.size(); ++p) {
                        acc[p].add(evaluate_drop(drop, config, rho[p]));
                    }
                }
            }
        } catch (...) {
            if (!failed.exchange(true)) {
                error = std::current_exception();
            }
        }
    };

    unsigned n_threads = threads ? threads : std::max(1u, std::thread::hardware_concurrency());
    n_threads = static_cast<unsigned>(std::min<std::uint64_t>(n_threads, n_chunks));
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_threads);
        for (unsigned k = 0; k < n_threads; ++k) {
            pool.emplace_back(worker);
        }
        for (auto& th : pool) {
            th.join();
        }
    }
    if (error) {
        std::rethrow_exception(error);
    }

    std::vector<Aggregate> out(rho.size());
    for (const auto& chunk : partial) {
        for (std::size_t p = 0; p < rho.size(); ++p) {
            out[p].merge(chunk[p]);
        }
    }
    return out;
}

Aggregate run_experiment(const SimConfig& config, double transmit_dbm, std::uint64_t n_trials,
                         std::uint64_t master_seed, unsigned threads)
{
    return sweep(config, {transmit_dbm}, n_trials, master_seed, threads).front();
}

} // namespace mmnoma
