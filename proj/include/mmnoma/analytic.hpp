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

#ifndef MMNOMA_ANALYTIC_HPP
#define MMNOMA_ANALYTIC_HPP

#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "mmnoma/noma.hpp"
#include "mmnoma/system.hpp"

namespace mmnoma {

// ---------------------------------------------------------------------------
// Quadrature cache
// ---------------------------------------------------------------------------

/// Cached 2-D quadrature of y -> int w(r, offset) (1 - exp(-y s(r, offset))) over
/// the sector. Every gain CDF and every outage integral in this module has
/// that shape: w is a location density and s the per-location gain scale.
/// A node with s = +inf contributes its full weight for every y > 0.
class ExponentialMixture {
public:
    struct Spec {
        /// Radial weight per unit r (already including the 1/(2 Delta) angular density).
        std::function<double(double)> radial_weight;
        /// Scale s(r, offset) for offset in [0, Delta]; must be even in offset.
        std::function<double(double, double)> scale;
        /// Offsets in (0, Delta) where s has a kink or becomes infinite.
        std::vector<double> offset_breakpoints;
        /// y values whose CDF must converge during refinement.
        std::vector<double> probes;
        double abs_tol = 1e-10;
        double rel_tol = 1e-8;
        /// Extra doublings past convergence (used by the self-convergence tests).
        int extra_refinements = 0;
    };

    ExponentialMixture() = default;
    ExponentialMixture(const Spec& spec, double radius, double half_angle);

    /// int w (1 - e^{-y s}).
    double cdf(double y) const;
    /// int w e^{-y s}: mass() - cdf(y) without cancellation.
    double survival(double y) const;
    /// cdf(y + dy) - cdf(y) for dy >= 0, accurate even when dy << y.
    double increment(double y, double dy) const;
    /// Total weight, the y -> inf limit of cdf.
    double mass() const { return mass_; }

    /// Largest probe change at the final refinement step.
    double achieved_error() const noexcept { return achieved_error_; }
    std::size_t node_count() const noexcept { return weights_.size(); }

private:
    std::vector<double> weights_;
    std::vector<double> scales_;
    double mass_ = 0.0;
    double achieved_error_ = 0.0;
};

/// CDF of an effective channel gain |h^H p|^2 for a user drawn from a
/// location law over the sector. Built once, then shared read-only.
class GainDistribution {
public:
    /// Unordered gain of a uniformly chosen LOS user in the sector (a proper CDF).
    static GainDistribution unordered(const SystemParams& params, int extra_refinements = 0);
    /// Gain of the k-th nearest LOS user, built from the unconditioned k-th
    /// distance density; its total mass is P(K >= k), not one.
    static GainDistribution kth_nearest(const SystemParams& params, int k, int extra_refinements = 0);

    double cdf(double y) const;
    double survival(double y) const { return mixture_.survival(y); }
    double increment(double y, double dy) const { return mixture_.increment(y, dy); }
    double mass() const { return mixture_.mass(); }
    double achieved_error() const { return mixture_.achieved_error(); }
    std::size_t node_count() const { return mixture_.node_count(); }

private:
    explicit GainDistribution(ExponentialMixture m) : mixture_(std::move(m)) {}
    ExponentialMixture mixture_;
};

// ---------------------------------------------------------------------------
// Perfect CSI, single beam
// ---------------------------------------------------------------------------

/// Convenience: builds the unordered distribution and evaluates it once.
double unordered_gain_cdf(double y, const SystemParams& params);

/// Small-Delta, small-y slope of the unordered CDF:
/// (2 + pi^2 M^2 Delta^2 / 18)(gamma(2, R phi) + phi^-alpha gamma(alpha + 2, R phi)) / (2 M gamma(2, R phi)).
double c2_single(const SystemParams& params);

/// High-SNR closed form c2_single * y of the unordered CDF.
double unordered_gain_cdf_high_snr(double y, const SystemParams& params);

/// P(j-th smallest of K i.i.d. draws <= y) given p = F(y), as a binomial tail sum.
double order_statistic_cdf(int j, int K, double p);
/// Same quantity through the regularized incomplete beta I_p(j, K - j + 1).
double order_statistic_cdf_beta(int j, int K, double p);
/// c_j sum_p C(K-j, p) (-1)^p p^{j+p} / (j+p), the alternating form.
double order_statistic_alternating_sum(int j, int K, double p);

double ordered_gain_cdf(const GainDistribution& dist, int j, int K, double y);

/// Outage of the order-`index` user among K at gain threshold eta.
///
/// Uses the alternating sum while its cancellation is harmless (binomial
/// coefficients below 1e6) and the positive binomial form otherwise; the
/// two are the same polynomial.
double conditional_outage(const GainDistribution& dist, int index, int K, double eta);

struct PairOutage {
    double weak = 1.0;
    double strong = 1.0;
};

/// Weak (order i) and strong (order j) outage conditioned on K users; one when infeasible.
PairOutage conditional_pair_outage(const GainDistribution& dist, int i, int j, int K, const PowerSplit& split,
                                   const RateTargets& targets, double rho);

/// OMA outage of the order-i and order-j users conditioned on K, at doubled rates.
PairOutage conditional_oma_outage(const GainDistribution& dist, int i, int j, int K, const RateTargets& targets,
                                  double rho);

/// Which ordered users form the NOMA pair.
struct PairSelection {
    int weak_index = 1;
    /// 0 means "the strongest user", j = K for every realized K.
    int strong_index = 0;
    /// When the pair cannot be formed (K < j), false credits zero rate and
    /// true falls back to j = K (if that still leaves i < j).
    bool clamp_to_available = false;

    /// Strong index to use with K users, or nullopt when no pair exists.
    std::optional<int> strong_for(int K) const;
};

/// Outage sum rate of NOMA, averaged over the Poisson user count.
double noma_sum_rate(const GainDistribution& dist, const SystemParams& params, const RateTargets& targets,
                     const PairSelection& pair, double rho);
/// Same, OMA benchmark.
double oma_sum_rate(const GainDistribution& dist, const SystemParams& params, const RateTargets& targets,
                    const PairSelection& pair, double rho);
/// Sum rate conditioned on exactly K users (K >= 2).
double noma_sum_rate_given(const GainDistribution& dist, int K, const RateTargets& targets,
                           const PairSelection& pair, const PowerSplit& split, double rho);
double oma_sum_rate_given(const GainDistribution& dist, int K, const RateTargets& targets,
                          const PairSelection& pair, double rho);

/// High-SNR, small-Delta outage c_index (c2_single eta)^index / index.
double asymptotic_conditional_outage(int index, int K, double eta, const SystemParams& params);

// ---------------------------------------------------------------------------
// Distance-only scheduling
// ---------------------------------------------------------------------------

/// F_k(y) of the k-th nearest user; mass P(K >= k).
double distance_scheme_gain_cdf(const GainDistribution& kth, double y);

/// Outage of the k-th nearest user at gain threshold eta, including the
/// probability that fewer than k users exist.
double distance_scheme_outage(const GainDistribution& kth, int k, double eta, const SystemParams& params);

/// The same outage counted only over drops where the k-th nearest user exists.
double distance_scheme_conditional_outage(const GainDistribution& kth, int k, double eta,
                                          const SystemParams& params);

struct DistancePair {
    int weak_order = 4;   ///< i, farther
    int strong_order = 1; ///< j, nearer, j < i
};

struct SchemeOutage {
    double weak = 1.0;
    double strong = 1.0;
};

/// Per-user NOMA outage (with existence floor) for the distance scheme.
SchemeOutage distance_noma_outage(const GainDistribution& weak_kth, const GainDistribution& strong_kth,
                                  const DistancePair& pair, const SystemParams& params,
                                  const RateTargets& targets, double rho);
SchemeOutage distance_oma_outage(const GainDistribution& weak_kth, const GainDistribution& strong_kth,
                                 const DistancePair& pair, const SystemParams& params,
                                 const RateTargets& targets, double rho);

double distance_sum_rate(const GainDistribution& weak_kth, const GainDistribution& strong_kth,
                         const DistancePair& pair, const SystemParams& params, const RateTargets& targets,
                         double rho);
double distance_oma_sum_rate(const GainDistribution& weak_kth, const GainDistribution& strong_kth,
                             const DistancePair& pair, const SystemParams& params,
                             const RateTargets& targets, double rho);

/// int_0^R ((1 + r^alpha) / M) f_{d_i}(r) dr with f_{d_i} the i-th distance density.
double q_factor(int i, const SystemParams& params);

/// Small-y form (1 + pi^2 M^2 Delta^2 / 36) Q_i y of F_i.
double distance_scheme_gain_cdf_high_snr(int i, double y, const SystemParams& params);

// ---------------------------------------------------------------------------
// One-bit feedback
// ---------------------------------------------------------------------------

/// Feedback threshold xi = anchor - below. Keeping the two parts apart lets
/// xi sit a distance rho^-K under a gain threshold without rounding to it.
struct FeedbackThreshold {
    double anchor = 0.0;
    double below = 0.0;

    double value() const { return anchor - below; }
    /// y - xi computed as (y - anchor) + below.
    double gap_to(double y) const { return (y - anchor) + below; }
};

enum class ThresholdRuleKind { fixed, midpoint, diversity };

/// How the base station sets xi at a given SNR and user count.
struct ThresholdRule {
    ThresholdRuleKind kind = ThresholdRuleKind::midpoint;
    double fixed_value = 0.0;

    /// fixed: xi = fixed_value; midpoint: (eta1 + eta2) / 2; diversity: eta2 - rho^-K.
    FeedbackThreshold resolve(const EtaThresholds& eta, double rho, int K) const;
};

enum class Role { weak, strong };

/// Gain thresholds handed to a ThresholdRule. When NOMA is infeasible both
/// entries fall back to the strong user's own-message threshold.
EtaThresholds feedback_thresholds(const PowerSplit& split, const RateTargets& targets, double rho);

/// P(|S_2| = n) = C(K, n) F(xi)^{K-n} (1 - F(xi))^n.
double onebit_set_pmf(int n, int K, const FeedbackThreshold& xi, const GainDistribution& dist);

struct SetCdfs {
    double s1 = 0.0;
    double s2 = 0.0;
};

/// CDFs of a user picked from S_1 (gain <= xi) and from S_2 (gain > xi).
SetCdfs onebit_conditional_cdfs(double y, const FeedbackThreshold& xi, const GainDistribution& dist);

/// Outage of the user selected for `role` among K >= 2 users.
double onebit_outage(Role role, int K, const FeedbackThreshold& xi, const PowerSplit& split,
                     const RateTargets& targets, double rho, const GainDistribution& dist);

/// OMA outage of the one-bit selections (each selected user at doubled rate).
double onebit_oma_outage(Role role, int K, const FeedbackThreshold& xi, const RateTargets& targets, double rho,
                         const GainDistribution& dist);

/// Sum rates averaged over K, with the lone user served by OMA when K = 1.
double onebit_sum_rate(const GainDistribution& dist, const SystemParams& params, const RateTargets& targets,
                       const ThresholdRule& rule, double rho);
double onebit_oma_sum_rate(const GainDistribution& dist, const SystemParams& params, const RateTargets& targets,
                           const ThresholdRule& rule, double rho);
double onebit_sum_rate_given(const GainDistribution& dist, int K, const PowerSplit& split,
                             const RateTargets& targets, const ThresholdRule& rule, double rho);
double onebit_oma_sum_rate_given(const GainDistribution& dist, int K, const PowerSplit& split,
                                 const RateTargets& targets, const ThresholdRule& rule, double rho);

// ---------------------------------------------------------------------------
// Multiple beams
// ---------------------------------------------------------------------------

/// Which SINR test defines outage: NOMA weak (direct decoding), NOMA strong
/// (SIC then own message), or OMA at doubled rate for either user.
enum class MultibeamLink { noma_weak, noma_strong, oma_weak, oma_strong };

/// Outage integral of one scheduled user (by distance order) on beam 1 of
/// an N-beam set. Rho-independent, so one instance serves a whole power sweep.
class MultibeamOutage {
public:
    MultibeamOutage(const SystemParams& params, int beams, int order, MultibeamLink link,
                    const RateTargets& targets, int extra_refinements = 0);

    /// Outage including the probability that the order-th user does not exist.
    double outage(double rho) const;
    /// Outage counted over drops where the user exists.
    double conditional_outage(double rho) const;
    double achieved_error() const { return mixture_.achieved_error(); }

private:
    ExponentialMixture mixture_;
    double exists_ = 1.0;
};

/// Interference-free-direction constants of the high-SNR multi-beam analysis.
struct AsymptoticConstants {
    double c2_single = 0.0;       ///< single-beam small-y CDF slope
    double c2_interference = 0.0; ///< sum_{n != 1} F_M(-2 (n-1) pi / N)
    double c3 = 0.0;              ///< sum_{n != 1} F_M'(-2 (n-1) pi / N)
    double c4 = 0.0;              ///< beta_weak^2 - eps_weak beta_strong^2
    std::vector<double> q;        ///< q[i-1] = q_factor(i)
};

AsymptoticConstants asymptotic_constants(const SystemParams& params, int beams, const RateTargets& targets,
                                         int max_order);

/// High-SNR weak-user outage M Q_i eps / (rho (M c4 - c2 eps)) on beam 1, with
/// Q_i = q_factor(i). Counted over drops where the user exists.
/// Throws DomainError when M c4 <= c2 eps.
double multibeam_outage_approx(int i, double rho, const AsymptoticConstants& constants,
                               const SystemParams& params, const RateTargets& targets);

/// Total sum rate over the N beams (each beam its own NOMA or OMA pair).
double multibeam_sum_rate(const MultibeamOutage& weak, const MultibeamOutage& strong, int beams,
                          const RateTargets& targets, double rho);

} // namespace mmnoma

#endif
