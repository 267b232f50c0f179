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

#include "mmnoma/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include <boost/math/special_functions/beta.hpp>

#include "mmnoma/geometry.hpp"
#include "mmnoma/mathkit.hpp"
#include "mmnoma/quadrature.hpp"

namespace mmnoma {

void SystemParams::validate() const
{
    if (antennas < 1) {
        throw std::invalid_argument("antennas must be >= 1");
    }
    if (!(path_loss_exponent > 0.0)) {
        throw std::invalid_argument("path_loss_exponent must be positive");
    }
    mmnoma::validate(sector());
    mmnoma::validate(deployment());
    split.validate();
}

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();
constexpr int mixture_order = 10;
constexpr int max_refinement_level = 6;

std::vector<double> default_probes()
{
    std::vector<double> probes;
    for (int e = -10; e <= 2; ++e) {
        probes.push_back(std::pow(10.0, e));
        probes.push_back(3.0 * std::pow(10.0, e));
    }
    return probes;
}

} // namespace

ExponentialMixture::ExponentialMixture(const Spec& spec, double radius, double half_angle)
{
    const auto probes = spec.probes.empty() ? default_probes() : spec.probes;

    auto build = [&](int level, std::vector<double>& weights, std::vector<double>& scales) {
        const CompositeRule radial = composite_rule(0.0, radius, 2 << level, mixture_order);
        const CompositeRule angular =
            composite_rule(0.0, half_angle, 1 << level, mixture_order, spec.offset_breakpoints);
        weights.clear();
        scales.clear();
        weights.reserve(radial.nodes.size() * angular.nodes.size());
        scales.reserve(radial.nodes.size() * angular.nodes.size());
        for (std::size_t a = 0; a < radial.nodes.size(); ++a) {
            const double r = radial.nodes[a];
            const double wr = spec.radial_weight(r) * radial.weights[a];
            if (wr == 0.0) {
                continue;
            }
            for (std::size_t b = 0; b < angular.nodes.size(); ++b) {
                weights.push_back(wr * angular.weights[b] / half_angle);
                scales.push_back(spec.scale(r, angular.nodes[b]));
            }
        }
    };

    auto evaluate = [&](const std::vector<double>& weights, const std::vector<double>& scales) {
        ExponentialMixture tmp;
        tmp.weights_ = weights;
        tmp.scales_ = scales;
        std::vector<double> values;
        values.reserve(probes.size());
        for (const double y : probes) {
            values.push_back(tmp.cdf(y));
        }
        return values;
    };

    std::vector<double> previous;
    int converged_at = -1;
    for (int level = 0; level <= max_refinement_level; ++level) {
        build(level, weights_, scales_);
        const auto values = evaluate(weights_, scales_);
        if (level > 0) {
            double worst = 0.0;
            double worst_abs = 0.0;
            for (std::size_t p = 0; p < values.size(); ++p) {
                const double diff = std::abs(values[p] - previous[p]);
                const double tol = spec.abs_tol + spec.rel_tol * std::abs(values[p]);
                worst = std::max(worst, diff / tol);
                worst_abs = std::max(worst_abs, diff);
            }
            if (converged_at < 0) {
                achieved_error_ = worst_abs;
            }
            if (converged_at < 0 && worst <= 1.0) {
                converged_at = level;
            }
            if (converged_at >= 0 && level >= converged_at + spec.extra_refinements) {
                break;
            }
        }
        previous = values;
        if (level == max_refinement_level && converged_at < 0) {
            throw QuadratureError("sector quadrature did not converge", achieved_error_);
        }
    }
    mass_ = 0.0;
    for (const double w : weights_) {
        mass_ += w;
    }
}

double ExponentialMixture::cdf(double y) const
{
    if (!(y > 0.0)) {
        return 0.0;
    }
    double sum = 0.0;
    for (std::size_t n = 0; n < weights_.size(); ++n) {
        const double s = scales_[n];
        sum += s == inf ? weights_[n] : -weights_[n] * std::expm1(-y * s);
    }
    return sum;
}

double ExponentialMixture::survival(double y) const
{
    if (!(y > 0.0)) {
        return mass_;
    }
    double sum = 0.0;
    for (std::size_t n = 0; n < weights_.size(); ++n) {
        const double s = scales_[n];
        if (s != inf) {
            sum += weights_[n] * std::exp(-y * s);
        }
    }
    return sum;
}

double ExponentialMixture::increment(double y, double dy) const
{
    if (!(dy > 0.0)) {
        return 0.0;
    }
    if (!(y > 0.0)) {
        return cdf(dy);
    }
    double sum = 0.0;
    for (std::size_t n = 0; n < weights_.size(); ++n) {
        const double s = scales_[n];
        if (s != inf) {
            sum += -weights_[n] * std::exp(-y * s) * std::expm1(-dy * s);
        }
    }
    return sum;
}

// ---------------------------------------------------------------------------

namespace {

double kernel_scale(const SystemParams& params, double r, double offset)
{
    const double kernel = fejer_kernel(pi * offset, params.antennas);
    if (kernel <= 0.0) {
        return inf;
    }
    return (1.0 + std::pow(r, params.path_loss_exponent)) / kernel;
}

// Offsets in (0, Delta) where the main-lobe kernel vanishes.
std::vector<double> kernel_nulls(const SystemParams& params)
{
    std::vector<double> out;
    for (int k = 1; 2.0 * k / params.antennas < params.half_angle; ++k) {
        out.push_back(2.0 * k / params.antennas);
    }
    return out;
}

} // namespace

GainDistribution GainDistribution::unordered(const SystemParams& params, int extra_refinements)
{
    params.validate();
    const double phi = params.blockage;
    const double norm = lower_incomplete_gamma2(params.radius * phi);
    ExponentialMixture::Spec spec;
    spec.radial_weight = [phi, norm](double r) { return phi * phi * std::exp(-phi * r) * r / norm; };
    spec.scale = [params](double r, double offset) { return kernel_scale(params, r, offset); };
    spec.offset_breakpoints = kernel_nulls(params);
    spec.extra_refinements = extra_refinements;
    return GainDistribution(ExponentialMixture(spec, params.radius, params.half_angle));
}

GainDistribution GainDistribution::kth_nearest(const SystemParams& params, int k, int extra_refinements)
{
    params.validate();
    if (k < 1) {
        throw std::invalid_argument("kth_nearest: k must be >= 1");
    }
    const SectorRegion region = params.sector();
    const DeploymentParams deploy = params.deployment();
    ExponentialMixture::Spec spec;
    spec.radial_weight = [k, region, deploy](double r) { return ordered_distance_pdf(k, r, region, deploy); };
    spec.scale = [params](double r, double offset) { return kernel_scale(params, r, offset); };
    spec.offset_breakpoints = kernel_nulls(params);
    spec.extra_refinements = extra_refinements;
    return GainDistribution(ExponentialMixture(spec, params.radius, params.half_angle));
}

double GainDistribution::cdf(double y) const
{
    return mixture_.cdf(y);
}

double unordered_gain_cdf(double y, const SystemParams& params)
{
    return GainDistribution::unordered(params).cdf(y);
}

double c2_single(const SystemParams& params)
{
    const double m = params.antennas;
    const double delta = params.half_angle;
    const double phi = params.blockage;
    const double alpha = params.path_loss_exponent;
    const double x = params.radius * phi;
    const double g2 = lower_incomplete_gamma2(x);
    const double angular = 2.0 + pi * pi * m * m * delta * delta / 18.0;
    const double radial = g2 + std::pow(phi, -alpha) * lower_incomplete_gamma(alpha + 2.0, x);
    return angular * radial / (2.0 * m * g2);
}

double unordered_gain_cdf_high_snr(double y, const SystemParams& params)
{
    return c2_single(params) * y;
}

// ---------------------------------------------------------------------------

namespace {

void check_order(int j, int K)
{
    if (j < 1 || j > K) {
        throw std::invalid_argument("order index must satisfy 1 <= j <= K");
    }
}

} // namespace

double order_statistic_cdf(int j, int K, double p)
{
    check_order(j, K);
    if (p <= 0.0) {
        return 0.0;
    }
    if (p >= 1.0) {
        return 1.0;
    }
    const double q = 1.0 - p;
    double sum = 0.0;
    for (int n = K; n >= j; --n) {
        sum += binomial(K, n) * std::pow(p, n) * std::pow(q, K - n);
    }
    return std::min(1.0, sum);
}

double order_statistic_cdf_beta(int j, int K, double p)
{
    check_order(j, K);
    if (p <= 0.0) {
        return 0.0;
    }
    if (p >= 1.0) {
        return 1.0;
    }
    return boost::math::ibeta(static_cast<double>(j), static_cast<double>(K - j + 1), p);
}

double order_statistic_alternating_sum(int j, int K, double p)
{
    check_order(j, K);
    const double c = j * binomial(K, j);
    double sum = 0.0;
    for (int q = 0; q <= K - j; ++q) {
        const double term = binomial(K - j, q) * std::pow(p, j + q) / (j + q);
        sum += (q % 2 == 0) ? term : -term;
    }
    return c * sum;
}

double ordered_gain_cdf(const GainDistribution& dist, int j, int K, double y)
{
    return order_statistic_cdf(j, K, dist.cdf(y));
}

double conditional_outage(const GainDistribution& dist, int index, int K, double eta)
{
    check_order(index, K);
    const double p = dist.cdf(eta);
    const int spread = K - index;
    if (binomial(spread, spread / 2) < 1e6) {
        return std::clamp(order_statistic_alternating_sum(index, K, p), 0.0, 1.0);
    }
    return order_statistic_cdf(index, K, p);
}

PairOutage conditional_pair_outage(const GainDistribution& dist, int i, int j, int K, const PowerSplit& split,
                                   const RateTargets& targets, double rho)
{
    if (!(i < j)) {
        throw std::invalid_argument("perfect-CSI pair requires i < j");
    }
    const auto eta = eta_thresholds(split, targets, rho);
    if (!eta) {
        return {};
    }
    return {conditional_outage(dist, i, K, eta->weak), conditional_outage(dist, j, K, eta->strong)};
}

PairOutage conditional_oma_outage(const GainDistribution& dist, int i, int j, int K, const RateTargets& targets,
                                  double rho)
{
    const double y_weak = rate_threshold(2.0 * targets.weak_rate) / rho;
    const double y_strong = rate_threshold(2.0 * targets.strong_rate) / rho;
    return {ordered_gain_cdf(dist, i, K, y_weak), ordered_gain_cdf(dist, j, K, y_strong)};
}

std::optional<int> PairSelection::strong_for(int K) const
{
    int j = strong_index == 0 ? K : strong_index;
    if (j > K) {
        if (!clamp_to_available) {
            return std::nullopt;
        }
        j = K;
    }
    if (weak_index >= j || weak_index < 1) {
        return std::nullopt;
    }
    return j;
}

double noma_sum_rate_given(const GainDistribution& dist, int K, const RateTargets& targets,
                           const PairSelection& pair, const PowerSplit& split, double rho)
{
    const auto j = pair.strong_for(K);
    if (!j) {
        return 0.0;
    }
    const PairOutage out = conditional_pair_outage(dist, pair.weak_index, *j, K, split, targets, rho);
    return (1.0 - out.weak) * targets.weak_rate + (1.0 - out.strong) * targets.strong_rate;
}

double oma_sum_rate_given(const GainDistribution& dist, int K, const RateTargets& targets,
                          const PairSelection& pair, double rho)
{
    const auto j = pair.strong_for(K);
    if (!j) {
        return 0.0;
    }
    const PairOutage out = conditional_oma_outage(dist, pair.weak_index, *j, K, targets, rho);
    return (1.0 - out.weak) * targets.weak_rate + (1.0 - out.strong) * targets.strong_rate;
}

namespace {

// The lone user of a K = 1 drop is served by OMA at the weak target rate.
double single_user_term(const GainDistribution& dist, const RateTargets& targets, double rho)
{
    const double outage = dist.cdf(rate_threshold(2.0 * targets.weak_rate) / rho);
    return (1.0 - outage) * targets.weak_rate;
}

template <typename PerCount>
double average_over_count(const SystemParams& params, const GainDistribution& dist, const RateTargets& targets,
                          double rho, PerCount&& per_count)
{
    const double mu = params.mean_users();
    const int k_max = poisson_truncation(mu);
    double total = poisson_pmf(1, mu) * single_user_term(dist, targets, rho);
    for (int k = 2; k <= k_max; ++k) {
        total += poisson_pmf(k, mu) * per_count(k);
    }
    return total;
}

} // namespace

double noma_sum_rate(const GainDistribution& dist, const SystemParams& params, const RateTargets& targets,
                     const PairSelection& pair, double rho)
{
    return average_over_count(params, dist, targets, rho, [&](int k) {
        return noma_sum_rate_given(dist, k, targets, pair, params.split, rho);
    });
}

double oma_sum_rate(const GainDistribution& dist, const SystemParams& params, const RateTargets& targets,
                    const PairSelection& pair, double rho)
{
    return average_over_count(params, dist, targets, rho,
                              [&](int k) { return oma_sum_rate_given(dist, k, targets, pair, rho); });
}

double asymptotic_conditional_outage(int index, int K, double eta, const SystemParams& params)
{
    check_order(index, K);
    const double c = index * binomial(K, index);
    const double f = unordered_gain_cdf_high_snr(eta, params);
    return c * std::pow(f, index) / index;
}

// ---------------------------------------------------------------------------

double distance_scheme_gain_cdf(const GainDistribution& kth, double y)
{
    return kth.cdf(y);
}

double distance_scheme_outage(const GainDistribution& kth, int k, double eta, const SystemParams& params)
{
    const double exists = count_at_least(k, params.mean_users());
    return (1.0 - exists) + kth.cdf(eta);
}

double distance_scheme_conditional_outage(const GainDistribution& kth, int k, double eta,
                                          const SystemParams& params)
{
    const double exists = count_at_least(k, params.mean_users());
    return exists > 0.0 ? kth.cdf(eta) / exists : 1.0;
}

namespace {

void check_distance_pair(const DistancePair& pair)
{
    if (!(pair.strong_order >= 1 && pair.weak_order > pair.strong_order)) {
        throw std::invalid_argument("distance pair requires 1 <= j < i");
    }
}

} // namespace

SchemeOutage distance_noma_outage(const GainDistribution& weak_kth, const GainDistribution& strong_kth,
                                  const DistancePair& pair, const SystemParams& params,
                                  const RateTargets& targets, double rho)
{
    check_distance_pair(pair);
    const auto eta = eta_thresholds(params.split, targets, rho);
    if (!eta) {
        return {};
    }
    return {distance_scheme_outage(weak_kth, pair.weak_order, eta->weak, params),
            distance_scheme_outage(strong_kth, pair.strong_order, eta->strong, params)};
}

SchemeOutage distance_oma_outage(const GainDistribution& weak_kth, const GainDistribution& strong_kth,
                                 const DistancePair& pair, const SystemParams& params,
                                 const RateTargets& targets, double rho)
{
    check_distance_pair(pair);
    const double y_weak = rate_threshold(2.0 * targets.weak_rate) / rho;
    const double y_strong = rate_threshold(2.0 * targets.strong_rate) / rho;
    return {distance_scheme_outage(weak_kth, pair.weak_order, y_weak, params),
            distance_scheme_outage(strong_kth, pair.strong_order, y_strong, params)};
}

double distance_sum_rate(const GainDistribution& weak_kth, const GainDistribution& strong_kth,
                         const DistancePair& pair, const SystemParams& params, const RateTargets& targets,
                         double rho)
{
    const SchemeOutage out = distance_noma_outage(weak_kth, strong_kth, pair, params, targets, rho);
    return (1.0 - out.strong) * targets.strong_rate + (1.0 - out.weak) * targets.weak_rate;
}

double distance_oma_sum_rate(const GainDistribution& weak_kth, const GainDistribution& strong_kth,
                             const DistancePair& pair, const SystemParams& params,
                             const RateTargets& targets, double rho)
{
    const SchemeOutage out = distance_oma_outage(weak_kth, strong_kth, pair, params, targets, rho);
    return (1.0 - out.strong) * targets.strong_rate + (1.0 - out.weak) * targets.weak_rate;
}

double q_factor(int i, const SystemParams& params)
{
    params.validate();
    const SectorRegion region = params.sector();
    const DeploymentParams deploy = params.deployment();
    const double m = params.antennas;
    const double alpha = params.path_loss_exponent;
    auto integrand = [&](double r) {
        return (1.0 + std::pow(r, alpha)) / m * ordered_distance_pdf(i, r, region, deploy);
    };
    return integrate(integrand, 0.0, params.radius, 1e-14, 1e-12).value;
}

double distance_scheme_gain_cdf_high_snr(int i, double y, const SystemParams& params)
{
    const double m = params.antennas;
    const double delta = params.half_angle;
    return (1.0 + pi * pi * m * m * delta * delta / 36.0) * q_factor(i, params) * y;
}

// ---------------------------------------------------------------------------

FeedbackThreshold ThresholdRule::resolve(const EtaThresholds& eta, double rho, int K) const
{
    switch (kind) {
    case ThresholdRuleKind::fixed:
        return {fixed_value, 0.0};
    case ThresholdRuleKind::midpoint:
        return {0.5 * (eta.weak + eta.strong), 0.0};
    case ThresholdRuleKind::diversity:
        return {eta.strong, std::pow(rho, -static_cast<double>(K))};
    }
    return {fixed_value, 0.0};
}

namespace {

struct ThresholdMass {
    double below = 0.0; // F(xi)
    double above = 1.0; // 1 - F(xi)
};

ThresholdMass threshold_mass(const FeedbackThreshold& xi, const GainDistribution& dist)
{
    const double x = xi.value();
    if (!(x > 0.0)) {
        return {0.0, 1.0};
    }
    return {dist.cdf(x), dist.survival(x)};
}

SetCdfs set_cdfs(double y, const FeedbackThreshold& xi, const ThresholdMass& mass, const GainDistribution& dist)
{
    SetCdfs out;
    if (!(xi.value() > 0.0)) {
        // Every user reports 1: S_1 is empty and S_2 holds the whole population.
        out.s1 = 1.0;
        out.s2 = dist.cdf(y);
        return out;
    }
    const double gap = xi.gap_to(y);
    if (gap >= 0.0) {
        out.s1 = 1.0;
    } else {
        out.s1 = mass.below > 0.0 ? dist.cdf(y) / mass.below : 0.0;
    }
    if (gap > 0.0 && mass.above > 0.0) {
        out.s2 = std::min(1.0, dist.increment(xi.value(), gap) / mass.above);
    }
    return out;
}

// CDF of the gain of the user the scheduler picks for `role`, at y.
double selected_cdf(Role role, int K, const FeedbackThreshold& xi, double y, const GainDistribution& dist)
{
    const ThresholdMass mass = threshold_mass(xi, dist);
    const SetCdfs cdfs = set_cdfs(y, xi, mass, dist);
    if (role == Role::strong) {
        const double s2_empty = std::pow(mass.below, K);
        return (1.0 - s2_empty) * cdfs.s2 + s2_empty * cdfs.s1;
    }
    const double s1_empty = std::pow(mass.above, K);
    const double s1_nonempty = mass.above > 0.0 ? -std::expm1(K * std::log(mass.above)) : 1.0;
    return s1_nonempty * cdfs.s1 + s1_empty * cdfs.s2;
}

} // namespace

EtaThresholds feedback_thresholds(const PowerSplit& split, const RateTargets& targets, double rho)
{
    if (const auto eta = eta_thresholds(split, targets, rho)) {
        return *eta;
    }
    const double strong = targets.strong_threshold() / (rho * split.strong_share);
    return {strong, strong};
}

double onebit_set_pmf(int n, int K, const FeedbackThreshold& xi, const GainDistribution& dist)
{
    if (n < 0 || n > K) {
        return 0.0;
    }
    const ThresholdMass mass = threshold_mass(xi, dist);
    return binomial(K, n) * std::pow(mass.below, K - n) * std::pow(mass.above, n);
}

SetCdfs onebit_conditional_cdfs(double y, const FeedbackThreshold& xi, const GainDistribution& dist)
{
    if (!(xi.value() > 0.0)) {
        throw std::invalid_argument("feedback threshold must be positive");
    }
    return set_cdfs(y, xi, threshold_mass(xi, dist), dist);
}

double onebit_outage(Role role, int K, const FeedbackThreshold& xi, const PowerSplit& split,
                     const RateTargets& targets, double rho, const GainDistribution& dist)
{
    if (K < 2) {
        throw std::invalid_argument("onebit_outage requires K >= 2");
    }
    const auto eta = eta_thresholds(split, targets, rho);
    if (!eta) {
        return 1.0;
    }
    const double y = role == Role::weak ? eta->weak : eta->strong;
    return std::clamp(selected_cdf(role, K, xi, y, dist), 0.0, 1.0);
}

double onebit_oma_outage(Role role, int K, const FeedbackThreshold& xi, const RateTargets& targets, double rho,
                         const GainDistribution& dist)
{
    if (K < 2) {
        throw std::invalid_argument("onebit_oma_outage requires K >= 2");
    }
    const double rate = role == Role::weak ? targets.weak_rate : targets.strong_rate;
    return std::clamp(selected_cdf(role, K, xi, rate_threshold(2.0 * rate) / rho, dist), 0.0, 1.0);
}

double onebit_sum_rate_given(const GainDistribution& dist, int K, const PowerSplit& split,
                             const RateTargets& targets, const ThresholdRule& rule, double rho)
{
    const FeedbackThreshold xi = rule.resolve(feedback_thresholds(split, targets, rho), rho, K);
    const double weak = onebit_outage(Role::weak, K, xi, split, targets, rho, dist);
    const double strong = onebit_outage(Role::strong, K, xi, split, targets, rho, dist);
    return (1.0 - weak) * targets.weak_rate + (1.0 - strong) * targets.strong_rate;
}

double onebit_oma_sum_rate_given(const GainDistribution& dist, int K, const PowerSplit& split,
                                 const RateTargets& targets, const ThresholdRule& rule, double rho)
{
    const FeedbackThreshold xi = rule.resolve(feedback_thresholds(split, targets, rho), rho, K);
    const double weak = onebit_oma_outage(Role::weak, K, xi, targets, rho, dist);
    const double strong = onebit_oma_outage(Role::strong, K, xi, targets, rho, dist);
    return (1.0 - weak) * targets.weak_rate + (1.0 - strong) * targets.strong_rate;
}

double onebit_sum_rate(const GainDistribution& dist, const SystemParams& params, const RateTargets& targets,
                       const ThresholdRule& rule, double rho)
{
    return average_over_count(params, dist, targets, rho, [&](int k) {
        return onebit_sum_rate_given(dist, k, params.split, targets, rule, rho);
    });
}

double onebit_oma_sum_rate(const GainDistribution& dist, const SystemParams& params, const RateTargets& targets,
                           const ThresholdRule& rule, double rho)
{
    return average_over_count(params, dist, targets, rho, [&](int k) {
        return onebit_oma_sum_rate_given(dist, k, params.split, targets, rule, rho);
    });
}

// ---------------------------------------------------------------------------

namespace {

// Summed kernel towards beams 2..N for a user at offset `offset` from beam 1.
double interference_kernel(const SystemParams& params, int beams, double offset)
{
    double sum = 0.0;
    for (int n = 1; n < beams; ++n) {
        sum += fejer_kernel(pi * (2.0 * n / beams - offset), params.antennas);
    }
    return sum;
}

struct LinkMargins {
    double first = 0.0;
    double second = 1.0;
};

} // namespace

MultibeamOutage::MultibeamOutage(const SystemParams& params, int beams, int order, MultibeamLink link,
                                 const RateTargets& targets, int extra_refinements)
{
    params.validate();
    if (beams < 1 || beams > params.antennas) {
        throw std::invalid_argument("beam count must satisfy 1 <= N <= M");
    }
    if (order < 1) {
        throw std::invalid_argument("distance order must be >= 1");
    }
    const double eps_weak = targets.weak_threshold();
    const double eps_strong = targets.strong_threshold();
    const double eps_oma = rate_threshold(2.0 * (link == MultibeamLink::oma_weak ? targets.weak_rate
                                                                                  : targets.strong_rate));
    const double b_weak = params.split.weak_share;
    const double b_strong = params.split.strong_share;
    const int m = params.antennas;

    // Positive margins mean the SINR test can be met for a large enough fading draw;
    // the scale is then (1 + r^alpha) times the largest eps / margin.
    auto margins = [=](double offset) {
        const double own = fejer_kernel(pi * offset, m);
        const double interference = interference_kernel(params, beams, offset);
        LinkMargins out;
        switch (link) {
        case MultibeamLink::noma_weak:
            out.first = own * (b_weak - eps_weak * b_strong) - eps_weak * interference;
            break;
        case MultibeamLink::noma_strong:
            out.first = own * (b_weak - eps_weak * b_strong) - eps_weak * interference;
            out.second = own * b_strong - eps_strong * interference;
            break;
        case MultibeamLink::oma_weak:
        case MultibeamLink::oma_strong:
            out.first = own - eps_oma * interference;
            break;
        }
        return out;
    };
    auto unit_scale = [=](double offset) {
        const LinkMargins mg = margins(offset);
        if (!(mg.first > 0.0) || !(mg.second > 0.0)) {
            return inf;
        }
        switch (link) {
        case MultibeamLink::noma_weak:
            return eps_weak / mg.first;
        case MultibeamLink::noma_strong:
            return std::max(eps_weak / mg.first, eps_strong / mg.second);
        case MultibeamLink::oma_weak:
        case MultibeamLink::oma_strong:
            return eps_oma / mg.first;
        }
        return inf;
    };

    // Locate feasibility boundaries so that no panel straddles one.
    std::vector<double> breakpoints = kernel_nulls(params);
    const int scan = 4096;
    auto feasible = [&](double offset) {
        const LinkMargins mg = margins(offset);
        return mg.first > 0.0 && mg.second > 0.0;
    };
    double prev_x = 0.0;
    bool prev = feasible(0.0);
    for (int s = 1; s <= scan; ++s) {
        const double x = params.half_angle * s / scan;
        const bool now = feasible(x);
        if (now != prev) {
            double lo = prev_x;
            double hi = x;
            for (int it = 0; it < 80; ++it) {
                const double mid = 0.5 * (lo + hi);
                (feasible(mid) == prev ? lo : hi) = mid;
            }
            breakpoints.push_back(0.5 * (lo + hi));
        }
        prev = now;
        prev_x = x;
    }

    const SectorRegion region = params.sector();
    const DeploymentParams deploy = params.deployment();
    const double alpha = params.path_loss_exponent;
    ExponentialMixture::Spec spec;
    spec.radial_weight = [order, region, deploy](double r) { return ordered_distance_pdf(order, r, region, deploy); };
    spec.scale = [=](double r, double offset) {
        const double u = unit_scale(offset);
        return u == inf ? inf : (1.0 + std::pow(r, alpha)) * u;
    };
    spec.offset_breakpoints = breakpoints;
    spec.extra_refinements = extra_refinements;
    mixture_ = ExponentialMixture(spec, params.radius, params.half_angle);
    exists_ = count_at_least(order, params.mean_users());
}

double MultibeamOutage::outage(double rho) const
{
    return std::clamp((1.0 - exists_) + mixture_.cdf(1.0 / rho), 0.0, 1.0);
}

double MultibeamOutage::conditional_outage(double rho) const
{
    return exists_ > 0.0 ? std::clamp(mixture_.cdf(1.0 / rho) / exists_, 0.0, 1.0) : 1.0;
}

AsymptoticConstants asymptotic_constants(const SystemParams& params, int beams, const RateTargets& targets,
                                         int max_order)
{
    AsymptoticConstants c;
    c.c2_single = c2_single(params);
    for (int n = 2; n <= beams; ++n) {
        const double x = -2.0 * (n - 1) * pi / beams;
        c.c2_interference += fejer_kernel(x, params.antennas);
        c.c3 += fejer_kernel_derivative(x, params.antennas);
    }
    c.c4 = params.split.weak_share - targets.weak_threshold() * params.split.strong_share;
    for (int i = 1; i <= max_order; ++i) {
        c.q.push_back(q_factor(i, params));
    }
    return c;
}

double multibeam_outage_approx(int i, double rho, const AsymptoticConstants& constants,
                               const SystemParams& params, const RateTargets& targets)
{
    if (i < 1 || i > static_cast<int>(constants.q.size())) {
        throw std::invalid_argument("multibeam_outage_approx: no Q factor for this order");
    }
    const double m = params.antennas;
    const double eps = targets.weak_threshold();
    const double denom = m * constants.c4 - constants.c2_interference * eps;
    if (!(denom > 0.0)) {
        throw DomainError("multibeam_outage_approx: M c4 <= c2 eps, outage is one");
    }
    const double exists = count_at_least(i, params.mean_users());
    return m * constants.q[i - 1] * eps / (rho * denom) / exists;
}

double multibeam_sum_rate(const MultibeamOutage& weak, const MultibeamOutage& strong, int beams,
                          const RateTargets& targets, double rho)
{
    return beams * ((1.0 - strong.outage(rho)) * targets.strong_rate + (1.0 - weak.outage(rho)) * targets.weak_rate);
}

} // namespace mmnoma
