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

#include "mmnoma/noma.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace mmnoma {

PowerSplit PowerSplit::from_weak_share(double weak_share)
{
    PowerSplit split{weak_share, 1.0 - weak_share};
    split.validate();
    return split;
}

void PowerSplit::validate() const
{
    if (!(strong_share > 0.0) || !(weak_share >= strong_share)) {
        throw std::invalid_argument("power split must satisfy weak_share >= strong_share > 0");
    }
    if (std::abs(weak_share + strong_share - 1.0) > 1e-12) {
        throw std::invalid_argument("power split shares must sum to one");
    }
}

double rate_threshold(double rate)
{
    return std::expm1(rate * std::log(2.0));
}

double RateTargets::weak_threshold() const { return rate_threshold(weak_rate); }
double RateTargets::strong_threshold() const { return rate_threshold(strong_rate); }

void RateTargets::validate() const
{
    if (!(weak_rate > 0.0) || !(strong_rate > 0.0)) {
        throw std::invalid_argument("target rates must be positive");
    }
}

double snr_from_dbm(double transmit_dbm, double noise_dbm)
{
    return std::pow(10.0, (transmit_dbm - noise_dbm) / 10.0);
}

double sinr_weak(double gain, const PowerSplit& split, double rho)
{
    return gain * split.weak_share / (gain * split.strong_share + 1.0 / rho);
}

double sinr_sic(double gain, const PowerSplit& split, double rho)
{
    return sinr_weak(gain, split, rho);
}

double snr_strong(double gain, const PowerSplit& split, double rho)
{
    return rho * gain * split.strong_share;
}

std::optional<EtaThresholds> eta_thresholds(const PowerSplit& split, const RateTargets& targets, double rho)
{
    const double eps_weak = targets.weak_threshold();
    const double eps_strong = targets.strong_threshold();
    const double margin = split.weak_share - split.strong_share * eps_weak;
    if (!(margin > 0.0)) {
        return std::nullopt;
    }
    EtaThresholds eta;
    eta.weak = (eps_weak / rho) / margin;
    eta.strong = std::max(eta.weak, eps_strong / (rho * split.strong_share));
    return eta;
}

OutageFlags noma_outage_events(double weak_gain, double strong_gain, const PowerSplit& split,
                               const RateTargets& targets, double rho)
{
    const double eps_weak = targets.weak_threshold();
    const double eps_strong = targets.strong_threshold();
    OutageFlags flags;
    flags.weak = sinr_weak(weak_gain, split, rho) < eps_weak;
    const bool sic_ok = sinr_sic(strong_gain, split, rho) >= eps_weak;
    const bool own_ok = snr_strong(strong_gain, split, rho) >= eps_strong;
    flags.strong = !(sic_ok && own_ok);
    return flags;
}

bool oma_outage_event(double gain, double rate, double rho)
{
    return rho * gain < rate_threshold(2.0 * rate);
}

MultibeamSinrs multibeam_sinrs(double own_gain, double interference, const PowerSplit& split, double rho)
{
    const double floor = interference + 1.0 / rho;
    MultibeamSinrs s;
    s.sic = own_gain * split.weak_share / (own_gain * split.strong_share + floor);
    s.strong = own_gain * split.strong_share / floor;
    s.weak = s.sic;
    return s;
}

OutageFlags multibeam_outage_events(double weak_gain, double weak_interference, double strong_gain,
                                    double strong_interference, const PowerSplit& split,
                                    const RateTargets& targets, double rho)
{
    if (weak_interference == 0.0 && strong_interference == 0.0) {
        return noma_outage_events(weak_gain, strong_gain, split, targets, rho);
    }
    const double eps_weak = targets.weak_threshold();
    const double eps_strong = targets.strong_threshold();
    OutageFlags flags;
    flags.weak = multibeam_sinrs(weak_gain, weak_interference, split, rho).weak < eps_weak;
    const auto strong = multibeam_sinrs(strong_gain, strong_interference, split, rho);
    flags.strong = !(strong.sic >= eps_weak && strong.strong >= eps_strong);
    return flags;
}

bool multibeam_oma_outage_event(double own_gain, double interference, double rate, double rho)
{
    if (interference == 0.0) {
        return oma_outage_event(own_gain, rate, rho);
    }
    return own_gain / (interference + 1.0 / rho) < rate_threshold(2.0 * rate);
}

} // namespace mmnoma
