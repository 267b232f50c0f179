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

#ifndef MMNOMA_NOMA_HPP
#define MMNOMA_NOMA_HPP

#include <optional>

namespace mmnoma {

/// Superposition power shares; weak_share + strong_share = 1 and the weak
/// (far) user never gets less power than the strong one.
struct PowerSplit {
    double weak_share = 0.75;
    double strong_share = 0.25;

    static PowerSplit from_weak_share(double weak_share);
    void validate() const;
};

/// Target rates in bits per channel use.
struct RateTargets {
    double weak_rate = 0.5;
    double strong_rate = 6.0;

    double weak_threshold() const;
    double strong_threshold() const;
    void validate() const;
};

/// SINR threshold 2^R - 1 of a rate target.
double rate_threshold(double rate);

/// Transmit power in dBm over the noise floor in dBm, as a linear ratio.
double snr_from_dbm(double transmit_dbm, double noise_dbm = -30.0);

struct SnrConfig {
    double transmit_dbm = 30.0;
    double noise_dbm = -30.0;

    double rho() const { return snr_from_dbm(transmit_dbm, noise_dbm); }
};

/// Weak user decoding its own message, partner's message as noise.
double sinr_weak(double gain, const PowerSplit& split, double rho);
/// Strong user decoding the weak user's message before SIC; same expression as sinr_weak.
double sinr_sic(double gain, const PowerSplit& split, double rho);
/// Strong user after SIC.
double snr_strong(double gain, const PowerSplit& split, double rho);

/// Gain levels below which the weak and strong users are in outage.
struct EtaThresholds {
    double weak = 0.0;
    double strong = 0.0;
};

/// Empty when beta_weak^2 <= beta_strong^2 eps_weak: the weak message can
/// never be decoded and both users are in outage with probability one.
std::optional<EtaThresholds> eta_thresholds(const PowerSplit& split, const RateTargets& targets, double rho);

struct OutageFlags {
    bool weak = true;
    bool strong = true;
    bool operator==(const OutageFlags&) const = default;
};

/// NOMA outage of a scheduled (weak, strong) pair given their gains.
/// Success at equality: outage is SINR strictly below the threshold.
OutageFlags noma_outage_events(double weak_gain, double strong_gain, const PowerSplit& split,
                               const RateTargets& targets, double rho);

/// OMA outage: the user gets half the resources, so it needs rho g >= 2^{2R} - 1.
bool oma_outage_event(double gain, double rate, double rho);

struct MultibeamSinrs {
    double sic = 0.0;    ///< strong user decoding the partner's message
    double strong = 0.0; ///< strong user after SIC, inter-beam interference remains
    double weak = 0.0;   ///< weak user, same expression as sic at its own gain
};

/// SINRs on one beam given own-beam gain and the summed gain towards the other beams.
MultibeamSinrs multibeam_sinrs(double own_gain, double interference, const PowerSplit& split, double rho);

OutageFlags multibeam_outage_events(double weak_gain, double weak_interference, double strong_gain,
                                    double strong_interference, const PowerSplit& split,
                                    const RateTargets& targets, double rho);

/// OMA on one beam of a multi-beam set: g / (I + 1/rho) against 2^{2R} - 1.
bool multibeam_oma_outage_event(double own_gain, double interference, double rate, double rho);

} // namespace mmnoma

#endif
