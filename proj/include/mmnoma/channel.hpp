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

#ifndef MMNOMA_CHANNEL_HPP
#define MMNOMA_CHANNEL_HPP

#include <vector>

#include "mmnoma/geometry.hpp"
#include "mmnoma/random.hpp"

namespace mmnoma {

/// LOS channel of one user: small-scale fading power |a|^2 and its location.
struct ChannelRealization {
    double fading_power = 1.0;
    UserLocation location;
};

/// N orthonormal random beams at directions base + 2(m-1)/N, wrapped.
class BeamSet {
public:
    BeamSet(int count, double base_direction, int antennas);

    int count() const noexcept { return count_; }
    double base_direction() const noexcept { return base_; }
    /// Direction of beam m, 0-based.
    double direction(int m) const;
    std::vector<double> directions() const;

private:
    int count_;
    double base_;
};

/// Unit-mean exponential draw (|a|^2 for a ~ CN(0, 1)).
double sample_fading(Rng& rng);

/// |h^H p|^2 = |a|^2 F_M(pi (beam - theta)) / (1 + d^alpha).
double effective_gain(const ChannelRealization& ch, double beam_direction, int antennas, double alpha);

/// Gain of one user against every beam of the set; element n is beam n.
std::vector<double> cross_gains(const ChannelRealization& ch, const BeamSet& beams, int antennas, double alpha);

} // namespace mmnoma

#endif
