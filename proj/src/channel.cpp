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

#include "mmnoma/channel.hpp"

#include <cmath>
#include <stdexcept>

#include "mmnoma/mathkit.hpp"

namespace mmnoma {

BeamSet::BeamSet(int count, double base_direction, int antennas)
    : count_(count), base_(wrap_direction(base_direction))
{
    if (count < 1 || count > antennas) {
        throw std::invalid_argument("beam count must satisfy 1 <= N <= M");
    }
}

double BeamSet::direction(int m) const
{
    if (m < 0 || m >= count_) {
        throw std::out_of_range("beam index out of range");
    }
    return wrap_direction(base_ + 2.0 * m / count_);
}

std::vector<double> BeamSet::directions() const
{
    std::vector<double> out(count_);
    for (int m = 0; m < count_; ++m) {
        out[m] = direction(m);
    }
    return out;
}

double sample_fading(Rng& rng)
{
    return std::exponential_distribution<double>(1.0)(rng);
}

double effective_gain(const ChannelRealization& ch, double beam_direction, int antennas, double alpha)
{
    const double offset = direction_offset(beam_direction, ch.location.direction);
    const double path_loss = 1.0 + std::pow(ch.location.distance, alpha);
    return ch.fading_power * fejer_kernel(pi * offset, antennas) / path_loss;
}

std::vector<double> cross_gains(const ChannelRealization& ch, const BeamSet& beams, int antennas, double alpha)
{
    std::vector<double> gains(beams.count());
    for (int n = 0; n < beams.count(); ++n) {
        gains[n] = effective_gain(ch, beams.direction(n), antennas, alpha);
    }
    return gains;
}

} // namespace mmnoma
