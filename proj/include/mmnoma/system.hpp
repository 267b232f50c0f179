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

#ifndef MMNOMA_SYSTEM_HPP
#define MMNOMA_SYSTEM_HPP

#include "mmnoma/geometry.hpp"
#include "mmnoma/noma.hpp"

namespace mmnoma {

/// Scalar model parameters shared by the analytic and Monte Carlo paths.
struct SystemParams {
    int antennas = 4;                 ///< M
    double density = 1.0;             ///< lambda, users per square meter
    double half_angle = 0.1;          ///< Delta, normalized direction units
    double blockage = 0.1;            ///< phi, per meter
    double radius = 10.0;             ///< R_D, meters
    double path_loss_exponent = 2.0;  ///< alpha
    double noise_dbm = -30.0;
    PowerSplit split{0.75, 0.25};

    void validate() const;

    SectorRegion sector(double beam_direction = 0.0) const
    {
        return {beam_direction, half_angle, radius};
    }
    DeploymentParams deployment() const { return {density, blockage}; }
    double mean_users() const { return mean_measure(sector(), deployment()); }
    double rho(double transmit_dbm) const { return snr_from_dbm(transmit_dbm, noise_dbm); }
};

} // namespace mmnoma

#endif
