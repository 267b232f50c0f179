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

#ifndef MMNOMA_MATHKIT_HPP
#define MMNOMA_MATHKIT_HPP

#include <numbers>
#include <stdexcept>

namespace mmnoma {

inline constexpr double pi = std::numbers::pi;

/// Raised when a function is evaluated outside its mathematical domain.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Fejer kernel F_m(x) = sin^2(m x / 2) / (m sin^2(x / 2)).
///
/// This is the array gain of an m-element uniform linear array steered by
/// an analog beam, as a function of the phase offset x between beam and
/// user. It is even, 2*pi periodic and bounded by [0, m]; the removable
/// singularity at multiples of 2*pi returns the limit m.
double fejer_kernel(double x, int m);

/// Second-order small-offset expansion m (1 - pi^2 m^2 offset^2 / 12) of
/// fejer_kernel(pi * offset, m). Only meaningful for |offset| well below 1/m.
double fejer_kernel_small_angle(double offset, int m);

/// dF_m/dx. Throws DomainError at x = 0 (mod 2*pi) where the closed form is 0/0.
double fejer_kernel_derivative(double x, int m);

/// Lower incomplete gamma function gamma(s, x) = int_0^x t^(s-1) e^(-t) dt.
double lower_incomplete_gamma(double s, double x);

/// gamma(2, x) = 1 - (1 + x) e^(-x), evaluated without cancellation for small x.
double lower_incomplete_gamma2(double x);

/// Binomial coefficient as a double (exact for the small arguments used here).
double binomial(int n, int k);

} // namespace mmnoma

#endif
