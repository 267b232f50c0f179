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

#include "mmnoma/mathkit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mmnoma {

double fejer_kernel(double x, int m)
{
    const double half = std::sin(0.5 * x);
    if (std::abs(half) < 1e-9) {
        return static_cast<double>(m);
    }
    const double num = std::sin(0.5 * m * x);
    return (num * num) / (m * half * half);
}

double fejer_kernel_small_angle(double offset, int m)
{
    const double md = static_cast<double>(m);
    return md * (1.0 - pi * pi * md * md * offset * offset / 12.0);
}

double fejer_kernel_derivative(double x, int m)
{
    const double one_minus_cos = 1.0 - std::cos(x);
    if (std::abs(std::sin(0.5 * x)) < 1e-9) {
        throw DomainError("fejer_kernel_derivative: x is a multiple of 2*pi");
    }
    const double mx = m * x;
    return std::sin(mx) / one_minus_cos
        - (1.0 - std::cos(mx)) * std::sin(x) / (m * one_minus_cos * one_minus_cos);
}

namespace {

// Series x^s e^-x sum_n x^n / (s (s+1) ... (s+n)), converges fast for x < s + 1.
double gamma_series(double s, double x)
{
    double term = 1.0 / s;
    double sum = term;
    for (int n = 1; n < 1000; ++n) {
        term *= x / (s + n);
        sum += term;
        if (std::abs(term) < std::abs(sum) * 1e-17) {
            break;
        }
    }
    return sum * std::exp(-x + s * std::log(x));
}

// Upper gamma Gamma(s, x) by the Lentz continued fraction, for x >= s + 1.
double upper_gamma_fraction(double s, double x)
{
    constexpr double tiny = 1e-300;
    double b = x + 1.0 - s;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 1000; ++i) {
        const double an = -i * (i - s);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) {
            d = tiny;
        }
        c = b + an / c;
        if (std::abs(c) < tiny) {
            c = tiny;
        }
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < 1e-16) {
            break;
        }
    }
    return std::exp(-x + s * std::log(x)) * h;
}

} // namespace

double lower_incomplete_gamma(double s, double x)
{
    if (!(s > 0.0)) {
        throw DomainError("lower_incomplete_gamma: s must be positive");
    }
    if (x < 0.0) {
        throw DomainError("lower_incomplete_gamma: x must be nonnegative");
    }
    if (x == 0.0) {
        return 0.0;
    }
    if (std::isinf(x)) {
        return std::tgamma(s);
    }
    if (x < s + 1.0) {
        return gamma_series(s, x);
    }
    return std::tgamma(s) - upper_gamma_fraction(s, x);
}

double lower_incomplete_gamma2(double x)
{
    if (x < 0.5) {
        return lower_incomplete_gamma(2.0, x);
    }
    return 1.0 - (1.0 + x) * std::exp(-x);
}

double binomial(int n, int k)
{
    if (k < 0 || k > n) {
        return 0.0;
    }
    k = std::min(k, n - k);
    double result = 1.0;
    for (int i = 1; i <= k; ++i) {
        result = result * (n - k + i) / i;
    }
    return std::round(result);
}

} // namespace mmnoma
