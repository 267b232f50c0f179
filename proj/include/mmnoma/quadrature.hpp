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

#ifndef MMNOMA_QUADRATURE_HPP
#define MMNOMA_QUADRATURE_HPP

#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace mmnoma {

/// Gauss-Legendre rule on [-1, 1].
struct GaussLegendreRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// Returns the n-point rule, computed once per n and cached for the process.
const GaussLegendreRule& gauss_legendre(int n);

struct QuadratureResult {
    double value = 0.0;
    double error = 0.0;
};

/// Thrown when adaptive refinement cannot reach the requested tolerance.
class QuadratureError : public std::runtime_error {
public:
    QuadratureError(const std::string& what, double achieved_error)
        : std::runtime_error(what + " (achieved error " + std::to_string(achieved_error) + ")"),
          achieved_error_(achieved_error)
    {
    }
    double achieved_error() const noexcept { return achieved_error_; }

private:
    double achieved_error_;
};

/// Adaptive composite Gauss-Legendre integration of f over [a, b].
///
/// Each panel is compared against the sum over its two halves and split
/// until the difference is below max(abs_tol, rel_tol * |I|) scaled by the
/// panel's share of the interval. Breakpoints inside (a, b) always start a
/// new panel, which is how kinks of the integrand are handled.
QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           double abs_tol = 1e-13, double rel_tol = 1e-12,
                           std::span<const double> breakpoints = {});

/// Composite rule: panel edges plus an order-n Gauss rule on every panel.
struct CompositeRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// Splits [a, b] into `panels` equal panels and applies an `order`-point
/// Gauss rule on each. Breakpoints subdivide further so that no panel
/// straddles one.
CompositeRule composite_rule(double a, double b, int panels, int order,
                             std::span<const double> breakpoints = {});

} // namespace mmnoma

#endif
