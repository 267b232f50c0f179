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

#include "mmnoma/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

#include "mmnoma/mathkit.hpp"

namespace mmnoma {

namespace {

GaussLegendreRule build_rule(int n)
{
    GaussLegendreRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0;
            double p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = pk;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) {
                break;
            }
        }
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    return rule;
}

double panel_estimate(const std::function<double(double)>& f, double a, double b,
                      const GaussLegendreRule& rule)
{
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    double sum = 0.0;
    for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
        sum += rule.weights[k] * f(mid + half * rule.nodes[k]);
    }
    return sum * half;
}

std::vector<double> panel_edges(double a, double b, int panels, std::span<const double> breakpoints)
{
    std::vector<double> edges;
    for (int p = 0; p <= panels; ++p) {
        edges.push_back(a + (b - a) * p / panels);
    }
    for (const double bp : breakpoints) {
        if (bp > a && bp < b) {
            edges.push_back(bp);
        }
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end(),
                            [&](double u, double v) { return std::abs(u - v) <= 1e-14 * (b - a); }),
                edges.end());
    return edges;
}

} // namespace

const GaussLegendreRule& gauss_legendre(int n)
{
    static std::mutex mutex;
    static std::map<int, GaussLegendreRule> cache;
    const std::lock_guard lock(mutex);
    auto it = cache.find(n);
    if (it == cache.end()) {
        it = cache.emplace(n, build_rule(n)).first;
    }
    return it->second;
}

QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           double abs_tol, double rel_tol, std::span<const double> breakpoints)
{
    if (!(b > a)) {
        return {};
    }
    const GaussLegendreRule& rule = gauss_legendre(15);
    struct Panel {
        double a;
        double b;
        double value;
        int depth;
    };
    std::vector<Panel> work;
    const auto edges = panel_edges(a, b, 1, breakpoints);
    for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
        work.push_back({edges[p], edges[p + 1], panel_estimate(f, edges[p], edges[p + 1], rule), 0});
    }

    double total = 0.0;
    for (const auto& p : work) {
        total += p.value;
    }

    QuadratureResult result;
    constexpr int max_depth = 40;
    while (!work.empty()) {
        Panel p = work.back();
        work.pop_back();
        const double mid = 0.5 * (p.a + p.b);
        const double left = panel_estimate(f, p.a, mid, rule);
        const double right = panel_estimate(f, mid, p.b, rule);
        const double diff = std::abs(left + right - p.value);
        const double share = (p.b - p.a) / (b - a);
        const double tol = std::max(abs_tol, rel_tol * std::abs(total)) * share;
        if (diff <= tol || p.depth >= max_depth) {
            result.value += left + right;
            result.error += diff;
            continue;
        }
        work.push_back({p.a, mid, left, p.depth + 1});
        work.push_back({mid, p.b, right, p.depth + 1});
    }
    const double target = std::max(abs_tol, rel_tol * std::abs(result.value));
    if (result.error > 100.0 * target) {
        throw QuadratureError("adaptive Gauss-Legendre did not converge", result.error);
    }
    return result;
}

CompositeRule composite_rule(double a, double b, int panels, int order,
                             std::span<const double> breakpoints)
{
    CompositeRule out;
    const GaussLegendreRule& rule = gauss_legendre(order);
    const auto edges = panel_edges(a, b, panels, breakpoints);
    for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
        const double half = 0.5 * (edges[p + 1] - edges[p]);
        const double mid = 0.5 * (edges[p + 1] + edges[p]);
        for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
            out.nodes.push_back(mid + half * rule.nodes[k]);
            out.weights.push_back(half * rule.weights[k]);
        }
    }
    return out;
}

} // namespace mmnoma
