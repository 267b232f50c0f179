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

#include "mmnoma/experiment.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <memory>
#include <ostream>
#include <sstream>
#include <tuple>
#include <type_traits>
#include <variant>

#include "mmnoma/analytic.hpp"
#include "mmnoma/geometry.hpp"

namespace mmnoma {

ExperimentConfig::ExperimentConfig()
{
    for (int k = 0; k <= 20; ++k) {
        power_dbm.push_back(2.0 * k);
    }
}

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

namespace {

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s)
{
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, ',')) {
        out.push_back(trim(item));
    }
    return out;
}

std::string fmt(double x)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

struct Entry {
    std::string value;
    int line = 0;
    bool used = false;
};

class Document {
public:
    explicit Document(const std::string& text)
    {
        std::istringstream in(text);
        std::string raw;
        std::string section;
        int line_no = 0;
        while (std::getline(in, raw)) {
            ++line_no;
            const auto hash = raw.find_first_of("#;");
            const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
            if (line.empty()) {
                continue;
            }
            if (line.front() == '[') {
                if (line.back() != ']') {
                    errors.push_back("line " + std::to_string(line_no) + ": unterminated section header");
                    continue;
                }
                section = trim(line.substr(1, line.size() - 2));
                continue;
            }
            const auto eq = line.find('=');
            if (eq == std::string::npos) {
                errors.push_back("line " + std::to_string(line_no) + ": expected key = value");
                continue;
            }
            const std::string key = (section.empty() ? "" : section + ".") + trim(line.substr(0, eq));
            if (entries_.count(key)) {
                errors.push_back(key + ": duplicate key (line " + std::to_string(line_no) + ")");
                continue;
            }
            entries_[key] = {trim(line.substr(eq + 1)), line_no, false};
        }
    }

    const std::string* get(const std::string& key)
    {
        auto it = entries_.find(key);
        if (it == entries_.end()) {
            return nullptr;
        }
        it->second.used = true;
        return &it->second.value;
    }

    void read(const std::string& key, double& out)
    {
        if (const auto* v = get(key)) {
            if (!parse_double(*v, out)) {
                errors.push_back(key + ": expected a number, got '" + *v + "'");
            }
        }
    }

    void read(const std::string& key, int& out)
    {
        if (const auto* v = get(key)) {
            if (!parse_int(*v, out)) {
                errors.push_back(key + ": expected an integer, got '" + *v + "'");
            }
        }
    }

    void read(const std::string& key, std::uint64_t& out)
    {
        if (const auto* v = get(key)) {
            const auto r = std::from_chars(v->data(), v->data() + v->size(), out);
            if (r.ec != std::errc() || r.ptr != v->data() + v->size()) {
                errors.push_back(key + ": expected a non-negative integer, got '" + *v + "'");
            }
        }
    }

    void read(const std::string& key, bool& out)
    {
        if (const auto* v = get(key)) {
            if (*v == "true" || *v == "yes" || *v == "1") {
                out = true;
            } else if (*v == "false" || *v == "no" || *v == "0") {
                out = false;
            } else {
                errors.push_back(key + ": expected true or false, got '" + *v + "'");
            }
        }
    }

    void read_list(const std::string& key, std::vector<double>& out)
    {
        const auto* v = get(key);
        if (!v) {
            return;
        }
        std::vector<double> values;
        // each item is a number or start:stop:step
        for (const auto& item : split_list(*v)) {
            if (item.find(':') == std::string::npos) {
                double x = 0.0;
                if (!parse_double(item, x)) {
                    errors.push_back(key + ": expected a number list, got '" + *v + "'");
                    return;
                }
                values.push_back(x);
                continue;
            }
            std::vector<std::string> parts;
            std::istringstream in(item);
            std::string p;
            while (std::getline(in, p, ':')) {
                parts.push_back(trim(p));
            }
            double a = 0.0;
            double b = 0.0;
            double step = 0.0;
            if (parts.size() != 3 || !parse_double(parts[0], a) || !parse_double(parts[1], b) ||
                !parse_double(parts[2], step)) {
                errors.push_back(key + ": expected start:stop:step, got '" + item + "'");
                return;
            }
            if (!(step > 0.0) || b < a) {
                errors.push_back(key + ": range needs step > 0 and stop >= start");
                return;
            }
            const double count = std::floor((b - a) / step + 1e-9);
            if (count + values.size() > 100000) {
                errors.push_back(key + ": more than 100000 points");
                return;
            }
            for (int k = 0; k <= static_cast<int>(count); ++k) {
                values.push_back(a + k * step);
            }
        }
        out = std::move(values);
    }

    void read_list(const std::string& key, std::vector<int>& out)
    {
        const auto* v = get(key);
        if (!v) {
            return;
        }
        std::vector<int> values;
        if (*v == "poisson") {
            out.clear();
            return;
        }
        for (const auto& item : split_list(*v)) {
            int x = 0;
            if (!parse_int(item, x)) {
                errors.push_back(key + ": expected 'poisson' or an integer list, got '" + *v + "'");
                return;
            }
            values.push_back(x);
        }
        out = std::move(values);
    }

    void report_unused()
    {
        for (const auto& [key, e] : entries_) {
            if (!e.used) {
                errors.push_back(key + ": unknown key (line " + std::to_string(e.line) + ")");
            }
        }
    }

    std::vector<std::string> errors;

private:
    static bool parse_double(const std::string& s, double& out)
    {
        if (s.empty()) {
            return false;
        }
        const char* first = s.data();
        if (*first == '+') {
            ++first;
        }
        const auto r = std::from_chars(first, s.data() + s.size(), out);
        return r.ec == std::errc() && r.ptr == s.data() + s.size() && std::isfinite(out);
    }

    static bool parse_int(const std::string& s, int& out)
    {
        const auto r = std::from_chars(s.data(), s.data() + s.size(), out);
        return !s.empty() && r.ec == std::errc() && r.ptr == s.data() + s.size();
    }

    std::map<std::string, Entry> entries_;
};

std::string join(const std::vector<std::string>& lines)
{
    std::string out;
    for (const auto& l : lines) {
        out += (out.empty() ? "" : "\n") + l;
    }
    return out;
}

} // namespace

ExperimentConfig parse_config(const std::string& text)
{
    Document doc(text);
    ExperimentConfig c;

    if (const auto* v = doc.get("name")) {
        c.name = *v;
    }

    SystemParams& p = c.params;
    doc.read("system.antennas", p.antennas);
    doc.read("system.density", p.density);
    doc.read("system.half_angle", p.half_angle);
    doc.read("system.blockage", p.blockage);
    doc.read("system.radius", p.radius);
    doc.read("system.path_loss_exponent", p.path_loss_exponent);
    doc.read("system.noise_dbm", p.noise_dbm);
    double weak_share = p.split.weak_share;
    doc.read("system.weak_share", weak_share);
    p.split = {weak_share, 1.0 - weak_share};

    doc.read("rates.weak", c.weak_rate);
    doc.read_list("rates.strong", c.strong_rates);

    std::string kinds = "perfect_csi";
    if (const auto* v = doc.get("scheme.kind")) {
        kinds = *v;
    }
    int weak_index = 1;
    int strong_index = 0;
    bool clamp = false;
    int weak_order = 4;
    int strong_order = 1;
    int beams = 1;
    double threshold_value = 0.0;
    std::string threshold = "midpoint";
    doc.read("scheme.weak_index", weak_index);
    doc.read("scheme.strong_index", strong_index);
    doc.read("scheme.clamp", clamp);
    doc.read("scheme.weak_order", weak_order);
    doc.read("scheme.strong_order", strong_order);
    doc.read("scheme.beams", beams);
    doc.read("scheme.threshold_value", threshold_value);
    if (const auto* v = doc.get("scheme.threshold")) {
        threshold = *v;
    }
    c.schemes.clear();
    for (const auto& kind : split_list(kinds)) {
        if (kind == "perfect_csi") {
            c.schemes.push_back(PerfectCsi{PairSelection{weak_index, strong_index, clamp}});
        } else if (kind == "distance") {
            c.schemes.push_back(DistanceOnly{DistancePair{weak_order, strong_order}});
        } else if (kind == "onebit") {
            ThresholdRule rule;
            if (threshold == "midpoint") {
                rule.kind = ThresholdRuleKind::midpoint;
            } else if (threshold == "diversity") {
                rule.kind = ThresholdRuleKind::diversity;
            } else if (threshold == "fixed") {
                rule.kind = ThresholdRuleKind::fixed;
                rule.fixed_value = threshold_value;
            } else {
                doc.errors.push_back("scheme.threshold: expected midpoint, diversity or fixed, got '" + threshold +
                                     "'");
            }
            c.schemes.push_back(OneBit{rule});
        } else if (kind == "multibeam") {
            c.schemes.push_back(MultiBeam{beams, DistancePair{weak_order, strong_order}});
        } else {
            doc.errors.push_back("scheme.kind: expected perfect_csi, distance, onebit or multibeam, got '" + kind +
                                 "'");
        }
    }

    doc.read_list("run.users", c.users);
    doc.read_list("run.power_dbm", c.power_dbm);
    doc.read("run.trials", c.trials);
    doc.read("run.seed", c.seed);
    if (const auto* v = doc.get("run.mode")) {
        if (*v == "analytic") {
            c.mode = RunMode::analytic;
        } else if (*v == "mc") {
            c.mode = RunMode::mc;
        } else if (*v == "both") {
            c.mode = RunMode::both;
        } else {
            doc.errors.push_back("run.mode: expected analytic, mc or both, got '" + *v + "'");
        }
    }
    if (const auto* v = doc.get("run.output")) {
        c.output = *v;
    }
    int threads = 0;
    doc.read("run.threads", threads);
    if (threads < 0) {
        doc.errors.push_back("run.threads: must be >= 0");
    }
    c.threads = static_cast<unsigned>(std::max(threads, 0));

    doc.report_unused();
    if (!doc.errors.empty()) {
        throw ConfigError(join(doc.errors));
    }
    return c;
}

ExperimentConfig load_config(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError("config: cannot open '" + path + "'");
    }
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str());
}

std::vector<Variant> variants(const ExperimentConfig& config)
{
    std::vector<Variant> out;
    for (double rate : config.strong_rates) {
        if (config.users.empty()) {
            out.push_back({"Rj=" + fmt(rate), rate, std::nullopt});
            continue;
        }
        for (int k : config.users) {
            out.push_back({"Rj=" + fmt(rate) + " K=" + std::to_string(k), rate, k});
        }
    }
    return out;
}

std::string scheme_name(const Scheme& scheme)
{
    switch (scheme.index()) {
    case 0:
        return "perfect_csi";
    case 1:
        return "distance";
    case 2:
        return "onebit";
    default:
        return "multibeam";
    }
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

Diagnostics validate(const ExperimentConfig& config)
{
    Diagnostics d;
    auto err = [&](const std::string& m) { d.errors.push_back(m); };
    const SystemParams& p = config.params;

    if (p.antennas < 1) {
        err("system.antennas: must be >= 1, got " + std::to_string(p.antennas));
    }
    if (!(p.density > 0.0)) {
        err("system.density: must be > 0, got " + fmt(p.density));
    }
    if (!(p.half_angle > 0.0 && p.half_angle <= 1.0)) {
        err("system.half_angle: must lie in (0, 1], got " + fmt(p.half_angle));
    }
    if (!(p.blockage > 0.0)) {
        err("system.blockage: must be > 0, got " + fmt(p.blockage));
    }
    if (!(p.radius > 0.0)) {
        err("system.radius: must be > 0, got " + fmt(p.radius));
    }
    if (!(p.path_loss_exponent > 0.0)) {
        err("system.path_loss_exponent: must be > 0, got " + fmt(p.path_loss_exponent));
    }
    const double bw = p.split.weak_share;
    const double bs = p.split.strong_share;
    if (!(bw >= 0.5 && bw < 1.0)) {
        err("system.weak_share: must lie in [0.5, 1), got " + fmt(bw));
    }
    if (!(config.weak_rate > 0.0)) {
        err("rates.weak: must be > 0, got " + fmt(config.weak_rate));
    } else {
        const double eps = rate_threshold(config.weak_rate);
        if (!(bw > bs * eps)) {
            err("system.weak_share: NOMA infeasible, weak_share " + fmt(bw) + " <= strong_share * eps_weak " +
                fmt(bs * eps) + " (the weak message can never be decoded)");
        }
    }
    if (config.strong_rates.empty()) {
        err("rates.strong: needs at least one value");
    }
    for (double r : config.strong_rates) {
        if (!(r > 0.0)) {
            err("rates.strong: every rate must be > 0, got " + fmt(r));
        }
    }

    const bool analytic = config.mode != RunMode::mc;
    if (config.schemes.empty()) {
        err("scheme.kind: needs at least one scheme");
    }
    for (const Scheme& scheme : config.schemes) {
        const bool distance_ordered =
            std::holds_alternative<DistanceOnly>(scheme) || std::holds_alternative<MultiBeam>(scheme);
        std::visit(
            [&](const auto& s) {
                using T = std::decay_t<decltype(s)>;
                if constexpr (std::is_same_v<T, PerfectCsi>) {
                    if (s.pair.weak_index < 1) {
                        err("scheme.weak_index: must be >= 1");
                    }
                    if (s.pair.strong_index != 0 && s.pair.strong_index <= s.pair.weak_index) {
                        err("scheme.strong_index: must exceed weak_index (0 means the strongest user)");
                    }
                    for (int k : config.users) {
                        if (k >= 2 && !s.pair.strong_for(k)) {
                            err("run.users: no (weak_index, strong_index) pair exists among " + std::to_string(k) +
                                " users");
                        }
                    }
                } else if constexpr (std::is_same_v<T, DistanceOnly>) {
                    if (s.pair.strong_order < 1 || s.pair.weak_order <= s.pair.strong_order) {
                        err("scheme.weak_order: distance pair needs 1 <= strong_order < weak_order");
                    }
                } else if constexpr (std::is_same_v<T, OneBit>) {
                    if (s.rule.kind == ThresholdRuleKind::fixed && !(s.rule.fixed_value >= 0.0)) {
                        err("scheme.threshold_value: must be >= 0");
                    }
                } else {
                    if (s.beams < 1 || s.beams > p.antennas) {
                        err("scheme.beams: need 1 <= beams <= antennas, got " + std::to_string(s.beams));
                    }
                    if (s.beams * 2.0 * p.half_angle > 2.0) {
                        err("scheme.beams: sectors overlap, beams * 2 * half_angle = " +
                            fmt(s.beams * 2.0 * p.half_angle) + " > 2");
                    }
                    if (s.pair.strong_order < 1 || s.pair.weak_order <= s.pair.strong_order) {
                        err("scheme.weak_order: distance pair needs 1 <= strong_order < weak_order");
                    }
                }
            },
            scheme);
        for (int k : config.users) {
            if (k >= 0 && analytic && !distance_ordered && k < 2) {
                err("run.users: analytic pair outage needs at least 2 users, got " + std::to_string(k));
            }
        }
        if (analytic && distance_ordered && !config.users.empty()) {
            err("run.users: analytic " + scheme_name(scheme) +
                " results average over the Poisson user count; use users = poisson or mode = mc");
        }
    }
    for (int k : config.users) {
        if (k < 0) {
            err("run.users: counts must be >= 0, got " + std::to_string(k));
        }
    }
    if (config.power_dbm.empty()) {
        err("run.power_dbm: grid must not be empty");
    }
    if (config.mode != RunMode::analytic && config.trials < 1) {
        err("run.trials: must be >= 1");
    }

    if (!d.errors.empty()) {
        return d;
    }

    // Remaining checks need a consistent parameter set.
    const double mu = p.mean_users();
    d.notes.push_back("mean LOS users mu = " + fmt(mu));
    d.notes.push_back("Poisson truncation K_max = " + std::to_string(poisson_truncation(mu)));
    for (int k : config.users) {
        if (poisson_pmf(k, mu) < 1e-6) {
            err("run.users: P(K = " + std::to_string(k) + ") = " + fmt(poisson_pmf(k, mu)) +
                " is too small for rejection sampling");
        }
    }
    for (const Variant& v : variants(config)) {
        const RateTargets targets{config.weak_rate, v.strong_rate};
        for (double dbm : config.power_dbm) {
            const auto eta = eta_thresholds(p.split, targets, p.rho(dbm));
            d.notes.push_back(v.label + " P=" + fmt(dbm) + " dBm: eta_weak = " + fmt(eta->weak) +
                              ", eta_strong = " + fmt(eta->strong));
        }
        for (const Scheme& scheme : config.schemes) {
            if (d.errors.empty()) {
                try {
                    SimConfig{p, targets, scheme, v.users}.validate();
                } catch (const std::exception& e) {
                    err(e.what());
                }
            }
        }
    }
    return d;
}

// ---------------------------------------------------------------------------
// Running
// ---------------------------------------------------------------------------

namespace {

struct MetricSpec {
    const char* name;
    const char* unit;
};

constexpr MetricSpec metric_specs[] = {
    {"weak_outage", "probability"},
    {"weak_outage_conditional", "probability"},
    {"strong_outage", "probability"},
    {"strong_outage_conditional", "probability"},
    {"oma_weak_outage", "probability"},
    {"oma_weak_outage_conditional", "probability"},
    {"oma_strong_outage", "probability"},
    {"oma_strong_outage_conditional", "probability"},
    {"noma_sum_rate", "bit/s/Hz"},
    {"oma_sum_rate", "bit/s/Hz"},
};
constexpr std::size_t n_metrics = std::size(metric_specs);

struct Estimate {
    double value = 0.0;
    std::optional<double> stderr_value;
    std::optional<std::uint64_t> trials;
};

using MetricRow = std::array<Estimate, n_metrics>;

void put_outage(MetricRow& row, std::size_t at, const OutageTally& t)
{
    row[at] = {t.probability(), t.probability_stderr(), t.total};
    row[at + 1] = {t.conditional(), t.conditional_stderr(), t.total - t.excluded};
}

void put_rate(MetricRow& row, std::size_t at, const RateTally& t)
{
    row[at] = {t.mean(), t.stderr_of_mean(), t.count};
}

MetricRow from_aggregate(const Aggregate& a)
{
    MetricRow row;
    put_outage(row, 0, a.weak);
    put_outage(row, 2, a.strong);
    put_outage(row, 4, a.oma_weak);
    put_outage(row, 6, a.oma_strong);
    put_rate(row, 8, a.noma_rate);
    put_rate(row, 9, a.oma_rate);
    return row;
}

// Analytic values in the same layout; v[0..7] are (probability, conditional) pairs.
struct AnalyticValues {
    std::array<double, n_metrics> v{};
    MetricRow row() const
    {
        MetricRow r;
        for (std::size_t k = 0; k < n_metrics; ++k) {
            r[k].value = v[k];
        }
        return r;
    }
};

// Pair outage averaged over K with the lone-user and no-pair cases excluded.
struct CountAverager {
    double formed = 0.0;      // sum p(K) over K where the pair exists
    std::array<double, 4> weighted{};  // sum p(K) outage_K

    void add(double pk, const std::array<double, 4>& outage)
    {
        formed += pk;
        for (std::size_t k = 0; k < 4; ++k) {
            weighted[k] += pk * outage[k];
        }
    }

    void store(AnalyticValues& out) const
    {
        for (std::size_t k = 0; k < 4; ++k) {
            // 1 - formed + weighted, written to keep small outages accurate.
            out.v[2 * k] = std::clamp((1.0 - formed) + weighted[k], 0.0, 1.0);
            out.v[2 * k + 1] = formed > 0.0 ? weighted[k] / formed : 1.0;
        }
    }
};

class AnalyticEngine {
public:
    explicit AnalyticEngine(const ExperimentConfig& config) : config_(config) {}

    AnalyticValues evaluate(const Scheme& scheme, const Variant& variant, double dbm)
    {
        const RateTargets targets{config_.weak_rate, variant.strong_rate};
        const double rho = config_.params.rho(dbm);
        return std::visit([&](const auto& s) { return eval(s, variant, targets, rho); }, scheme);
    }

private:
    const GainDistribution& unordered()
    {
        if (!unordered_) {
            unordered_ = std::make_unique<GainDistribution>(GainDistribution::unordered(config_.params));
        }
        return *unordered_;
    }

    const GainDistribution& kth(int k)
    {
        auto it = kth_.find(k);
        if (it == kth_.end()) {
            it = kth_.emplace(k, std::make_unique<GainDistribution>(
                                     GainDistribution::kth_nearest(config_.params, k)))
                     .first;
        }
        return *it->second;
    }

    template <typename PerCount>
    void average(AnalyticValues& out, const Variant& variant, PerCount&& per_count)
    {
        CountAverager avg;
        const double mu = config_.params.mean_users();
        if (variant.users) {
            if (auto o = per_count(*variant.users)) {
                avg.add(1.0, *o);
            }
        } else {
            const int k_max = poisson_truncation(mu);
            for (int k = 2; k <= k_max; ++k) {
                if (auto o = per_count(k)) {
                    avg.add(poisson_pmf(k, mu), *o);
                }
            }
        }
        avg.store(out);
    }

    AnalyticValues eval(const PerfectCsi& s, const Variant& variant, const RateTargets& targets, double rho)
    {
        const GainDistribution& dist = unordered();
        const PowerSplit& split = config_.params.split;
        AnalyticValues out;
        average(out, variant, [&](int k) -> std::optional<std::array<double, 4>> {
            const auto j = s.pair.strong_for(k);
            if (!j) {
                return std::nullopt;
            }
            const PairOutage n = conditional_pair_outage(dist, s.pair.weak_index, *j, k, split, targets, rho);
            const PairOutage o = conditional_oma_outage(dist, s.pair.weak_index, *j, k, targets, rho);
            return std::array<double, 4>{n.weak, n.strong, o.weak, o.strong};
        });
        if (variant.users) {
            out.v[8] = noma_sum_rate_given(dist, *variant.users, targets, s.pair, split, rho);
            out.v[9] = oma_sum_rate_given(dist, *variant.users, targets, s.pair, rho);
        } else {
            out.v[8] = noma_sum_rate(dist, config_.params, targets, s.pair, rho);
            out.v[9] = oma_sum_rate(dist, config_.params, targets, s.pair, rho);
        }
        return out;
    }

    AnalyticValues eval(const OneBit& s, const Variant& variant, const RateTargets& targets, double rho)
    {
        const GainDistribution& dist = unordered();
        const PowerSplit& split = config_.params.split;
        AnalyticValues out;
        average(out, variant, [&](int k) -> std::optional<std::array<double, 4>> {
            const FeedbackThreshold xi = s.rule.resolve(feedback_thresholds(split, targets, rho), rho, k);
            return std::array<double, 4>{
                onebit_outage(Role::weak, k, xi, split, targets, rho, dist),
                onebit_outage(Role::strong, k, xi, split, targets, rho, dist),
                onebit_oma_outage(Role::weak, k, xi, targets, rho, dist),
                onebit_oma_outage(Role::strong, k, xi, targets, rho, dist),
            };
        });
        if (variant.users) {
            out.v[8] = onebit_sum_rate_given(dist, *variant.users, split, targets, s.rule, rho);
            out.v[9] = onebit_oma_sum_rate_given(dist, *variant.users, split, targets, s.rule, rho);
        } else {
            out.v[8] = onebit_sum_rate(dist, config_.params, targets, s.rule, rho);
            out.v[9] = onebit_oma_sum_rate(dist, config_.params, targets, s.rule, rho);
        }
        return out;
    }

    AnalyticValues eval(const DistanceOnly& s, const Variant&, const RateTargets& targets, double rho)
    {
        const SystemParams& p = config_.params;
        const GainDistribution& weak = kth(s.pair.weak_order);
        const GainDistribution& strong = kth(s.pair.strong_order);
        const SchemeOutage n = distance_noma_outage(weak, strong, s.pair, p, targets, rho);
        const SchemeOutage o = distance_oma_outage(weak, strong, s.pair, p, targets, rho);
        const auto eta = eta_thresholds(p.split, targets, rho);
        const double y_weak = rate_threshold(2.0 * targets.weak_rate) / rho;
        const double y_strong = rate_threshold(2.0 * targets.strong_rate) / rho;
        AnalyticValues out;
        out.v[0] = n.weak;
        out.v[1] = eta ? distance_scheme_conditional_outage(weak, s.pair.weak_order, eta->weak, p) : 1.0;
        out.v[2] = n.strong;
        out.v[3] = eta ? distance_scheme_conditional_outage(strong, s.pair.strong_order, eta->strong, p) : 1.0;
        out.v[4] = o.weak;
        out.v[5] = distance_scheme_conditional_outage(weak, s.pair.weak_order, y_weak, p);
        out.v[6] = o.strong;
        out.v[7] = distance_scheme_conditional_outage(strong, s.pair.strong_order, y_strong, p);
        out.v[8] = distance_sum_rate(weak, strong, s.pair, p, targets, rho);
        out.v[9] = distance_oma_sum_rate(weak, strong, s.pair, p, targets, rho);
        return out;
    }

    AnalyticValues eval(const MultiBeam& s, const Variant& variant, const RateTargets& targets, double rho)
    {
        const SystemParams& p = config_.params;
        auto& set = multibeam_[{s.beams, s.pair.weak_order, s.pair.strong_order, variant.strong_rate}];
        if (!set.weak) {
            set.weak = std::make_unique<MultibeamOutage>(p, s.beams, s.pair.weak_order, MultibeamLink::noma_weak,
                                                         targets);
            set.strong = std::make_unique<MultibeamOutage>(p, s.beams, s.pair.strong_order,
                                                           MultibeamLink::noma_strong, targets);
            set.oma_weak = std::make_unique<MultibeamOutage>(p, s.beams, s.pair.weak_order,
                                                             MultibeamLink::oma_weak, targets);
            set.oma_strong = std::make_unique<MultibeamOutage>(p, s.beams, s.pair.strong_order,
                                                               MultibeamLink::oma_strong, targets);
        }
        AnalyticValues out;
        const MultibeamOutage* links[] = {set.weak.get(), set.strong.get(), set.oma_weak.get(), set.oma_strong.get()};
        for (std::size_t k = 0; k < 4; ++k) {
            out.v[2 * k] = links[k]->outage(rho);
            out.v[2 * k + 1] = links[k]->conditional_outage(rho);
        }
        out.v[8] = multibeam_sum_rate(*set.weak, *set.strong, s.beams, targets, rho);
        out.v[9] = multibeam_sum_rate(*set.oma_weak, *set.oma_strong, s.beams, targets, rho);
        return out;
    }

    struct MultibeamSet {
        std::unique_ptr<MultibeamOutage> weak;
        std::unique_ptr<MultibeamOutage> strong;
        std::unique_ptr<MultibeamOutage> oma_weak;
        std::unique_ptr<MultibeamOutage> oma_strong;
    };

    const ExperimentConfig& config_;
    std::unique_ptr<GainDistribution> unordered_;
    std::map<int, std::unique_ptr<GainDistribution>> kth_;
    std::map<std::tuple<int, int, int, double>, MultibeamSet> multibeam_;
};

} // namespace

SweepTable run(const ExperimentConfig& config)
{
    const Diagnostics d = validate(config);
    if (!d.ok()) {
        throw ConfigError(join(d.errors));
    }
    const bool want_analytic = config.mode != RunMode::mc;
    const bool want_mc = config.mode != RunMode::analytic;
    AnalyticEngine engine(config);
    SweepTable table;

    for (const Scheme& scheme : config.schemes) {
        const std::string name = scheme_name(scheme);
        for (const Variant& v : variants(config)) {
            const std::size_t n_grid = config.power_dbm.size();
            std::vector<MetricRow> analytic(n_grid);
            std::vector<MetricRow> mc(n_grid);
            if (want_analytic) {
                for (std::size_t g = 0; g < n_grid; ++g) {
                    analytic[g] = engine.evaluate(scheme, v, config.power_dbm[g]).row();
                }
            }
            if (want_mc) {
                const SimConfig sim{config.params, RateTargets{config.weak_rate, v.strong_rate}, scheme, v.users};
                const std::vector<Aggregate> agg =
                    sweep(sim, config.power_dbm, config.trials, config.seed, config.threads);
                for (std::size_t g = 0; g < n_grid; ++g) {
                    mc[g] = from_aggregate(agg[g]);
                }
            }
            for (std::size_t g = 0; g < n_grid; ++g) {
                for (std::size_t m = 0; m < n_metrics; ++m) {
                    SweepRow row;
                    row.power_dbm = config.power_dbm[g];
                    row.scheme = name;
                    row.variant = v.label;
                    row.metric = metric_specs[m].name;
                    row.unit = metric_specs[m].unit;
                    if (want_analytic) {
                        row.provenance = Provenance::analytic;
                        row.value = analytic[g][m].value;
                        table.rows.push_back(row);
                    }
                    if (want_mc) {
                        row.provenance = Provenance::mc;
                        row.value = mc[g][m].value;
                        row.stderr_value = mc[g][m].stderr_value;
                        row.trials = mc[g][m].trials;
                        table.rows.push_back(row);
                    }
                }
            }
        }
    }
    return table;
}

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

namespace {

std::string csv_field(const std::string& s)
{
    if (s.find_first_of(",\"\r\n") == std::string::npos) {
        return s;
    }
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') {
            out += '"';
        }
        out += ch;
    }
    return out + "\"";
}

} // namespace

void write_csv(const SweepTable& table, std::ostream& out)
{
    out << "power_dbm,scheme,variant,metric,unit,provenance,value,stderr,trials\r\n";
    out << "dBm,-,-,-,-,-,per unit column,per unit column,count\r\n";
    for (const SweepRow& r : table.rows) {
        out << fmt(r.power_dbm) << ',' << csv_field(r.scheme) << ',' << csv_field(r.variant) << ','
            << csv_field(r.metric) << ',' << csv_field(r.unit) << ','
            << (r.provenance == Provenance::analytic ? "analytic" : "mc") << ',' << fmt(r.value) << ','
            << (r.stderr_value ? fmt(*r.stderr_value) : "") << ','
            << (r.trials ? std::to_string(*r.trials) : "") << "\r\n";
    }
}

} // namespace mmnoma
