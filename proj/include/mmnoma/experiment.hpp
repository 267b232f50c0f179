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

#ifndef MMNOMA_EXPERIMENT_HPP
#define MMNOMA_EXPERIMENT_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mmnoma/sim.hpp"

namespace mmnoma {

enum class RunMode { analytic, mc, both };

/// Parsed experiment description.
///
/// The text format is INI-like:
///
///     # comment
///     [section]
///     key = value
///
/// Sections: system, rates, scheme, run. List-valued keys take comma
/// separated values; power grids also accept start:stop:step.
struct ExperimentConfig {
    std::string name = "experiment";
    SystemParams params;
    double weak_rate = 0.5;
    std::vector<double> strong_rates{6.0};
    /// Every scheme is run over every variant; rows carry the scheme name.
    std::vector<Scheme> schemes{PerfectCsi{}};
    /// Each entry conditions the drop on that many users; empty means Poisson.
    std::vector<int> users;
    std::vector<double> power_dbm;
    std::uint64_t trials = 10000;
    std::uint64_t seed = 1;
    RunMode mode = RunMode::both;
    std::string output;  ///< empty or "-" writes to standard output
    unsigned threads = 0;

    ExperimentConfig();
};

/// Parse failure; the message starts with "section.key".
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

/// One (strong rate, user count) combination of a config.
struct Variant {
    std::string label;
    double strong_rate = 6.0;
    std::optional<int> users;
};

std::vector<Variant> variants(const ExperimentConfig& config);

struct Diagnostics {
    std::vector<std::string> errors;
    std::vector<std::string> notes;  ///< derived quantities, informational

    bool ok() const { return errors.empty(); }
};

/// Checks every invariant and lists all violations, not just the first.
Diagnostics validate(const ExperimentConfig& config);

enum class Provenance { analytic, mc };

struct SweepRow {
    double power_dbm = 0.0;
    std::string scheme;
    std::string variant;
    std::string metric;
    std::string unit;
    Provenance provenance = Provenance::analytic;
    double value = 0.0;
    std::optional<double> stderr_value;
    std::optional<std::uint64_t> trials;
};

struct SweepTable {
    std::vector<SweepRow> rows;
};

/// Runs the configured pipelines. Throws ConfigError when validation fails
/// and QuadratureError when an integral misses its tolerance.
SweepTable run(const ExperimentConfig& config);

/// RFC 4180 CSV with a names line and a units line.
void write_csv(const SweepTable& table, std::ostream& out);

std::string scheme_name(const Scheme& scheme);

} // namespace mmnoma

#endif
