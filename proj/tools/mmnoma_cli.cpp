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

// mmnoma command line: run, validate, list-presets.

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mmnoma/experiment.hpp"
#include "mmnoma/quadrature.hpp"

namespace fs = std::filesystem;

namespace {

fs::path preset_dir()
{
    if (const char* env = std::getenv("MMNOMA_PRESET_DIR")) {
        return env;
    }
    return MMNOMA_PRESET_DIR;
}

std::vector<std::string> preset_names()
{
    std::vector<std::string> names;
    std::error_code ec;
    for (const auto& e : fs::directory_iterator(preset_dir(), ec)) {
        if (e.path().extension() == ".conf") {
            names.push_back(e.path().stem().string());
        }
    }
    std::sort(names.begin(), names.end());
    return names;
}

// A config argument is a file path, or the name of a bundled preset.
std::string resolve_config(const std::string& arg)
{
    if (fs::exists(arg)) {
        return arg;
    }
    const fs::path preset = preset_dir() / (arg + ".conf");
    if (fs::exists(preset)) {
        return preset.string();
    }
    throw mmnoma::ConfigError("config: no file or preset named '" + arg + "'");
}

struct Overrides {
    std::string config;
    std::uint64_t seed = 0;
    std::uint64_t trials = 0;
    std::string mode;
    std::string out;
    unsigned threads = 0;
    CLI::Option* seed_opt = nullptr;
    CLI::Option* trials_opt = nullptr;
    CLI::Option* threads_opt = nullptr;
};

mmnoma::ExperimentConfig load(const Overrides& o)
{
    mmnoma::ExperimentConfig c = mmnoma::load_config(resolve_config(o.config));
    if (*o.seed_opt) {
        c.seed = o.seed;
    }
    if (*o.trials_opt) {
        c.trials = o.trials;
    }
    if (*o.threads_opt) {
        c.threads = o.threads;
    }
    if (o.mode == "analytic") {
        c.mode = mmnoma::RunMode::analytic;
    } else if (o.mode == "mc") {
        c.mode = mmnoma::RunMode::mc;
    } else if (o.mode == "both") {
        c.mode = mmnoma::RunMode::both;
    }
    if (!o.out.empty()) {
        c.output = o.out;
    }
    return c;
}

void add_common(CLI::App* cmd, Overrides& o)
{
    cmd->add_option("--config,config", o.config, "config file, or a preset name")->required();
    o.seed_opt = cmd->add_option("--seed", o.seed, "master seed (overrides run.seed)");
    o.trials_opt = cmd->add_option("--trials", o.trials, "Monte Carlo trials per grid point")
                       ->check(CLI::PositiveNumber);
    cmd->add_option("--mode", o.mode, "analytic, mc or both")
        ->check(CLI::IsMember({"analytic", "mc", "both"}));
    cmd->add_option("--out", o.out, "output CSV path, - for stdout");
    o.threads_opt = cmd->add_option("--threads", o.threads, "worker threads, 0 for all cores");
}

int do_validate(const Overrides& o)
{
    const mmnoma::ExperimentConfig c = load(o);
    const mmnoma::Diagnostics d = mmnoma::validate(c);
    for (const auto& n : d.notes) {
        std::cerr << "note: " << n << '\n';
    }
    for (const auto& e : d.errors) {
        std::cerr << "error: " << e << '\n';
    }
    if (d.ok()) {
        std::cerr << "config ok\n";
        return 0;
    }
    std::cerr << d.errors.size() << " problem(s)\n";
    return 1;
}

int do_run(const Overrides& o)
{
    const mmnoma::ExperimentConfig c = load(o);
    const mmnoma::SweepTable table = mmnoma::run(c);
    if (c.output.empty() || c.output == "-") {
        mmnoma::write_csv(table, std::cout);
        return std::cout ? 0 : 2;
    }
    const fs::path out(c.output);
    if (out.has_parent_path()) {
        fs::create_directories(out.parent_path());
    }
    std::ofstream file(out, std::ios::binary);
    if (!file) {
        std::cerr << "error: cannot write " << c.output << '\n';
        return 2;
    }
    mmnoma::write_csv(table, file);
    file.close();
    if (!file) {
        std::cerr << "error: write to " << c.output << " failed\n";
        return 2;
    }
    std::cerr << "wrote " << table.rows.size() << " rows to " << c.output << '\n';
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"mmnoma: outage and sum-rate sweeps for random-beamforming mmWave NOMA"};
    app.require_subcommand(1);

    Overrides run_opts;
    CLI::App* run_cmd = app.add_subcommand("run", "run analytic and/or Monte Carlo sweeps, write CSV");
    add_common(run_cmd, run_opts);

    Overrides validate_opts;
    CLI::App* validate_cmd = app.add_subcommand("validate", "check a config and print derived quantities");
    add_common(validate_cmd, validate_opts);

    app.add_subcommand("list-presets", "list bundled presets");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run_cmd) {
            return do_run(run_opts);
        }
        if (*validate_cmd) {
            return do_validate(validate_opts);
        }
        for (const auto& name : preset_names()) {
            std::cout << name << '\n';
        }
        return 0;
    } catch (const mmnoma::ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const mmnoma::QuadratureError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
