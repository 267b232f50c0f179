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

#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "mmnoma/experiment.hpp"

using namespace mmnoma;
namespace fs = std::filesystem;

namespace {

const char* kBase = R"(name = unit
[system]
antennas = 4
density = 1
half_angle = 0.1
blockage = 0.1
radius = 10
path_loss_exponent = 2
noise_dbm = -30
weak_share = 0.75
[rates]
weak = 0.5
strong = 6
[scheme]
kind = perfect_csi
[run]
users = 5
power_dbm = 0:10:5
trials = 500
seed = 3
mode = both
)";

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string error_of(const std::string& text)
{
    try {
        parse_config(text);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

bool starts_with(const std::string& s, const std::string& prefix)
{
    return s.rfind(prefix, 0) == 0;
}

std::string cli()
{
    const char* p = std::getenv("MMNOMA_CLI");
    return p ? p : "";
}

fs::path golden_dir()
{
    const char* p = std::getenv("MMNOMA_GOLDEN_DIR");
    return p ? fs::path(p) : fs::path();
}

fs::path scratch(const std::string& name)
{
    const fs::path dir = fs::temp_directory_path() / "mmnoma_test_experiment";
    fs::create_directories(dir);
    return dir / name;
}

int shell(const std::string& cmd)
{
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

} // namespace

TEST_CASE("parse a full config")
{
    const auto c = parse_config(kBase);
    CHECK(c.name == "unit");
    CHECK(c.params.antennas == 4);
    CHECK(c.params.split.weak_share == 0.75);
    CHECK(c.params.split.strong_share == doctest::Approx(0.25));
    CHECK(c.strong_rates == std::vector<double>{6.0});
    CHECK(c.users == std::vector<int>{5});
    CHECK(c.power_dbm == std::vector<double>{0.0, 5.0, 10.0});
    CHECK(c.trials == 500);
    CHECK(c.seed == 3);
    CHECK(c.mode == RunMode::both);
    REQUIRE(c.schemes.size() == 1);
    CHECK(scheme_name(c.schemes[0]) == "perfect_csi");
}

TEST_CASE("parse scheme kinds and ranges")
{
    const auto c = parse_config(std::string(kBase) + "[scheme]\n");
    CHECK(c.schemes.size() == 1);
    const auto r = parse_config(R"(
[scheme]
kind = distance, multibeam, onebit
weak_order = 3
strong_order = 1
beams = 2
threshold = fixed
threshold_value = 0.25
[run]
users = poisson
power_dbm = 0:1:0.25, 7
)");
    REQUIRE(r.schemes.size() == 3);
    CHECK(scheme_name(r.schemes[0]) == "distance");
    CHECK(scheme_name(r.schemes[1]) == "multibeam");
    CHECK(scheme_name(r.schemes[2]) == "onebit");
    CHECK(std::get<MultiBeam>(r.schemes[1]).beams == 2);
    CHECK(std::get<DistanceOnly>(r.schemes[0]).pair.weak_order == 3);
    CHECK(std::get<OneBit>(r.schemes[2]).rule.kind == ThresholdRuleKind::fixed);
    CHECK(std::get<OneBit>(r.schemes[2]).rule.fixed_value == 0.25);
    CHECK(r.users.empty());
    CHECK(r.power_dbm == std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0, 7.0});
}

TEST_CASE("parse errors name the key")
{
    CHECK(starts_with(error_of("[system]\nantena = 4\n"), "system.antena"));
    CHECK(starts_with(error_of("[system]\nantennas = four\n"), "system.antennas"));
    CHECK(starts_with(error_of("[system]\nantennas = 4\nantennas = 5\n"), "system.antennas"));
    CHECK(starts_with(error_of("[run]\npower_dbm = 0:10:-1\n"), "run.power_dbm"));
    CHECK(starts_with(error_of("[run]\nmode = sometimes\n"), "run.mode"));
    CHECK(starts_with(error_of("[scheme]\nkind = magic\n"), "scheme.kind"));
    CHECK_FALSE(error_of("[nowhere]\nx = 1\n").empty());
    CHECK(error_of("# only a comment\n; another\n\n").empty());
}

TEST_CASE("validation lists every problem")
{
    auto c = parse_config(kBase);
    CHECK(validate(c).ok());
    CHECK_FALSE(validate(c).notes.empty());

    c.params.split = {0.3, 0.7};
    c.params.antennas = 0;
    c.trials = 0;
    const auto d = validate(c);
    CHECK(d.errors.size() >= 3);
    auto mentions = [&](const std::string& key) {
        for (const auto& e : d.errors) {
            if (e.find(key) != std::string::npos) {
                return true;
            }
        }
        return false;
    };
    CHECK(mentions("system.weak_share"));
    CHECK(mentions("system.antennas"));
    CHECK(mentions("run.trials"));

    auto m = parse_config(kBase);
    m.params.antennas = 8;
    m.params.half_angle = 0.3;
    m.users.clear();
    m.schemes = {MultiBeam{4, {3, 1}}};
    const auto dm = validate(m);
    CHECK_FALSE(dm.ok());
    bool beams = false;
    for (const auto& e : dm.errors) {
        beams = beams || e.find("scheme.beams") != std::string::npos;
    }
    CHECK(beams);

    auto infeasible = parse_config(kBase);
    infeasible.weak_rate = 2.0;
    CHECK_FALSE(validate(infeasible).ok());
}

TEST_CASE("variants")
{
    auto c = parse_config(kBase);
    c.strong_rates = {4.0, 6.0};
    c.users = {2, 5};
    const auto v = variants(c);
    REQUIRE(v.size() == 4);
    CHECK(v[0].label == "Rj=4 K=2");
    CHECK(v[3].label == "Rj=6 K=5");
    c.users.clear();
    const auto p = variants(c);
    REQUIRE(p.size() == 2);
    CHECK_FALSE(p[0].users.has_value());
}

TEST_CASE("table layout")
{
    const auto c = parse_config(kBase);
    const auto table = run(c);
    // 3 powers x 10 metrics x 2 provenances
    REQUIRE(table.rows.size() == 60);
    CHECK(table.rows[0].provenance == Provenance::analytic);
    CHECK(table.rows[1].provenance == Provenance::mc);
    CHECK(table.rows[0].metric == "weak_outage");
    CHECK_FALSE(table.rows[0].stderr_value.has_value());
    CHECK(table.rows[1].trials == 500u);
    CHECK(table.rows[0].unit == "probability");
    CHECK(table.rows[16].metric == "noma_sum_rate");
    CHECK(table.rows[16].unit == "bit/s/Hz");
    CHECK(table.rows[20].power_dbm == 5.0);

    std::ostringstream out;
    write_csv(table, out);
    const std::string csv = out.str();
    CHECK(starts_with(csv, "power_dbm,scheme,variant,metric,unit,provenance,value,stderr,trials\r\n"
                           "dBm,-,-,-,-,-,per unit column,per unit column,count\r\n"));
    std::size_t lines = 0;
    for (std::size_t p = csv.find("\r\n"); p != std::string::npos; p = csv.find("\r\n", p + 2)) {
        ++lines;
    }
    CHECK(lines == 62);
    CHECK(csv.find("0,perfect_csi,Rj=6 K=5,weak_outage,probability,analytic,") != std::string::npos);

    auto analytic_only = c;
    analytic_only.mode = RunMode::analytic;
    CHECK(run(analytic_only).rows.size() == 30);
}

TEST_CASE("CSV quoting")
{
    SweepTable t;
    SweepRow r;
    r.scheme = "a,b";
    r.variant = "say \"hi\"";
    r.metric = "m";
    r.unit = "u";
    r.value = 0.125;
    t.rows.push_back(r);
    std::ostringstream out;
    write_csv(t, out);
    CHECK(out.str().find("0,\"a,b\",\"say \"\"hi\"\"\",m,u,analytic,0.125,,\r\n") != std::string::npos);
}

TEST_CASE("library output matches the golden file")
{
    const fs::path dir = golden_dir();
    if (dir.empty()) {
        MESSAGE("MMNOMA_GOLDEN_DIR not set, skipping");
        return;
    }
    auto c = load_config((dir / "small.conf").string());
    std::ostringstream out;
    write_csv(run(c), out);
    CHECK(out.str() == slurp(dir / "small.csv"));
    c.threads = 1;
    std::ostringstream single;
    write_csv(run(c), single);
    CHECK(single.str() == out.str());
}

TEST_CASE("command line tool")
{
    const std::string exe = cli();
    if (exe.empty()) {
        MESSAGE("MMNOMA_CLI not set, skipping");
        return;
    }
    const fs::path conf = golden_dir() / "small.conf";
    const fs::path a = scratch("a.csv");
    const fs::path b = scratch("b.csv");
    const fs::path err = scratch("err.txt");
    CHECK(shell(exe + " run --config " + conf.string() + " --out " + a.string() + " 2>" + err.string()) == 0);
    CHECK(shell(exe + " run " + conf.string() + " --threads 1 > " + b.string() + " 2>" + err.string()) == 0);
    CHECK(slurp(a) == slurp(golden_dir() / "small.csv"));
    CHECK(slurp(a) == slurp(b));

    CHECK(shell(exe + " run " + conf.string() + " --seed 100 --trials 500 --mode mc --out " + b.string() +
                " 2>" + err.string()) == 0);
    const std::string mc = slurp(b);
    CHECK(mc.find(",analytic,") == std::string::npos);
    CHECK(mc.find(",mc,") != std::string::npos);
    CHECK(mc.find(",500\r\n") != std::string::npos);

    const fs::path bad = scratch("bad.conf");
    {
        std::ofstream out(bad);
        out << "[system]\nweak_share = 0.2\nantennas = 0\n";
    }
    CHECK(shell(exe + " validate " + bad.string() + " 2>" + err.string()) == 1);
    const std::string msg = slurp(err);
    CHECK(msg.find("system.weak_share") != std::string::npos);
    CHECK(msg.find("system.antennas") != std::string::npos);
    {
        std::ofstream out(bad);
        out << "[system]\nwrong = 1\n";
    }
    CHECK(shell(exe + " run " + bad.string() + " 2>" + err.string()) == 1);
    CHECK(slurp(err).find("system.wrong") != std::string::npos);

    CHECK(shell(exe + " validate " + conf.string() + " >" + b.string() + " 2>" + err.string()) == 0);
    CHECK(shell(exe + " run " + conf.string() + " --mode sometimes 2>" + err.string()) != 0);

    CHECK(shell(exe + " list-presets > " + b.string() + " 2>" + err.string()) == 0);
    const std::string presets = slurp(b);
    for (const char* name : {"fig1", "fig2", "fig3", "fig5", "fig6", "fig7"}) {
        CHECK(presets.find(name) != std::string::npos);
    }
    CHECK(shell(exe + " validate fig6 >" + b.string() + " 2>" + err.string()) == 0);
}
