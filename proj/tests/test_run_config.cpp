// SPDX-License-Identifier: Apache-2.0
//
// patbound: finite-blocklength error bounds for pilot-assisted MIMO links
// Copyright (C) 2026 The patbound authors
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

#include <filesystem>
#include <sstream>

#include "patbound/errors.hpp"
#include "patbound/report.hpp"
#include "patbound/run_config.hpp"

using namespace patbound;

namespace
{

std::vector<std::string> violations_of(const std::string& text)
{
    try
    {
        parse_run_config(text);
    }
    catch (const ConfigError& e)
    {
        return e.violations();
    }
    return {};
}

bool mentions(const std::vector<std::string>& items, const std::string& needle)
{
    for (const auto& item : items)
        if (item.find(needle) != std::string::npos)
            return true;
    return false;
}

const char* kEpa = R"(# comment
profile = EPA
geometry.d = 2
geometry.r = 3
diversity_branches = 4
scheme = simo_1xN
rx_antennas = 4
payload_bits = 30
snr_db = -4      # trailing comment
pilot_count = 28
estimator = both
seed = 9
)";

}  // namespace

TEST_CASE("shipped configs load")
{
    int count = 0;
    for (const auto& entry : std::filesystem::directory_iterator(PATBOUND_CONFIG_DIR))
    {
        if (entry.path().extension() != ".cfg")
            continue;
        ++count;
        INFO(entry.path().string());
        CHECK_NOTHROW(load_run_config(entry.path().string()));
    }
    CHECK(count >= 10);
    const auto run = load_run_config(std::string(PATBOUND_CONFIG_DIR) + "/epa-simo1x4.cfg");
    CHECK(run.link.coherence_block_size == 72);
    CHECK(run.link.blocklength() == 288);
    CHECK(requirement_violations(run, Subcommand::snr_curve).empty());
}

TEST_CASE("resolved values")
{
    const auto run = parse_run_config(kEpa);
    CHECK(run.link.rate == 30.0 / 288.0);
    CHECK(run.link.snr == db_to_linear(-4.0));
    CHECK(run.link.pilot_count == 28);
    CHECK(run.fixed_pilot);
    CHECK(run.settings.estimator == Estimator::both);
    CHECK(run.settings.options.seed == 9);
    REQUIRE(run.geometry);
    CHECK(run.geometry->rbs_per_coherence_band == 3);
    CHECK(run.profile->name == "EPA");
    CHECK(requirement_violations(run, Subcommand::point).empty());
    CHECK(mentions(requirement_violations(run, Subcommand::pilot_sweep), "pilot_sweep"));
    CHECK(requirement_violations(run, Subcommand::envelope).size() == 3);

    const auto tdlc = parse_run_config("profile = TDL-C\ngeometry.d = 2\ngeometry.r = 1\ndiversity_branches = 12\n"
                                       "scheme = alamouti_2x2\nrx_antennas = 2\npilot_sweep = 0:1:0\n");
    CHECK(tdlc.link.tx_antennas == 2);
    CHECK(tdlc.link.coherence_block_size == 24);
    CHECK(tdlc.link.pilot_count == 2);
    CHECK_FALSE(tdlc.fixed_pilot);
    CHECK(tdlc.link.rate == 30.0 / 288.0);
}

TEST_CASE("every violation is reported")
{
    const auto v = violations_of("scheme = alamouti_2x2\nrx_antennas = 2\ntx_antennas = 2\npilot_count = 1\n"
                                 "coherence_block_size = 72\ndiversity_branches = 4\nrate = 0.1\nestimator = exact\n"
                                 "mc_samples = lots\nnot a pair\n");
    CHECK(mentions(v, "pilot_count must be >= tx_antennas"));
    CHECK(mentions(v, "even number of data symbols"));
    CHECK(mentions(v, "unknown key 'rate'"));
    CHECK(mentions(v, "estimator"));
    CHECK(mentions(v, "mc_samples"));
    CHECK(mentions(v, "line 10"));
    CHECK(v.size() == 6);

    CHECK(mentions(violations_of("profile = EPA\ngeometry.d = 2\ngeometry.r = 3\ndiversity_branches = 5\n"
                                 "scheme = simo\nrx_antennas = 4\npilot_count = 8\n"),
                   "branches_exceed_max"));
    CHECK(mentions(violations_of("scheme = simo\nscheme = simo\nrx_antennas = 1\n"), "duplicate key"));
    CHECK(mentions(violations_of("scheme = simo\nrx_antennas = 1\npilot_count = 2\n"), "geometry is required"));
    CHECK(mentions(violations_of("profile = EVA\nscheme = simo\n"), "unknown profile"));
    CHECK(mentions(violations_of("scheme = simo\nrx_antennas = 1\npilot_count = 2\ncoherence_block_size = 8\n"
                                 "diversity_branches = 1\ntarget_epsilon = 2\n"),
                   "target_epsilon"));
}

TEST_CASE("custom profile and envelope keys")
{
    const auto run = parse_run_config("profile = custom\nprofile.name = lab\nprofile.coherence_bandwidth_hz = 1e6\n"
                                      "profile.coherence_time_s = 1e-3\ngeometry.d = 1\ngeometry.r = 5\n"
                                      "diversity_branches = 20\nscheme = simo\nrx_antennas = 2\npilot_count = 3\n");
    CHECK(run.profile->max_diversity_branches() == 20);
    CHECK(run.link.coherence_block_size == 60);

    const auto env = parse_run_config("scheme = simo\nrx_antennas = 4\nenvelope.branches = 1:1:12\n"
                                      "envelope.fixed_pilots = 4,8\ntarget_epsilon = 1e-3\npilot_sweep = 0:2:0\n");
    REQUIRE(env.envelope);
    CHECK(env.envelope->branches.size() == 12);
    CHECK(env.link.diversity_branches == 1);
    CHECK(env.link.coherence_block_size == 288);
    CHECK(requirement_violations(env, Subcommand::envelope).empty());
}

TEST_CASE("config text round trip")
{
    for (const char* text : {kEpa, "scheme = simo\nrx_antennas = 4\nenvelope.branches = 2,4\ntarget_epsilon = 1e-3\n"
                                   "pilot_sweep = 0:2:0\nsnr_grid_db = -3:0.5:-1\nroute = raw\n"})
    {
        const auto first = parse_run_config(text);
        const std::string canonical = to_config_text(first);
        const auto second = parse_run_config(canonical);
        CHECK(to_config_text(second) == canonical);
        CHECK(second.link.snr == first.link.snr);
        CHECK(second.link.rate == first.link.rate);
        CHECK(second.snr_grid_db == first.snr_grid_db);
    }
}

TEST_CASE("number lists")
{
    CHECK(parse_number_list("1, 2.5,-3") == std::vector<double>{1.0, 2.5, -3.0});
    CHECK(parse_number_list("-10:0.5:-9").size() == 3);
    CHECK(parse_number_list("0:0.1:1").size() == 11);
    CHECK_THROWS_AS(parse_number_list("1:0:2"), std::invalid_argument);
    CHECK_THROWS_AS(parse_number_list("a,b"), std::invalid_argument);
    CHECK_THROWS_AS(parse_number_list(""), std::invalid_argument);
}

TEST_CASE("CSV format")
{
    SweepResult r;
    r.axis_name = "snr_db";
    SweepRow row;
    row.axis_value = row.snr_db = -4.0;
    row.pilot_count = 28;
    row.rate = 30.0 / 288.0;
    row.estimate.sp = ErrorProbEstimate{3.4277612345e-6, 0.0, EstimateMethod::saddlepoint, 100};
    r.rows.push_back(row);
    row.axis_value = row.snr_db = -9.0;
    row.estimate.mc = ErrorProbEstimate{5.3341e-2, 1.5e-3, EstimateMethod::rcus_mc, 100};
    r.rows.push_back(row);
    std::ostringstream os;
    write_csv(os, r);
    // Eb/N0 = snr / R: -4 dB + 10 log10(288 / 30) = 5.823 dB.
    CHECK(os.str()
          == "snr_db,eps_mc,eps_mc_stderr,eps_sp,eb_n0_db,n_p\n"
             "-4.000,,,3.42776e-06,5.823,28\n"
             "-9.000,5.33410e-02,1.50000e-03,3.42776e-06,0.823,28\n");

    r.axis_name = "n_p";
    r.rows.resize(1);
    r.rows[0].axis_value = 28;
    std::ostringstream np;
    write_csv(np, r);
    CHECK(np.str() == "n_p,snr_db,eps_mc,eps_mc_stderr,eps_sp,eb_n0_db\n28,-4.000,,,3.42776e-06,5.823\n");
}

TEST_CASE("manifest is a runnable config")
{
    auto run = parse_run_config(kEpa);
    SweepResult r;
    r.axis_name = "snr_db";
    r.argmin = 28;
    r.metadata = {{"seed", "9"}};
    std::ostringstream os;
    write_manifest(os, run, Subcommand::point, r, 1.5);
    const std::string text = os.str();
    CHECK(text.find("manifest.version = ") != std::string::npos);
    CHECK(text.find("manifest.wall_time_s = 1.500") != std::string::npos);
    CHECK(text.find("manifest.subcommand = point") != std::string::npos);
    const auto back = parse_run_config(text);
    CHECK(to_config_text(back) == to_config_text(run));
}
