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

// Command-line front end: patbound <subcommand> --config <path> [--seed N] [--budget N] [--out path]

#include <chrono>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "patbound/errors.hpp"
#include "patbound/report.hpp"
#include "patbound/run_config.hpp"
#include "patbound/sweep.hpp"

using namespace patbound;

namespace
{

// Exit codes: 2 invalid config or usage, 3 numerical/bracket failure, 4 I/O, 1 anything else.
int fail(int code, std::string_view kind, std::string message)
{
    for (auto& c : message)
        if (c == '\n' || c == '\r')
            c = ' ';
    std::cerr << "patbound: error: " << kind << ": " << message << '\n';
    return code;
}

SweepResult dispatch(const RunConfig& run, Subcommand subcommand)
{
    const auto& link = run.link;
    switch (subcommand)
    {
    case Subcommand::point:
    {
        SweepResult out;
        out.axis_name = "snr_db";
        out.metadata = describe(link, run.scheme, run.settings);
        SweepRow row;
        row.axis_value = row.snr_db = *run.snr_db;
        row.pilot_count = link.pilot_count;
        row.rate = link.rate;
        row.estimate = evaluate_point(link, run.scheme, run.settings);
        out.rows.push_back(row);
        return out;
    }
    case Subcommand::pilot_sweep:
        return pilot_sweep(link, run.scheme, *run.pilot_sweep, run.settings);
    case Subcommand::snr_curve:
        return snr_curve(link, run.scheme, run.snr_grid_db, run.fixed_pilot ? std::nullopt : run.pilot_sweep,
                         run.settings);
    case Subcommand::envelope:
    {
        EnvelopeSpec spec = *run.envelope;
        spec.pilots = *run.pilot_sweep;
        return diversity_envelope(link, run.scheme, spec, *run.target_epsilon, run.snr_bracket, run.settings);
    }
    }
    throw std::logic_error("unhandled subcommand");
}

const char* description(Subcommand sub)
{
    switch (sub)
    {
    case Subcommand::point:
        return "error probability at one (snr_db, pilot_count)";
    case Subcommand::pilot_sweep:
        return "error probability vs number of pilots at snr_db";
    case Subcommand::snr_curve:
        return "error probability vs SNR";
    case Subcommand::envelope:
        return "minimum SNR meeting target_epsilon vs diversity branches";
    }
    return "";
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Finite-blocklength error bounds for pilot-assisted MIMO links"};
    app.set_version_flag("--version", PATBOUND_VERSION);
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::int64_t> budget;
    std::optional<std::string> out_path;
    for (auto sub : {Subcommand::point, Subcommand::pilot_sweep, Subcommand::snr_curve, Subcommand::envelope})
    {
        auto* cmd = app.add_subcommand(std::string(to_string(sub)), description(sub));
        cmd->add_option("--config", config_path, "run config file")->required();
        cmd->add_option("--seed", seed, "override the config seed");
        cmd->add_option("--budget", budget, "override mc_samples and sp_block_samples")->check(CLI::Range(2, INT32_MAX));
        cmd->add_option("--out", out_path, "CSV output path (manifest goes to <path>.manifest)");
    }

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::CallForHelp& e)
    {
        return app.exit(e);
    }
    catch (const CLI::CallForVersion& e)
    {
        return app.exit(e);
    }
    catch (const CLI::ParseError& e)
    {
        return fail(2, "usage", e.what());
    }

    const auto subcommand = *parse_subcommand(app.get_subcommands().front()->get_name());
    try
    {
        RunConfig run = load_run_config(config_path);
        if (seed)
            run.settings.options.seed = *seed;
        if (budget)
            run.settings.mc_samples = run.settings.sp_block_samples = *budget;
        if (out_path)
            run.output = *out_path;
        if (auto missing = requirement_violations(run, subcommand); !missing.empty())
            throw ConfigError(std::move(missing));

        const auto start = std::chrono::steady_clock::now();
        const SweepResult result = dispatch(run, subcommand);
        const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

        std::ofstream csv(run.output, std::ios::binary);
        if (!csv)
            return fail(4, "io", "cannot write '" + run.output + "'");
        write_csv(csv, result);
        std::ofstream manifest(run.output + ".manifest", std::ios::binary);
        if (!manifest)
            return fail(4, "io", "cannot write '" + run.output + ".manifest'");
        write_manifest(manifest, run, subcommand, result, wall);
        if (!csv || !manifest)
            return fail(4, "io", "write failed for '" + run.output + "'");
        std::cout << run.output << '\n';
        return 0;
    }
    catch (const ConfigError& e)
    {
        return fail(2, "config", e.what());
    }
    catch (const BracketError& e)
    {
        return fail(3, "bracket", e.what());
    }
    catch (const EstimatorError& e)
    {
        return fail(3, "estimator", e.what());
    }
    catch (const std::exception& e)
    {
        return fail(1, "internal", e.what());
    }
}
