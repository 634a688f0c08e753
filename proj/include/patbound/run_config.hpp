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

#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "patbound/lte.hpp"
#include "patbound/sweep.hpp"

namespace patbound
{

enum class Subcommand
{
    point,
    pilot_sweep,
    snr_curve,
    envelope,
};

std::string_view to_string(Subcommand subcommand);
std::optional<Subcommand> parse_subcommand(std::string_view text);

/*!
 * A fully resolved run. Built by parse_run_config() from a flat
 * `key = value` file; see README.md for the schema.
 *
 * The rate is always payload_bits / (L n_c); it is never read from the file.
 */
struct RunConfig
{
    std::optional<ChannelProfile> profile;
    std::optional<BlockGeometry> geometry;  //!< set when n_c came from (d, r)
    BlockFadingConfig link;
    Scheme scheme = Scheme::simo;
    double payload_bits = 30.0;

    std::optional<double> snr_db;
    std::vector<double> snr_grid_db;
    SnrBracket snr_bracket;
    std::optional<double> target_epsilon;

    bool fixed_pilot = false;  //!< pilot_count given explicitly
    std::optional<PilotRange> pilot_sweep;

    EstimatorSettings settings;
    std::optional<EnvelopeSpec> envelope;
    std::string output = "patbound.csv";
};

/*!
 * Parse and validate. Blank lines and `#` comments are ignored, as are keys
 * under `manifest.` (so a manifest can be fed back as a config). Throws
 * ConfigError listing every problem found: syntax, unknown or duplicate keys,
 * malformed values and violated model invariants.
 */
RunConfig parse_run_config(std::string_view text);
RunConfig load_run_config(const std::string& path);

//! Canonical config text; parse_run_config() of it yields the same run.
std::string to_config_text(const RunConfig& run);

//! Keys a subcommand needs beyond what parse_run_config() checks.
std::vector<std::string> requirement_violations(const RunConfig& run, Subcommand subcommand);

//! Comma list `a,b,c` or range `start:step:stop` (inclusive, to within step/1e6).
std::vector<double> parse_number_list(std::string_view text);

}  // namespace patbound
