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
#include <string>

#include "patbound/run_config.hpp"
#include "patbound/sweep.hpp"

namespace patbound
{

/*!
 * Plot data: a header row, then one row per SweepRow. Columns are the axis,
 * snr_db (unless it is the axis), eps_mc, eps_mc_stderr, eps_sp, eb_n0_db and
 * n_p (unless it is the axis). Envelope results get a leading `curve` column
 * and include the fixed-pilot curves. dB values use 3 decimals, epsilon 6
 * significant digits; missing estimates are left empty.
 */
void write_csv(std::ostream& os, const SweepResult& result);

/*!
 * Run manifest: the resolved config (re-runnable as is) followed by
 * `manifest.*` entries for subcommand, version, wall time and result metadata.
 */
void write_manifest(std::ostream& os, const RunConfig& run, Subcommand subcommand, const SweepResult& result,
                    double wall_time_s);

}  // namespace patbound
