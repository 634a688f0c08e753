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

#include "patbound/report.hpp"

#include <cstdio>
#include <ostream>

namespace patbound
{

namespace
{

std::string fixed3(double value)
{
    char buffer[48];
    std::snprintf(buffer, sizeof buffer, "%.3f", value);
    return buffer;
}

std::string scientific(double value)
{
    char buffer[48];
    std::snprintf(buffer, sizeof buffer, "%.5e", value);
    return buffer;
}

std::string axis_text(const std::string& axis, double value)
{
    if (axis == "snr_db")
        return fixed3(value);
    char buffer[48];
    std::snprintf(buffer, sizeof buffer, "%.0f", value);
    return buffer;
}

void write_row(std::ostream& os, const std::string& axis, const SweepRow& row)
{
    os << axis_text(axis, row.axis_value);
    if (axis != "snr_db")
        os << ',' << fixed3(row.snr_db);
    const auto& e = row.estimate;
    os << ',' << (e.mc ? scientific(e.mc->value) : "") << ',' << (e.mc ? scientific(e.mc->std_error) : "") << ','
       << (e.sp ? scientific(e.sp->value) : "") << ',' << fixed3(linear_to_db(db_to_linear(row.snr_db) / row.rate));
    if (axis != "n_p")
        os << ',' << row.pilot_count;
    os << '\n';
}

}  // namespace

void write_csv(std::ostream& os, const SweepResult& result)
{
    const std::string& axis = result.axis_name;
    const bool envelope = !result.fixed_pilot_curves.empty();
    if (envelope)
        os << "curve,";
    os << axis;
    if (axis != "snr_db")
        os << ",snr_db";
    os << ",eps_mc,eps_mc_stderr,eps_sp,eb_n0_db";
    if (axis != "n_p")
        os << ",n_p";
    os << '\n';

    for (const auto& row : result.rows)
    {
        if (envelope)
            os << "envelope,";
        write_row(os, axis, row);
    }
    for (const auto& [np, rows] : result.fixed_pilot_curves)
        for (const auto& row : rows)
        {
            os << "np" << np << ',';
            write_row(os, axis, row);
        }
}

void write_manifest(std::ostream& os, const RunConfig& run, Subcommand subcommand, const SweepResult& result,
                    double wall_time_s)
{
    char buffer[48];
    std::snprintf(buffer, sizeof buffer, "%.3f", wall_time_s);
    os << to_config_text(run);
    os << "manifest.subcommand = " << to_string(subcommand) << '\n'
       << "manifest.version = " << PATBOUND_VERSION << '\n'
       << "manifest.wall_time_s = " << buffer << '\n';
    std::snprintf(buffer, sizeof buffer, "%.17g", run.link.rate);
    os << "manifest.rate = " << buffer << '\n';
    if (result.argmin)
    {
        std::snprintf(buffer, sizeof buffer, "%.17g", *result.argmin);
        os << "manifest.argmin = " << buffer << '\n';
    }
    if (!result.skipped_pilots.empty())
    {
        os << "manifest.skipped_pilots = ";
        for (std::size_t i = 0; i < result.skipped_pilots.size(); ++i)
            os << (i ? "," : "") << result.skipped_pilots[i];
        os << '\n';
    }
    for (const auto& [key, value] : result.metadata)
        os << "manifest.meta." << key << " = " << value << '\n';
}

}  // namespace patbound
