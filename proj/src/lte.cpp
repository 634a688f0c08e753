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

#include "patbound/lte.hpp"

#include <cmath>
#include <sstream>

namespace patbound
{

namespace
{

// Ratios such as 20 MHz / 0.66 MHz are computed in floating point; a small
// relative guard keeps exact multiples from rounding down.
int floor_ratio(double numerator, double denominator)
{
    return static_cast<int>(std::floor(numerator / denominator * (1.0 + 1e-12)));
}

}  // namespace

int ChannelProfile::max_diversity_branches() const
{
    return floor_ratio(system_bandwidth_hz, coherence_bandwidth_hz);
}

int ChannelProfile::max_rbs_per_coherence_band() const
{
    return floor_ratio(coherence_bandwidth_hz, rb_bandwidth_hz);
}

std::vector<std::string> ChannelProfile::violations() const
{
    std::vector<std::string> out;
    if (name.empty())
        out.push_back("profile name must not be empty");
    if (!(coherence_bandwidth_hz > 0.0))
        out.push_back("profile coherence_bandwidth_hz must be positive");
    if (!(coherence_time_s > 0.0))
        out.push_back("profile coherence_time_s must be positive");
    if (!(system_bandwidth_hz > 0.0))
        out.push_back("profile system_bandwidth_hz must be positive");
    if (!(rb_bandwidth_hz > 0.0))
        out.push_back("profile rb_bandwidth_hz must be positive");
    if (!(rb_duration_s > 0.0))
        out.push_back("profile rb_duration_s must be positive");
    if (coherence_bandwidth_hz > system_bandwidth_hz)
        out.push_back("profile coherence_bandwidth_hz must not exceed system_bandwidth_hz");
    return out;
}

std::vector<ChannelProfile> builtin_profiles()
{
    return {
        ChannelProfile{"EPA", 4.4e6, 85e-3},
        ChannelProfile{"TDL-C", 0.66e6, 85e-3},
    };
}

std::optional<ChannelProfile> find_builtin_profile(std::string_view name)
{
    for (auto& profile : builtin_profiles())
        if (profile.name == name)
            return profile;
    return std::nullopt;
}

std::string_view to_string(GeometryError::Kind kind)
{
    using Kind = GeometryError::Kind;
    switch (kind)
    {
    case Kind::ofdm_symbols_out_of_range:
        return "ofdm_symbols_out_of_range";
    case Kind::rbs_not_positive:
        return "rbs_not_positive";
    case Kind::rbs_exceed_coherence_band:
        return "rbs_exceed_coherence_band";
    case Kind::branches_not_positive:
        return "branches_not_positive";
    case Kind::branches_exceed_max:
        return "branches_exceed_max";
    case Kind::invalid_profile:
        return "invalid_profile";
    }
    return "unknown";
}

BlockGeometry make_geometry(const ChannelProfile& profile, int ofdm_symbols_per_rb, int rbs_per_coherence_band,
                            int diversity_branches)
{
    using Kind = GeometryError::Kind;
    if (auto problems = profile.violations(); !problems.empty())
        throw GeometryError(Kind::invalid_profile, "invalid channel profile: " + problems.front());

    std::ostringstream msg;
    if (ofdm_symbols_per_rb < 1 || ofdm_symbols_per_rb > 3)
    {
        msg << "OFDM symbols per RB d = " << ofdm_symbols_per_rb << " outside [1, 3]";
        throw GeometryError(Kind::ofdm_symbols_out_of_range, msg.str());
    }
    if (rbs_per_coherence_band < 1)
    {
        msg << "RBs per coherence band r = " << rbs_per_coherence_band << " must be positive";
        throw GeometryError(Kind::rbs_not_positive, msg.str());
    }
    if (rbs_per_coherence_band > profile.max_rbs_per_coherence_band())
    {
        msg << "RBs per coherence band r = " << rbs_per_coherence_band << " exceeds floor(B_c/B_RB) = "
            << profile.max_rbs_per_coherence_band() << " for profile " << profile.name;
        throw GeometryError(Kind::rbs_exceed_coherence_band, msg.str());
    }
    if (diversity_branches < 1)
    {
        msg << "diversity branches L = " << diversity_branches << " must be positive";
        throw GeometryError(Kind::branches_not_positive, msg.str());
    }
    if (diversity_branches > profile.max_diversity_branches())
    {
        msg << "diversity branches L = " << diversity_branches << " exceeds L_max = floor(B/B_c) = "
            << profile.max_diversity_branches() << " for profile " << profile.name;
        throw GeometryError(Kind::branches_exceed_max, msg.str());
    }
    return BlockGeometry{ofdm_symbols_per_rb, rbs_per_coherence_band, diversity_branches};
}

}  // namespace patbound
