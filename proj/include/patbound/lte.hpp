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

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace patbound
{

//! Tapped-delay-line channel abstracted to 50% coherence bandwidth/time.
struct ChannelProfile
{
    std::string name;
    double coherence_bandwidth_hz = 0.0;
    double coherence_time_s = 0.0;
    double system_bandwidth_hz = 20e6;
    double rb_bandwidth_hz = 180e3;
    double rb_duration_s = 0.5e-3;

    //! floor(B / B_c): independent frequency blocks in the system band.
    int max_diversity_branches() const;
    //! floor(B_c / B_RB): resource blocks that fit in one coherence band.
    int max_rbs_per_coherence_band() const;
    //! True when a resource block outlasts the coherence time.
    bool has_time_diversity() const { return coherence_time_s < rb_duration_s; }

    std::vector<std::string> violations() const;
};

//! "EPA 5 Hz" and "TDL-C 300 ns - 3 km/h".
std::vector<ChannelProfile> builtin_profiles();
std::optional<ChannelProfile> find_builtin_profile(std::string_view name);

/*!
 * Placement of a codeword on the LTE grid: L frequency-separated groups of r
 * adjacent resource blocks, each using d OFDM symbols of 12 subcarriers.
 */
struct BlockGeometry
{
    int ofdm_symbols_per_rb = 1;
    int rbs_per_coherence_band = 1;
    int diversity_branches = 1;

    int coherence_block_size() const { return 12 * ofdm_symbols_per_rb * rbs_per_coherence_band; }
    int blocklength() const { return diversity_branches * coherence_block_size(); }
};

class GeometryError : public std::invalid_argument
{
public:
    enum class Kind
    {
        ofdm_symbols_out_of_range,
        rbs_not_positive,
        rbs_exceed_coherence_band,
        branches_not_positive,
        branches_exceed_max,
        invalid_profile,
    };

    GeometryError(Kind kind, const std::string& message)
        : std::invalid_argument(message)
        , kind_(kind)
    {
    }

    Kind kind() const noexcept { return kind_; }

private:
    Kind kind_;
};

std::string_view to_string(GeometryError::Kind kind);

//! Throws GeometryError naming the first violated constraint.
BlockGeometry make_geometry(const ChannelProfile& profile, int ofdm_symbols_per_rb, int rbs_per_coherence_band,
                            int diversity_branches);

}  // namespace patbound
