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

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "patbound/bounds.hpp"

namespace patbound
{

enum class Estimator
{
    mc,
    saddlepoint,
    both,
};

std::string_view to_string(Estimator estimator);
std::optional<Estimator> parse_estimator(std::string_view text);

struct EstimatorSettings
{
    Estimator estimator = Estimator::saddlepoint;
    std::int64_t mc_samples = 1'000'000;
    std::int64_t sp_block_samples = 1'000'000;
    //! With Estimator::both, Monte Carlo runs only where the saddlepoint value is at least this.
    double mc_floor = 1e-3;
    MonteCarloOptions options;
};

//! Monte Carlo and/or saddlepoint value at one operating point.
struct PointEstimate
{
    std::optional<ErrorProbEstimate> mc;
    std::optional<ErrorProbEstimate> sp;

    //! Saddlepoint when available, else Monte Carlo.
    const ErrorProbEstimate& primary() const;
};

/*!
 * Evaluate the configured estimators. Monte Carlo draws from
 * derive_seed(seed, 1), the saddlepoint from derive_seed(seed, 2); both use
 * the same streams at every operating point (common random numbers).
 */
PointEstimate evaluate_point(const BlockFadingConfig& config, Scheme scheme, const EstimatorSettings& settings);

//! Pilot grid; first <= 0 means M_t, last <= 0 means n_c - 1.
struct PilotRange
{
    int first = 0;
    int last = 0;
    int step = 2;
};

//! Admissible pilot counts of `range` for `config`/`scheme`, and those skipped.
struct PilotCandidates
{
    std::vector<int> admissible;
    std::vector<int> skipped;  //!< odd n_d under Alamouti
};

PilotCandidates pilot_candidates(const BlockFadingConfig& config, Scheme scheme, const PilotRange& range);

struct SweepRow
{
    double axis_value = 0.0;
    double snr_db = 0.0;
    int pilot_count = 0;
    double rate = 0.0;
    PointEstimate estimate;
};

struct SweepResult
{
    std::string axis_name;
    std::vector<SweepRow> rows;
    //! Axis value minimizing the primary estimate (pilot sweep) or the SNR (envelope).
    std::optional<double> argmin;
    std::vector<int> skipped_pilots;
    //! Envelope only: per fixed pilot count, rows over the same axis.
    std::vector<std::pair<int, std::vector<SweepRow>>> fixed_pilot_curves;
    std::map<std::string, std::string> metadata;
};

/*!
 * One estimate per admissible n_p. Alamouti grid points with odd n_d are
 * skipped and listed in `skipped_pilots`. Throws std::invalid_argument when
 * nothing is admissible.
 */
SweepResult pilot_sweep(const BlockFadingConfig& config_base, Scheme scheme, const PilotRange& range,
                        const EstimatorSettings& settings);

struct PilotOptimum
{
    int pilot_count = 0;
    PointEstimate estimate;
    int evaluations = 0;
};

/*!
 * Minimize the primary estimate over the admissible pilot grid. Without a
 * hint: golden-section search on the grid index followed by a local check;
 * with a hint: hill-climb from the nearest admissible grid point.
 */
PilotOptimum optimize_pilots(const BlockFadingConfig& config, Scheme scheme, const PilotRange& range,
                             const EstimatorSettings& settings, std::optional<int> hint = std::nullopt);

class BracketError : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

struct SnrBracket
{
    double low_db = -15.0;
    double high_db = 10.0;
};

struct SnrSearchResult
{
    //! Crossing point, interpolated in log(epsilon) inside the final bracket.
    double snr_db = 0.0;
    double bracket_low_db = 0.0;
    double bracket_high_db = 0.0;
    int pilot_count = 0;
    //! Estimate at bracket_high_db, which meets the target.
    PointEstimate estimate;
    bool monotonicity_warning = false;
};

/*!
 * Smallest SNR whose estimate meets `target`, by bisection to `tolerance_db`.
 * A 5-point coarse grid first checks that epsilon(snr) is nonincreasing
 * (within 2 Monte Carlo standard errors); on violation the budgets are
 * doubled once. With `pilot_range` set, every evaluation uses the optimal
 * pilot count on that grid; otherwise config_base.pilot_count is used.
 *
 * Returns the lower bracket end when it already meets the target; throws
 * BracketError when the upper end does not.
 */
SnrSearchResult min_snr_for_target(const BlockFadingConfig& config_base, Scheme scheme, double target,
                                   const SnrBracket& bracket, const std::optional<PilotRange>& pilot_range,
                                   const EstimatorSettings& settings, double tolerance_db = 0.05);

struct EnvelopeSpec
{
    std::vector<int> branches;
    int channel_uses = 288;     //!< n_c = floor(channel_uses / L)
    double payload_bits = 30;   //!< R = k / (L n_c)
    PilotRange pilots;
    std::vector<int> fixed_pilots;  //!< optional fixed-n_p companion curves
};

/*!
 * Minimum SNR meeting `target` versus the number of diversity branches, with
 * optimized pilots. The envelope row is the pointwise minimum over the
 * optimized search and every fixed-pilot curve.
 */
SweepResult diversity_envelope(const BlockFadingConfig& config_base, Scheme scheme, const EnvelopeSpec& spec,
                               double target, const SnrBracket& bracket, const EstimatorSettings& settings);

/*!
 * Estimates over an SNR grid. With `pilot_range` set, the pilot count is
 * optimized once at config_base.snr and then held fixed along the curve.
 */
SweepResult snr_curve(const BlockFadingConfig& config_base, Scheme scheme, const std::vector<double>& snr_db,
                      const std::optional<PilotRange>& pilot_range, const EstimatorSettings& settings);

//! Config snapshot, seed and budgets as key/value pairs.
std::map<std::string, std::string> describe(const BlockFadingConfig& config, Scheme scheme,
                                            const EstimatorSettings& settings);

}  // namespace patbound
