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

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "patbound/core_model.hpp"

namespace patbound
{

//! Transmission scheme evaluated by the estimators.
enum class Scheme
{
    simo,          //!< 1 x M_r with MRC on the estimated channel
    alamouti,      //!< 2 x 2 with the Alamouti inner code
    mimo_generic,  //!< full SNN metric, i.i.d. QPSK per antenna (M_t <= 4)
};

std::string_view to_string(Scheme scheme);
std::optional<Scheme> parse_scheme(std::string_view text);

//! Scheme-specific constraints on top of BlockFadingConfig::violations().
std::vector<std::string> scheme_violations(const BlockFadingConfig& config, Scheme scheme);

/*!
 * How a block's information density is drawn.
 *
 * `raw` runs the whole chain (pilot noise, ML estimate, per-antenna noise,
 * combiner). `equivalent` draws the estimation error H_hat - H ~ CN(0,
 * M_t/(snr n_p)) and the post-combining noise ~ CN(0, 1) directly; both are
 * exact in distribution for SIMO and Alamouti, and the second is several
 * times faster. `mimo_generic` always uses the raw chain.
 */
enum class SamplingRoute
{
    equivalent,
    raw,
};

//! Draws one per-block information density for a fixed configuration.
class BlockDensitySampler
{
public:
    BlockDensitySampler(const BlockFadingConfig& config, Scheme scheme,
                        SamplingRoute route = SamplingRoute::equivalent);

    double draw(RngStream& rng) const;

    const BlockFadingConfig& config() const noexcept { return config_; }
    Scheme scheme() const noexcept { return scheme_; }

private:
    double draw_raw(RngStream& rng) const;
    double draw_simo_equivalent(RngStream& rng) const;
    double draw_alamouti_equivalent(RngStream& rng) const;

    BlockFadingConfig config_;
    Scheme scheme_;
    SamplingRoute route_;
};

struct MonteCarloOptions
{
    std::uint64_t seed = 1;
    int workers = 0;  //!< 0 = hardware concurrency
    SamplingRoute route = SamplingRoute::equivalent;
};

enum class EstimateMethod
{
    rcus_mc,
    saddlepoint,
};

struct ErrorProbEstimate
{
    double value = 1.0;
    double std_error = 0.0;
    EstimateMethod method = EstimateMethod::rcus_mc;
    std::int64_t samples_used = 0;
};

//! log(2^b - 1) for b = nR information bits, stable for large and small b.
double rcus_threshold(double information_bits);

/*!
 * Direct Monte Carlo evaluation of the RCUs bound
 *
 *   E[ exp( -[ sum_l i_s(X_l, Y_l) - log(2^{nR} - 1) ]^+ ) ].
 *
 * Sample j uses blocks j*L .. j*L + L - 1, each on its own stream, so the
 * result is bit-identical for any worker count.
 */
ErrorProbEstimate rcus_mc(const BlockFadingConfig& config, Scheme scheme, std::int64_t num_samples,
                          const MonteCarloOptions& options = {});

//! Frozen per-block information densities, reused across tau.
class DensitySampleSet
{
public:
    explicit DensitySampleSet(std::vector<double> values);

    static DensitySampleSet draw(const BlockFadingConfig& config, Scheme scheme, std::int64_t count,
                                 const MonteCarloOptions& options = {});

    std::span<const double> values() const noexcept { return values_; }
    std::size_t size() const noexcept { return values_.size(); }
    double mean() const noexcept { return mean_; }
    double min() const noexcept { return min_; }
    double max() const noexcept { return max_; }
    //! Every sample has the same value (e.g. s = 0).
    bool degenerate() const noexcept { return min_ == max_; }

private:
    std::vector<double> values_;
    double mean_ = 0.0;
    double min_ = 0.0;
    double max_ = 0.0;
};

/*!
 * E0(tau) = -log E[exp(-tau i_s)] with its first two tau-derivatives,
 * computed from the tilted moments of one sample set:
 * E0' = m1/m0 and E0'' = -(m2/m0 - (m1/m0)^2).
 *
 * Standard errors are delta-method estimates.
 */
struct E0Estimate
{
    double tau = 0.0;
    double e0 = 0.0;
    double e0_prime = 0.0;
    double e0_double_prime = 0.0;
    std::array<double, 3> std_errors{};
    bool degenerate = false;
};

E0Estimate estimate_e0(double tau, const DensitySampleSet& samples);
E0Estimate estimate_e0(double tau, const BlockFadingConfig& config, Scheme scheme,
                       std::int64_t num_block_samples, const MonteCarloOptions& options = {});

enum class TauStatus
{
    interior,
    clamped_low,   //!< objective slope <= 0 already at tau = delta
    clamped_high,  //!< objective slope >= 0 still at tau = 1 - delta
};

struct TauHat
{
    double tau = 0.5;
    TauStatus status = TauStatus::interior;
    bool used_fallback = false;
};

inline constexpr double kTauClamp = 1e-4;

/*!
 * Maximizer over (0, 1) of E0(tau) - tau log(2^{nR} - 1) / L.
 *
 * Bisection on E0'(tau) against the threshold, which is exact on a frozen
 * sample set because E0' is the tilted mean and therefore nonincreasing;
 * golden-section on the objective if a derivative evaluation is not finite.
 */
TauHat find_tau_hat(const BlockFadingConfig& config, const DensitySampleSet& samples);

struct SaddlepointResult
{
    ErrorProbEstimate estimate;
    TauHat tau;
    E0Estimate e0;
    //! Degenerate sample set: estimate is the exact point-mass value.
    bool exact_point_mass = false;
};

/*!
 * Saddlepoint approximation of the RCUs bound,
 *
 *   exp(-L [E0 - tau E0']) { Q(tau sqrt(-L E0'')) exp(-(L/2) E0'' tau^2)
 *                          + Q((1 - tau) sqrt(-L E0'')) exp(-(L/2) E0'' (1 - tau)^2) },
 *
 * at tau = tau_hat. Each Q(z) exp(z^2/2) pair is evaluated as
 * erfcx(z/sqrt(2))/2. Throws EstimatorError when E0'' >= 0 on a
 * non-degenerate sample set.
 */
SaddlepointResult saddlepoint_epsilon(const BlockFadingConfig& config, const DensitySampleSet& samples);
SaddlepointResult saddlepoint_epsilon(const BlockFadingConfig& config, Scheme scheme,
                                      std::int64_t num_block_samples, const MonteCarloOptions& options = {});

//! Saddlepoint value at a fixed tau from an independent sample set.
ErrorProbEstimate saddlepoint_at_tau(const BlockFadingConfig& config, const DensitySampleSet& samples, double tau);

//! Scaled complementary error function exp(x^2) erfc(x) for x >= 0.
double erfcx(double x);

}  // namespace patbound
