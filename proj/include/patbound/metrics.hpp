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

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>

#include "patbound/core_model.hpp"

namespace patbound
{

//! Per-coherence-block generalized information density, in nats.
struct InfoDensitySample
{
    double value = 0.0;
};

/*!
 * Scalar equivalent channel seen by the decoder after spatial combining.
 *
 * The decoder scores candidate x by |y_k - a x_k|^2 with a the estimated
 * amplitude (||h_hat|| for MRC, ||H_hat||_F for Alamouti).
 */
struct ScalarObservationBlock
{
    double estimated_amplitude = 0.0;
    CVector observations;
    //! Known only when the block was built from the true channel (SIMO MRC).
    std::optional<Complex> effective_gain;
};

//! log q = -sum_k ||y_k - H_hat x_k||^2 for the scaled nearest-neighbor metric.
double snn_log_metric(const CMatrix& data_symbols, const CMatrix& received, const CMatrix& estimate);

/*!
 * Maximum-ratio combining with the estimated channel: y'_k = h_hat^H y_k / ||h_hat||.
 *
 * Throws DegenerateEstimateError when ||h_hat|| = 0.
 */
ScalarObservationBlock mrc_reduce(const CMatrix& received, const CVector& estimate);

//! Two-row Alamouti block: row 0 = x, row 1 = (x_2^*, -x_1^*, x_4^*, -x_3^*, ...).
CMatrix alamouti_encode(const CVector& x);

//! The symbols the Alamouti combiner outputs: (x_1, x_2^*, x_3, x_4^*, ...).
CVector alamouti_effective_symbols(const CVector& x);

/*!
 * Alamouti combining of raw 2 x n_d received samples with a 2x2 estimate.
 *
 * For each symbol pair and receive antenna j the vector (y_j[2k-1], y_j[2k]^*)
 * is multiplied by V_hat_j^H, where V_hat_j is the Alamouti channel matrix of
 * antenna j built from H_hat; the two antennas are summed and divided by
 * ||H_hat||_F. Output ordering matches alamouti_effective_symbols().
 */
ScalarObservationBlock alamouti_equivalent_observations(const CMatrix& received, const CMatrix& estimate);

/*!
 * Information density of a scalar block under QPSK inputs of power
 * `symbol_power`:
 *
 *   sum_k [ -s |y_k - a x_k|^2 - log( 1/4 sum_{xbar} exp(-s |y_k - a xbar|^2) ) ].
 *
 * The expectation over xbar is the exact 4-point average.
 */
InfoDensitySample info_density_scalar(double s,
                                      const CVector& x,
                                      const ScalarObservationBlock& obs,
                                      double symbol_power);

/*!
 * Information density for the full SNN metric with i.i.d. QPSK columns of
 * total power `snr`; the expectation enumerates all 4^M_t input vectors.
 * Rejects M_t > 4.
 */
InfoDensitySample info_density_mimo(double s,
                                    const CMatrix& data_symbols,
                                    const CMatrix& received,
                                    const CMatrix& estimate,
                                    double snr);

namespace detail
{

inline double log_mean_exp4(std::array<double, 4> const& v) noexcept
{
    const double m = std::max(std::max(v[0], v[1]), std::max(v[2], v[3]));
    return m + std::log(0.25 * (std::exp(v[0] - m) + std::exp(v[1] - m) + std::exp(v[2] - m)
                                + std::exp(v[3] - m)));
}

/*!
 * Single-symbol density term. `scaled_points[i]` is a * c * qpsk_point(i),
 * `sent` the index of the transmitted point.
 */
inline double qpsk_symbol_density(double s,
                                  Complex y,
                                  std::array<Complex, 4> const& scaled_points,
                                  int sent) noexcept
{
    std::array<double, 4> exponents;
    for (int i = 0; i < 4; ++i)
        exponents[i] = -s * std::norm(y - scaled_points[i]);
    return exponents[sent] - log_mean_exp4(exponents);
}

}  // namespace detail

}  // namespace patbound
