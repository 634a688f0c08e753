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

#include "patbound/metrics.hpp"

#include <limits>
#include <stdexcept>
#include <vector>

#include "patbound/errors.hpp"

namespace patbound
{

double snn_log_metric(const CMatrix& data_symbols, const CMatrix& received, const CMatrix& estimate)
{
    if (estimate.cols() != data_symbols.rows() || estimate.rows() != received.rows()
        || data_symbols.cols() != received.cols())
        throw std::invalid_argument("snn_log_metric: dimension mismatch");
    return -(received - estimate * data_symbols).squaredNorm();
}

ScalarObservationBlock mrc_reduce(const CMatrix& received, const CVector& estimate)
{
    if (received.rows() != estimate.size())
        throw std::invalid_argument("mrc_reduce: estimate length must equal the number of receive antennas");
    const double amplitude = estimate.norm();
    if (!(amplitude > 0.0))
        throw DegenerateEstimateError("mrc_reduce: channel estimate has zero norm");

    ScalarObservationBlock out;
    out.estimated_amplitude = amplitude;
    out.observations = (estimate.adjoint() * received).transpose() / amplitude;
    return out;
}

CMatrix alamouti_encode(const CVector& x)
{
    const auto n = x.size();
    if (n % 2 != 0)
        throw std::invalid_argument("alamouti_encode: number of data symbols must be even");
    CMatrix out(2, n);
    out.row(0) = x.transpose();
    for (Eigen::Index k = 0; k < n; k += 2)
    {
        out(1, k) = std::conj(x(k + 1));
        out(1, k + 1) = -std::conj(x(k));
    }
    return out;
}

CVector alamouti_effective_symbols(const CVector& x)
{
    if (x.size() % 2 != 0)
        throw std::invalid_argument("alamouti_effective_symbols: number of data symbols must be even");
    CVector out = x;
    for (Eigen::Index k = 1; k < x.size(); k += 2)
        out(k) = std::conj(x(k));
    return out;
}

ScalarObservationBlock alamouti_equivalent_observations(const CMatrix& received, const CMatrix& estimate)
{
    if (received.rows() != 2 || estimate.rows() != 2 || estimate.cols() != 2)
        throw std::invalid_argument("alamouti_equivalent_observations: requires a 2x2 link");
    if (received.cols() % 2 != 0)
        throw std::invalid_argument("alamouti_equivalent_observations: number of data symbols must be even");
    const double amplitude = estimate.norm();
    if (!(amplitude > 0.0))
        throw DegenerateEstimateError("alamouti_equivalent_observations: channel estimate has zero norm");

    ScalarObservationBlock out;
    out.estimated_amplitude = amplitude;
    out.observations.resize(received.cols());
    for (Eigen::Index k = 0; k < received.cols(); k += 2)
    {
        Complex first = 0.0;
        Complex second = 0.0;
        for (Eigen::Index j = 0; j < 2; ++j)
        {
            const Complex g0 = estimate(j, 0);
            const Complex g1 = estimate(j, 1);
            const Complex v0 = received(j, k);
            const Complex v1 = std::conj(received(j, k + 1));
            // V_hat_j = [[g0, g1], [-g1^*, g0^*]]; accumulate V_hat_j^H (v0, v1).
            first += std::conj(g0) * v0 - g1 * v1;
            second += std::conj(g1) * v0 + g0 * v1;
        }
        out.observations(k) = first / amplitude;
        out.observations(k + 1) = second / amplitude;
    }
    return out;
}

InfoDensitySample info_density_scalar(double s,
                                      const CVector& x,
                                      const ScalarObservationBlock& obs,
                                      double symbol_power)
{
    if (x.size() != obs.observations.size())
        throw std::invalid_argument("info_density_scalar: symbol and observation lengths differ");
    if (!(s >= 0.0))
        throw std::invalid_argument("info_density_scalar: s must be nonnegative");

    const double a = obs.estimated_amplitude;
    const double c = std::sqrt(symbol_power);
    std::array<Complex, 4> points;
    for (int i = 0; i < 4; ++i)
        points[i] = a * c * qpsk_point(i);

    double total = 0.0;
    std::array<double, 4> exponents;
    for (Eigen::Index k = 0; k < x.size(); ++k)
    {
        const Complex y = obs.observations(k);
        for (int i = 0; i < 4; ++i)
            exponents[i] = -s * std::norm(y - points[i]);
        total += -s * std::norm(y - a * x(k)) - detail::log_mean_exp4(exponents);
    }
    return {total};
}

InfoDensitySample info_density_mimo(double s,
                                    const CMatrix& data_symbols,
                                    const CMatrix& received,
                                    const CMatrix& estimate,
                                    double snr)
{
    const auto tx = estimate.cols();
    if (tx > 4)
        throw std::invalid_argument("info_density_mimo: more than 4 transmit antennas (4^M_t enumeration)");
    if (data_symbols.rows() != tx || received.rows() != estimate.rows()
        || data_symbols.cols() != received.cols())
        throw std::invalid_argument("info_density_mimo: dimension mismatch");
    if (!(s >= 0.0))
        throw std::invalid_argument("info_density_mimo: s must be nonnegative");

    // Every candidate column H_hat * xbar, enumerated in base 4.
    const double amplitude = std::sqrt(snr / static_cast<double>(tx));
    const int candidates = 1 << (2 * tx);
    CMatrix images(estimate.rows(), candidates);
    CVector xbar(tx);
    for (int c = 0; c < candidates; ++c)
    {
        for (Eigen::Index m = 0; m < tx; ++m)
            xbar(m) = amplitude * qpsk_point((c >> (2 * m)) & 3);
        images.col(c) = estimate * xbar;
    }
    const double log_candidates = std::log(static_cast<double>(candidates));

    std::vector<double> exponents(candidates);
    double total = 0.0;
    for (Eigen::Index k = 0; k < received.cols(); ++k)
    {
        double peak = -std::numeric_limits<double>::infinity();
        for (int c = 0; c < candidates; ++c)
        {
            exponents[c] = -s * (received.col(k) - images.col(c)).squaredNorm();
            peak = std::max(peak, exponents[c]);
        }
        double sum = 0.0;
        for (double e : exponents)
            sum += std::exp(e - peak);
        const double sent = -s * (received.col(k) - estimate * data_symbols.col(k)).squaredNorm();
        total += sent - (peak + std::log(sum) - log_candidates);
    }
    return {total};
}

}  // namespace patbound
