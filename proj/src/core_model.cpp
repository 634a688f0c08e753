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

#include "patbound/core_model.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "patbound/errors.hpp"

namespace patbound
{

namespace
{

template <typename... Args>
std::string format(Args const&... args)
{
    std::ostringstream os;
    (os << ... << args);
    return os.str();
}

}  // namespace

std::vector<std::string> BlockFadingConfig::violations() const
{
    std::vector<std::string> out;
    if (tx_antennas < 1)
        out.push_back(format("tx_antennas must be >= 1 (got ", tx_antennas, ")"));
    if (rx_antennas < 1)
        out.push_back(format("rx_antennas must be >= 1 (got ", rx_antennas, ")"));
    if (coherence_block_size < 2)
        out.push_back(format("coherence_block_size must be >= 2 (got ", coherence_block_size, ")"));
    if (diversity_branches < 1)
        out.push_back(format("diversity_branches must be >= 1 (got ", diversity_branches, ")"));
    if (pilot_count < tx_antennas)
        out.push_back(format("pilot_count must be >= tx_antennas (got pilot_count=", pilot_count,
                             ", tx_antennas=", tx_antennas, ")"));
    if (pilot_count >= coherence_block_size)
        out.push_back(format("pilot_count must be < coherence_block_size (got pilot_count=",
                             pilot_count, ", coherence_block_size=", coherence_block_size, ")"));
    if (!(snr > 0.0) || !std::isfinite(snr))
        out.push_back(format("snr must be positive and finite (got ", snr, ")"));
    if (!(rate > 0.0) || !std::isfinite(rate))
        out.push_back(format("rate must be positive and finite (got ", rate, ")"));
    if (!(rcus_s >= 0.0) || !std::isfinite(rcus_s))
        out.push_back(format("rcus_s must be >= 0 (got ", rcus_s, ")"));
    return out;
}

void BlockFadingConfig::validate() const
{
    auto problems = violations();
    if (!problems.empty())
        throw ConfigError(std::move(problems));
}

double db_to_linear(double db)
{
    return std::pow(10.0, db / 10.0);
}

double linear_to_db(double linear)
{
    return 10.0 * std::log10(linear);
}

PilotMatrix make_pilot_matrix(int tx_antennas, int pilot_count, double snr)
{
    if (tx_antennas < 1)
        throw std::invalid_argument("make_pilot_matrix: tx_antennas must be >= 1");
    if (pilot_count < tx_antennas)
        throw std::invalid_argument(
            format("make_pilot_matrix: pilot_count (", pilot_count,
                   ") is smaller than tx_antennas (", tx_antennas, "); rows cannot be orthogonal"));
    if (!(snr > 0.0))
        throw std::invalid_argument("make_pilot_matrix: snr must be positive");

    const double amplitude = std::sqrt(snr / tx_antennas);
    CMatrix entries(tx_antennas, pilot_count);
    for (int m = 0; m < tx_antennas; ++m)
    {
        for (int t = 0; t < pilot_count; ++t)
        {
            // Reduce the exponent modulo n_p so that the common real cases
            // (phase 0 or pi) come out exactly +-1.
            const long long k = (static_cast<long long>(m) * t) % pilot_count;
            Complex root;
            if (k == 0)
                root = 1.0;
            else if (2 * k == pilot_count)
                root = -1.0;
            else
                root = std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>(k) / pilot_count);
            entries(m, t) = amplitude * root;
        }
    }
    return PilotMatrix(std::move(entries), snr);
}

FadingMatrix sample_fading(int rx_antennas, int tx_antennas, RngStream& rng)
{
    FadingMatrix h{CMatrix(rx_antennas, tx_antennas)};
    for (int c = 0; c < tx_antennas; ++c)
        for (int r = 0; r < rx_antennas; ++r)
            h.entries(r, c) = rng.complex_normal();
    return h;
}

CMatrix sample_qpsk_data(int tx_antennas, int data_count, double snr, RngStream& rng)
{
    if (data_count < 1)
        throw std::invalid_argument("sample_qpsk_data: data_count must be >= 1");
    const double amplitude = std::sqrt(snr / tx_antennas);
    CMatrix x(tx_antennas, data_count);
    for (int k = 0; k < data_count; ++k)
        for (int m = 0; m < tx_antennas; ++m)
            x(m, k) = amplitude * qpsk_point(rng.quaternary());
    return x;
}

CMatrix ml_estimate(const CMatrix& received_pilots, const PilotMatrix& pilots)
{
    if (received_pilots.cols() != pilots.length())
        throw std::invalid_argument("ml_estimate: received pilot length does not match pilot matrix");
    const double scale = pilots.tx_antennas() / (pilots.snr() * pilots.length());
    return scale * received_pilots * pilots.entries().adjoint();
}

namespace
{

void add_unit_noise(CMatrix& signal, RngStream& rng)
{
    for (Eigen::Index c = 0; c < signal.cols(); ++c)
        for (Eigen::Index r = 0; r < signal.rows(); ++r)
            signal(r, c) += rng.complex_normal();
}

// Fading draw plus pilot phase; data symbols are attached by the caller.
CoherenceBlockSample acquire_channel(const BlockFadingConfig& config, RngStream& rng)
{
    config.validate();
    CoherenceBlockSample block;
    block.true_channel = sample_fading(config.rx_antennas, config.tx_antennas, rng);
    const auto pilots = make_pilot_matrix(config.tx_antennas, config.pilot_count, config.snr);
    CMatrix received_pilots = block.true_channel.entries * pilots.entries();
    add_unit_noise(received_pilots, rng);
    block.estimated_channel = ml_estimate(received_pilots, pilots);
    return block;
}

void transmit_data(CoherenceBlockSample& block, CMatrix data_symbols, RngStream& rng)
{
    block.data_symbols = std::move(data_symbols);
    block.received_data = block.true_channel.entries * block.data_symbols;
    add_unit_noise(block.received_data, rng);
}

}  // namespace

CoherenceBlockSample sample_coherence_block(const BlockFadingConfig& config, RngStream& rng)
{
    auto block = acquire_channel(config, rng);
    transmit_data(block, sample_qpsk_data(config.tx_antennas, config.data_count(), config.snr, rng), rng);
    return block;
}

CoherenceBlockSample sample_coherence_block(const BlockFadingConfig& config,
                                            const CMatrix& data_symbols,
                                            RngStream& rng)
{
    if (data_symbols.rows() != config.tx_antennas || data_symbols.cols() != config.data_count())
        throw std::invalid_argument("sample_coherence_block: data symbols must be tx_antennas x data_count");
    auto block = acquire_channel(config, rng);
    transmit_data(block, data_symbols, rng);
    return block;
}

}  // namespace patbound
