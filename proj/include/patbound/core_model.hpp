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

#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "patbound/rng.hpp"

namespace patbound
{

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

/*!
 * Block-fading link parameters.
 *
 * Each codeword spans `diversity_branches` coherence blocks of
 * `coherence_block_size` channel uses; the first `pilot_count` uses of every
 * block carry pilots, the rest carry data. Noise has unit variance, so `snr`
 * is the linear SNR per receive antenna and also the per-channel-use
 * transmit power.
 */
struct BlockFadingConfig
{
    int tx_antennas = 1;
    int rx_antennas = 1;
    int coherence_block_size = 72;
    int diversity_branches = 4;
    int pilot_count = 1;
    double snr = 1.0;
    double rate = 30.0 / 288.0;  //!< bits per channel use
    double rcus_s = 1.0;

    int data_count() const noexcept { return coherence_block_size - pilot_count; }
    int blocklength() const noexcept { return diversity_branches * coherence_block_size; }
    //! n * R, the number of information bits.
    double information_bits() const noexcept { return rate * blocklength(); }

    //! Every violated invariant, in a stable order. Empty when valid.
    std::vector<std::string> violations() const;
    //! Throws ConfigError listing all violations.
    void validate() const;
};

double db_to_linear(double db);
double linear_to_db(double linear);

/*!
 * Deterministic pilot matrix with P * P^H = (snr * n_p / M_t) * I.
 *
 * Row m is the m-th row of the n_p-point DFT, scaled to per-entry magnitude
 * sqrt(snr / M_t). For M_t = 1 this is the all-ones row and for
 * (M_t, n_p) = (2, 2) the 2x2 Hadamard matrix.
 */
class PilotMatrix
{
public:
    const CMatrix& entries() const noexcept { return entries_; }
    int tx_antennas() const noexcept { return static_cast<int>(entries_.rows()); }
    int length() const noexcept { return static_cast<int>(entries_.cols()); }
    double snr() const noexcept { return snr_; }

private:
    friend PilotMatrix make_pilot_matrix(int, int, double);
    PilotMatrix(CMatrix entries, double snr) : entries_(std::move(entries)), snr_(snr) {}

    CMatrix entries_;
    double snr_;
};

PilotMatrix make_pilot_matrix(int tx_antennas, int pilot_count, double snr);

//! One realization of the M_r x M_t fading matrix.
struct FadingMatrix
{
    CMatrix entries;
};

struct CoherenceBlockSample
{
    FadingMatrix true_channel;
    CMatrix estimated_channel;  //!< M_r x M_t
    CMatrix data_symbols;       //!< M_t x n_d
    CMatrix received_data;      //!< M_r x n_d
};

//! i.i.d. CN(0, 1) Rayleigh fading.
FadingMatrix sample_fading(int rx_antennas, int tx_antennas, RngStream& rng);

//! Unit-energy QPSK point for alphabet index 0..3: (+-1 +- i)/sqrt(2).
inline Complex qpsk_point(int index) noexcept
{
    constexpr double a = 0.70710678118654752440;
    return {(index & 1) ? -a : a, (index & 2) ? -a : a};
}

//! M_t x n_d matrix of uniform QPSK entries of magnitude sqrt(snr / M_t).
CMatrix sample_qpsk_data(int tx_antennas, int data_count, double snr, RngStream& rng);

//! Maximum-likelihood estimate (M_t / (snr n_p)) Y_p P^H.
CMatrix ml_estimate(const CMatrix& received_pilots, const PilotMatrix& pilots);

/*!
 * Draw one coherence block through the full transmit/receive chain: fading,
 * pilot transmission and ML estimation, then data transmission with AWGN.
 */
CoherenceBlockSample sample_coherence_block(const BlockFadingConfig& config, RngStream& rng);

//! Same chain with caller-provided data symbols (M_t x n_d), e.g. space-time coded.
CoherenceBlockSample sample_coherence_block(const BlockFadingConfig& config,
                                            const CMatrix& data_symbols,
                                            RngStream& rng);

}  // namespace patbound
