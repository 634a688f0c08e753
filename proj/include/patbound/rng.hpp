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
#include <cmath>
#include <complex>
#include <cstdint>

namespace patbound
{

// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
// Output is a pure function of (key, counter), which is what makes every
// Monte Carlo draw addressable by index instead of by generator state.
class Philox4x32
{
public:
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static constexpr Counter generate(Counter ctr, Key key)
    {
        for (int round = 0; round < 10; ++round)
        {
            if (round > 0)
            {
                key[0] += kWeyl0;
                key[1] += kWeyl1;
            }
            const std::uint64_t p0 = std::uint64_t{kMul0} * ctr[0];
            const std::uint64_t p1 = std::uint64_t{kMul1} * ctr[2];
            ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0],
                   static_cast<std::uint32_t>(p1),
                   static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1],
                   static_cast<std::uint32_t>(p0)};
        }
        return ctr;
    }

private:
    static constexpr std::uint32_t kMul0 = 0xD2511F53u;
    static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
    static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
    static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
};

// SplitMix64 finalizer, used to turn structured (tag, index) pairs into
// well-spread stream identifiers.
constexpr std::uint64_t mix64(std::uint64_t z)
{
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag)
{
    return mix64(seed ^ mix64(tag));
}

/*!
 * One independent random stream: key = seed, upper counter half = stream id,
 * lower counter half = position within the stream.
 *
 * Two streams with the same (seed, stream) produce identical sequences no
 * matter which thread owns them or in which order they are consumed.
 */
class RngStream
{
public:
    RngStream(std::uint64_t seed, std::uint64_t stream) noexcept
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)}
        , stream_{stream}
    {
    }

    std::uint64_t next_u64() noexcept
    {
        if (cached_ == 0)
        {
            const Philox4x32::Counter ctr{static_cast<std::uint32_t>(position_),
                                          static_cast<std::uint32_t>(position_ >> 32),
                                          static_cast<std::uint32_t>(stream_),
                                          static_cast<std::uint32_t>(stream_ >> 32)};
            ++position_;
            block_ = Philox4x32::generate(ctr, key_);
            cached_ = 2;
        }
        const int slot = 2 - cached_;
        --cached_;
        return (std::uint64_t{block_[2 * slot + 1]} << 32) | block_[2 * slot];
    }

    //! Uniform on (0, 1] with 53 random bits.
    double uniform() noexcept
    {
        return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    }

    //! Circularly-symmetric complex Gaussian CN(0, variance), Marsaglia polar method.
    std::complex<double> complex_normal(double variance = 1.0) noexcept
    {
        double u, v, r2;
        do
        {
            // One 64-bit word gives both coordinates, 32 bits each, centered on (-1, 1).
            const std::uint64_t word = next_u64();
            u = (static_cast<double>(static_cast<std::uint32_t>(word)) + 0.5) * 0x1.0p-31 - 1.0;
            v = (static_cast<double>(static_cast<std::uint32_t>(word >> 32)) + 0.5) * 0x1.0p-31 - 1.0;
            r2 = u * u + v * v;
        } while (r2 >= 1.0);
        // |z|^2 = -variance * log(r2) is Exp(1/variance); (u, v)/sqrt(r2) is a uniform phase.
        const double scale = std::sqrt(-variance * std::log(r2) / r2);
        return {u * scale, v * scale};
    }

    //! Uniform index in {0, 1, 2, 3}; consumes two bits of a cached word.
    int quaternary() noexcept
    {
        if (bits_left_ == 0)
        {
            bits_ = next_u64();
            bits_left_ = 32;
        }
        const int value = static_cast<int>(bits_ & 3u);
        bits_ >>= 2;
        --bits_left_;
        return value;
    }

    std::uint64_t stream() const noexcept { return stream_; }

private:
    Philox4x32::Key key_;
    std::uint64_t stream_;
    std::uint64_t position_ = 0;
    Philox4x32::Counter block_{};
    int cached_ = 0;
    std::uint64_t bits_ = 0;
    int bits_left_ = 0;
};

}  // namespace patbound
