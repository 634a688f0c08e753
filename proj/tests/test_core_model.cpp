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

#include <doctest.h>

#include <array>
#include <cmath>
#include <complex>

#include "patbound/core_model.hpp"
#include "patbound/errors.hpp"
#include "patbound/rng.hpp"

using namespace patbound;

namespace
{

BlockFadingConfig link(int mt, int mr, int nc, int np, double snr)
{
    BlockFadingConfig c;
    c.tx_antennas = mt;
    c.rx_antennas = mr;
    c.coherence_block_size = nc;
    c.pilot_count = np;
    c.snr = snr;
    return c;
}

bool contains(const std::vector<std::string>& items, const std::string& needle)
{
    for (const auto& item : items)
        if (item.find(needle) != std::string::npos)
            return true;
    return false;
}

}  // namespace

TEST_CASE("philox known-answer vectors")
{
    using P = Philox4x32;
    CHECK(P::generate({0, 0, 0, 0}, {0, 0}) == P::Counter{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
    CHECK(P::generate({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu})
          == P::Counter{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
    CHECK(P::generate({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u})
          == P::Counter{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("rng streams are addressable and distinct")
{
    RngStream a(7, 3), b(7, 3), c(7, 4), d(8, 3);
    bool differ_stream = false, differ_seed = false;
    for (int i = 0; i < 16; ++i)
    {
        const auto x = a.next_u64();
        CHECK(x == b.next_u64());
        differ_stream |= x != c.next_u64();
        differ_seed |= x != d.next_u64();
    }
    CHECK(differ_stream);
    CHECK(differ_seed);

    RngStream u(1, 0);
    for (int i = 0; i < 10000; ++i)
    {
        const double v = u.uniform();
        REQUIRE(v > 0.0);
        REQUIRE(v <= 1.0);
    }
}

TEST_CASE("config validation lists every violation")
{
    auto c = link(2, 1, 72, 1, 0.0);
    c.rate = -1.0;
    c.rcus_s = -0.5;
    const auto v = c.violations();
    CHECK(v.size() == 4);
    CHECK(contains(v, "pilot_count must be >= tx_antennas"));
    CHECK(contains(v, "snr"));
    CHECK(contains(v, "rate"));
    CHECK(contains(v, "s "));
    try
    {
        c.validate();
        FAIL("validate() accepted an invalid config");
    }
    catch (const ConfigError& e)
    {
        CHECK(e.violations() == v);
    }

    CHECK(contains(link(1, 1, 72, 72, 1.0).violations(), "pilot_count must be < coherence_block_size"));
    CHECK(link(1, 4, 72, 28, 1.0).violations().empty());
    const auto c2 = link(1, 4, 72, 28, 1.0);
    CHECK(c2.blocklength() == 288);
    CHECK(c2.data_count() == 44);
}

TEST_CASE("dB conversion")
{
    CHECK(db_to_linear(0.0) == 1.0);
    CHECK(db_to_linear(10.0) == doctest::Approx(10.0).epsilon(1e-15));
    CHECK(db_to_linear(-4.0) == doctest::Approx(std::pow(10.0, -0.4)).epsilon(1e-15));
    CHECK(linear_to_db(db_to_linear(-7.25)) == doctest::Approx(-7.25).epsilon(1e-14));
}

TEST_CASE("pilot matrix Gram identity")
{
    for (int mt = 1; mt <= 4; ++mt)
        for (int np = mt; np <= 40; ++np)
            for (double snr : {1e-3, 0.398, 1.0, 2.0, 1e4})
            {
                const auto p = make_pilot_matrix(mt, np, snr);
                REQUIRE(p.tx_antennas() == mt);
                REQUIRE(p.length() == np);
                const CMatrix gram = p.entries() * p.entries().adjoint();
                const double scale = snr * np / mt;
                const double err = (gram - scale * CMatrix::Identity(mt, mt)).cwiseAbs().maxCoeff() / scale;
                CHECK(err < 1e-12);
                // Equal per-entry power snr / M_t.
                CHECK(p.entries().cwiseAbs2().maxCoeff() == doctest::Approx(snr / mt).epsilon(1e-12));
            }
}

TEST_CASE("pilot matrix closed forms")
{
    const auto ones = make_pilot_matrix(1, 4, 1.0);
    for (int k = 0; k < 4; ++k)
        CHECK(ones.entries()(0, k) == Complex(1.0, 0.0));
    CHECK((ones.entries() * ones.entries().adjoint())(0, 0).real() == 4.0);

    const auto h = make_pilot_matrix(2, 2, 2.0);
    CHECK(h.entries()(0, 0) == Complex(1.0, 0.0));
    CHECK(h.entries()(0, 1) == Complex(1.0, 0.0));
    CHECK(h.entries()(1, 0) == Complex(1.0, 0.0));
    CHECK(h.entries()(1, 1) == Complex(-1.0, 0.0));

    CHECK_THROWS_AS(make_pilot_matrix(2, 1, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(make_pilot_matrix(1, 4, 0.0), std::invalid_argument);

    // Deterministic.
    CHECK(make_pilot_matrix(3, 7, 0.5).entries() == make_pilot_matrix(3, 7, 0.5).entries());
}

TEST_CASE("fading moments")
{
    RngStream rng(11, 0);
    constexpr int n = 100000;
    std::array<double, 4> power{};
    Complex corr01 = 0.0, corr02 = 0.0, pseudo = 0.0, mean = 0.0;
    for (int i = 0; i < n; ++i)
    {
        const auto h = sample_fading(2, 2, rng).entries;
        for (int k = 0; k < 4; ++k)
            power[k] += std::norm(h(k % 2, k / 2));
        corr01 += h(0, 0) * std::conj(h(0, 1));
        corr02 += h(0, 0) * std::conj(h(1, 0));
        pseudo += h(0, 0) * h(0, 0);
        mean += h(1, 1);
    }
    for (double p : power)
        CHECK(p / n == doctest::Approx(1.0).epsilon(0.02));
    CHECK(std::abs(corr01 / double(n)) < 0.02);
    CHECK(std::abs(corr02 / double(n)) < 0.02);
    CHECK(std::abs(pseudo / double(n)) < 0.02);
    CHECK(std::abs(mean / double(n)) < 0.02);

    RngStream a(5, 9), b(5, 9);
    CHECK(sample_fading(4, 2, a).entries == sample_fading(4, 2, b).entries);
}

TEST_CASE("QPSK data")
{
    RngStream rng(3, 1);
    const auto one = sample_qpsk_data(1, 1, 2.0, rng);
    CHECK(std::abs(std::abs(one(0, 0).real()) - 1.0) < 1e-15);
    CHECK(std::abs(std::abs(one(0, 0).imag()) - 1.0) < 1e-15);

    constexpr int n = 100000;
    const auto x = sample_qpsk_data(1, n, 1.0, rng);
    std::array<int, 4> counts{};
    for (int k = 0; k < n; ++k)
        ++counts[(x(0, k).real() < 0 ? 1 : 0) + (x(0, k).imag() < 0 ? 2 : 0)];
    for (int c : counts)
        CHECK(double(c) / n == doctest::Approx(0.25).epsilon(0.04));

    const auto m = sample_qpsk_data(3, 50, 0.7, rng);
    for (int k = 0; k < 50; ++k)
        CHECK(m.col(k).squaredNorm() == doctest::Approx(0.7).epsilon(1e-14));

    CHECK_THROWS_AS(sample_qpsk_data(1, 0, 1.0, rng), std::invalid_argument);
}

TEST_CASE("ML estimate")
{
    RngStream rng(21, 0);
    SUBCASE("noiseless pilots recover the channel")
    {
        for (int mt = 1; mt <= 3; ++mt)
        {
            const auto p = make_pilot_matrix(mt, mt + 4, 0.8);
            const CMatrix h = sample_fading(3, mt, rng).entries;
            const CMatrix est = ml_estimate(h * p.entries(), p);
            CHECK((est - h).cwiseAbs().maxCoeff() < 1e-12);
        }
    }
    SUBCASE("SISO averaging")
    {
        const auto p = make_pilot_matrix(1, 2, 1.0);
        const Complex h(0.3, -1.1), w1(0.25, 0.5), w2(-0.75, 0.125);
        CMatrix y(1, 2);
        y << h + w1, h + w2;
        CHECK(std::abs(ml_estimate(y, p)(0, 0) - (h + (w1 + w2) / 2.0)) < 1e-15);
    }
    SUBCASE("dimension mismatch")
    {
        const auto p = make_pilot_matrix(2, 4, 1.0);
        CHECK_THROWS_AS(ml_estimate(CMatrix::Zero(2, 3), p), std::invalid_argument);
    }
}

TEST_CASE("estimation error is white with variance M_t/(snr n_p)")
{
    const auto cfg = link(2, 2, 24, 3, 2.0);
    const double expected = 2.0 / (2.0 * 3);
    RngStream rng(99, 0);
    constexpr int n = 100000;
    std::array<double, 4> var{};
    Complex cross = 0.0;
    for (int i = 0; i < n; ++i)
    {
        const auto s = sample_coherence_block(cfg, rng);
        const CMatrix e = s.estimated_channel - s.true_channel.entries;
        for (int k = 0; k < 4; ++k)
            var[k] += std::norm(e(k % 2, k / 2));
        cross += e(0, 0) * std::conj(e(0, 1));
    }
    for (double v : var)
        CHECK(v / n == doctest::Approx(expected).epsilon(0.03));
    // Uncorrelated across transmit antennas: 3 sigma of the sample mean of a product of independent CN(0, v).
    CHECK(std::abs(cross / double(n)) < 3.0 * expected / std::sqrt(double(n)));
}

TEST_CASE("coherence block sample")
{
    const auto cfg = link(2, 3, 20, 4, 1.5);
    RngStream rng(4, 4);
    const auto s = sample_coherence_block(cfg, rng);
    CHECK(s.data_symbols.rows() == 2);
    CHECK(s.data_symbols.cols() == 16);
    CHECK(s.received_data.rows() == 3);
    CHECK(s.estimated_channel.rows() == 3);

    // Per-use power constraint over the whole block.
    const auto p = make_pilot_matrix(2, 4, 1.5);
    CHECK(p.entries().squaredNorm() + s.data_symbols.squaredNorm()
          == doctest::Approx(cfg.coherence_block_size * cfg.snr).epsilon(1e-13));

    RngStream again(4, 4);
    const auto t = sample_coherence_block(cfg, again);
    CHECK(t.received_data == s.received_data);
    CHECK(t.estimated_channel == s.estimated_channel);

    SUBCASE("high SNR estimate is accurate")
    {
        const auto hi = link(2, 2, 10, 2, 1e6);
        for (int i = 0; i < 100; ++i)
        {
            const auto b = sample_coherence_block(hi, rng);
            CHECK((b.estimated_channel - b.true_channel.entries).norm() / b.true_channel.entries.norm() < 1e-2);
        }
    }
    SUBCASE("data noise has unit variance")
    {
        const auto c = link(1, 2, 4, 1, 0.5);
        double acc = 0.0;
        constexpr int n = 100000;
        for (int i = 0; i < n; ++i)
        {
            const auto b = sample_coherence_block(c, rng);
            acc += (b.received_data - b.true_channel.entries * b.data_symbols).cwiseAbs2().sum();
        }
        CHECK(acc / (n * 2.0 * 3.0) == doctest::Approx(1.0).epsilon(0.01));
    }
    SUBCASE("caller data")
    {
        const auto c = link(2, 2, 6, 2, 1.0);
        CHECK_THROWS_AS(sample_coherence_block(c, CMatrix::Zero(2, 3), rng), std::invalid_argument);
        const CMatrix x = CMatrix::Ones(2, 4);
        CHECK(sample_coherence_block(c, x, rng).data_symbols == x);
    }
}
