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

#include <algorithm>
#include <cmath>

#include "patbound/sweep.hpp"

using namespace patbound;

namespace
{

BlockFadingConfig small_simo(double snr_db)
{
    BlockFadingConfig c;
    c.tx_antennas = 1;
    c.rx_antennas = 2;
    c.coherence_block_size = 24;
    c.diversity_branches = 4;
    c.pilot_count = 4;
    c.snr = db_to_linear(snr_db);
    c.rate = 30.0 / 96.0;
    return c;
}

EstimatorSettings sp_settings(std::int64_t samples = 20000)
{
    EstimatorSettings s;
    s.estimator = Estimator::saddlepoint;
    s.sp_block_samples = samples;
    s.mc_samples = samples;
    s.options.seed = 77;
    return s;
}

}  // namespace

TEST_CASE("estimator names")
{
    for (auto e : {Estimator::mc, Estimator::saddlepoint, Estimator::both})
        CHECK(parse_estimator(to_string(e)) == e);
    CHECK_FALSE(parse_estimator("exact").has_value());
}

TEST_CASE("pilot candidates")
{
    auto c = small_simo(0.0);
    auto all = pilot_candidates(c, Scheme::simo, PilotRange{0, 0, 1});
    CHECK(all.admissible.front() == 1);
    CHECK(all.admissible.back() == 23);
    CHECK(all.admissible.size() == 23);

    c.tx_antennas = 2;
    const auto ala = pilot_candidates(c, Scheme::alamouti, PilotRange{0, 0, 1});
    CHECK(ala.admissible.front() == 2);
    for (int np : ala.admissible)
        CHECK((24 - np) % 2 == 0);
    for (int np : ala.skipped)
        CHECK((24 - np) % 2 == 1);
    CHECK(ala.admissible.size() + ala.skipped.size() == 22);

    CHECK(pilot_candidates(small_simo(0.0), Scheme::simo, PilotRange{3, 11, 4}).admissible == std::vector<int>{3, 7, 11});
    CHECK_THROWS_AS(pilot_candidates(c, Scheme::simo, PilotRange{1, 5, 0}), std::invalid_argument);
}

TEST_CASE("point estimates use common random numbers")
{
    auto s = sp_settings();
    s.estimator = Estimator::both;
    const auto c = small_simo(-2.0);
    const auto a = evaluate_point(c, Scheme::simo, s);
    const auto b = evaluate_point(c, Scheme::simo, s);
    REQUIRE(a.mc);
    REQUIRE(a.sp);
    CHECK(a.mc->value == b.mc->value);
    CHECK(a.sp->value == b.sp->value);
    CHECK(&a.primary() == &*a.sp);
    CHECK(std::abs(std::log10(a.mc->value) - std::log10(a.sp->value)) < 0.1);

    s.estimator = Estimator::mc;
    const auto m = evaluate_point(c, Scheme::simo, s);
    CHECK_FALSE(m.sp.has_value());
    CHECK(&m.primary() == &*m.mc);
}

TEST_CASE("pilot sweep")
{
    const auto c = small_simo(-1.0);
    const auto r = pilot_sweep(c, Scheme::simo, PilotRange{1, 20, 1}, sp_settings());
    REQUIRE(r.rows.size() == 20);
    CHECK(std::is_sorted(r.rows.begin(), r.rows.end(),
                         [](const SweepRow& a, const SweepRow& b) { return a.axis_value < b.axis_value; }));
    const auto best = std::min_element(r.rows.begin(), r.rows.end(), [](const SweepRow& a, const SweepRow& b) {
        return a.estimate.primary().value < b.estimate.primary().value;
    });
    REQUIRE(r.argmin);
    CHECK(*r.argmin == best->axis_value);
    CHECK(r.metadata.at("seed") == "77");
    CHECK(r.metadata.count("version") == 1);

    // Unimodal in practice: at most one sign change of the discrete difference of log epsilon.
    int changes = 0;
    double previous = 0.0;
    for (std::size_t i = 1; i < r.rows.size(); ++i)
    {
        const double d = std::log(r.rows[i].estimate.primary().value) - std::log(r.rows[i - 1].estimate.primary().value);
        if (previous != 0.0 && d * previous < 0)
            ++changes;
        if (d != 0.0)
            previous = d;
    }
    CHECK(changes <= 1);

    // Golden-section optimizer lands on the exhaustive minimum, with or without a hint.
    const auto opt = optimize_pilots(c, Scheme::simo, PilotRange{1, 20, 1}, sp_settings());
    CHECK(opt.pilot_count == *r.argmin);
    CHECK(opt.evaluations < 20);
    for (int hint : {1, 10, 20})
        CHECK(optimize_pilots(c, Scheme::simo, PilotRange{1, 20, 1}, sp_settings(), hint).pilot_count == *r.argmin);

    CHECK_THROWS_AS(pilot_sweep(c, Scheme::simo, PilotRange{30, 40, 1}, sp_settings()), std::invalid_argument);
}

TEST_CASE("alamouti pilot sweep records skipped grid points")
{
    BlockFadingConfig c = small_simo(0.0);
    c.tx_antennas = 2;
    c.pilot_count = 2;
    const auto r = pilot_sweep(c, Scheme::alamouti, PilotRange{2, 9, 1}, sp_settings(5000));
    CHECK(r.rows.size() == 4);
    CHECK(r.skipped_pilots == std::vector<int>{3, 5, 7, 9});
}

TEST_CASE("minimum SNR for a target")
{
    const auto c = small_simo(0.0);
    const SnrBracket bracket{-10.0, 6.0};

    const auto trivial = min_snr_for_target(c, Scheme::simo, 1.0, bracket, std::nullopt, sp_settings());
    CHECK(trivial.snr_db == bracket.low_db);

    CHECK_THROWS_AS(min_snr_for_target(c, Scheme::simo, 1e-12, SnrBracket{-10.0, -8.0}, std::nullopt, sp_settings()),
                    BracketError);
    CHECK_THROWS_AS(min_snr_for_target(c, Scheme::simo, 1e-2, SnrBracket{2.0, 1.0}, std::nullopt, sp_settings()),
                    BracketError);

    SUBCASE("saddlepoint with pilot optimization")
    {
        const auto r = min_snr_for_target(c, Scheme::simo, 1e-3, bracket, PilotRange{1, 20, 1}, sp_settings());
        CHECK(r.bracket_high_db - r.bracket_low_db <= 0.05 + 1e-12);
        CHECK(r.snr_db >= r.bracket_low_db);
        CHECK(r.snr_db <= r.bracket_high_db);
        CHECK(r.estimate.primary().value <= 1e-3);
        CHECK_FALSE(r.monotonicity_warning);
        // The reported pilot count is optimal at the crossing.
        auto at = c;
        at.snr = db_to_linear(r.bracket_high_db);
        CHECK(optimize_pilots(at, Scheme::simo, PilotRange{1, 20, 1}, sp_settings()).pilot_count == r.pilot_count);
    }
    SUBCASE("Monte Carlo crossing survives a fresh-seed re-evaluation")
    {
        auto s = sp_settings(100000);
        s.estimator = Estimator::mc;
        auto fixed = c;
        fixed.pilot_count = 6;
        const double target = 0.05;
        const auto r = min_snr_for_target(fixed, Scheme::simo, target, bracket, std::nullopt, s);
        auto at = fixed;
        at.snr = db_to_linear(r.snr_db);
        auto fresh = s;
        fresh.options.seed = 1234;
        const auto check = evaluate_point(at, Scheme::simo, fresh).mc;
        // Two independent estimates: the crossing carries the error of the first.
        const double se = std::hypot(check->std_error, r.estimate.mc->std_error);
        INFO("snr* " << r.snr_db << " eps " << check->value << " se " << se);
        CHECK(std::abs(check->value - target) <= 2.0 * se);
    }
}

TEST_CASE("diversity envelope")
{
    EnvelopeSpec spec;
    spec.branches = {6, 2, 4};
    spec.channel_uses = 96;
    spec.payload_bits = 30;
    spec.pilots = PilotRange{0, 0, 1};
    spec.fixed_pilots = {2, 6, 30};
    const auto r = diversity_envelope(small_simo(0.0), Scheme::simo, spec, 1e-2, SnrBracket{-10.0, 10.0}, sp_settings(5000));
    REQUIRE(r.rows.size() == 3);
    CHECK(r.rows[0].axis_value == 2);
    CHECK(r.rows[2].axis_value == 6);
    CHECK(r.rows[1].rate == doctest::Approx(30.0 / 96.0));
    REQUIRE(r.fixed_pilot_curves.size() == 3);
    CHECK(r.fixed_pilot_curves[2].second.size() == 1);  // n_p = 30 only fits n_c = 48
    for (const auto& row : r.rows)
        for (const auto& [np, curve] : r.fixed_pilot_curves)
            for (const auto& f : curve)
                if (f.axis_value == row.axis_value)
                    CHECK(row.snr_db <= f.snr_db);
    const auto best = std::min_element(r.rows.begin(), r.rows.end(),
                                       [](const SweepRow& a, const SweepRow& b) { return a.snr_db < b.snr_db; });
    CHECK(*r.argmin == best->axis_value);
}

TEST_CASE("SNR curve")
{
    auto s = sp_settings(5000);
    s.estimator = Estimator::both;
    s.mc_floor = 1e-2;
    const auto c = small_simo(0.0);
    const auto r = snr_curve(c, Scheme::simo, {4.0, -6.0, 0.0, -3.0}, PilotRange{1, 20, 1}, s);
    REQUIRE(r.rows.size() == 4);
    CHECK(r.rows.front().snr_db == -6.0);
    CHECK(r.rows.back().snr_db == 4.0);
    const int np = r.rows.front().pilot_count;
    for (const auto& row : r.rows)
    {
        CHECK(row.pilot_count == np);
        REQUIRE(row.estimate.sp);
        CHECK(row.estimate.mc.has_value() == (row.estimate.sp->value >= s.mc_floor));
    }
    CHECK(np == optimize_pilots(c, Scheme::simo, PilotRange{1, 20, 1}, sp_settings(5000)).pilot_count);
    CHECK_THROWS_AS(snr_curve(c, Scheme::simo, {}, std::nullopt, s), std::invalid_argument);
}
