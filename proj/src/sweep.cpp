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

#include "patbound/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include "patbound/errors.hpp"

namespace patbound
{

std::string_view to_string(Estimator estimator)
{
    switch (estimator)
    {
    case Estimator::mc:
        return "mc";
    case Estimator::saddlepoint:
        return "saddlepoint";
    case Estimator::both:
        return "both";
    }
    return "unknown";
}

std::optional<Estimator> parse_estimator(std::string_view text)
{
    if (text == "mc")
        return Estimator::mc;
    if (text == "saddlepoint" || text == "sp")
        return Estimator::saddlepoint;
    if (text == "both")
        return Estimator::both;
    return std::nullopt;
}

const ErrorProbEstimate& PointEstimate::primary() const
{
    if (sp)
        return *sp;
    if (mc)
        return *mc;
    throw std::logic_error("PointEstimate: no estimate available");
}

namespace
{

MonteCarloOptions with_seed(const MonteCarloOptions& options, std::uint64_t tag)
{
    MonteCarloOptions out = options;
    out.seed = derive_seed(options.seed, tag);
    return out;
}

ErrorProbEstimate run_mc(const BlockFadingConfig& config, Scheme scheme, const EstimatorSettings& settings)
{
    return rcus_mc(config, scheme, settings.mc_samples, with_seed(settings.options, 1));
}

ErrorProbEstimate run_sp(const BlockFadingConfig& config, Scheme scheme, const EstimatorSettings& settings)
{
    return saddlepoint_epsilon(config, scheme, settings.sp_block_samples, with_seed(settings.options, 2)).estimate;
}

double score(const PointEstimate& estimate)
{
    return estimate.primary().value;
}

std::string format_double(double value)
{
    std::ostringstream os;
    os.precision(17);
    os << value;
    return os.str();
}

}  // namespace

PointEstimate evaluate_point(const BlockFadingConfig& config, Scheme scheme, const EstimatorSettings& settings)
{
    PointEstimate out;
    if (settings.estimator != Estimator::saddlepoint)
        out.mc = run_mc(config, scheme, settings);
    if (settings.estimator != Estimator::mc)
        out.sp = run_sp(config, scheme, settings);
    return out;
}

PilotCandidates pilot_candidates(const BlockFadingConfig& config, Scheme scheme, const PilotRange& range)
{
    if (range.step < 1)
        throw std::invalid_argument("pilot range step must be >= 1");
    const int first = range.first > 0 ? range.first : config.tx_antennas;
    const int last = range.last > 0 ? range.last : config.coherence_block_size - 1;

    PilotCandidates out;
    for (int np = first; np <= last; np += range.step)
    {
        if (np < config.tx_antennas || np >= config.coherence_block_size)
            continue;
        if (scheme == Scheme::alamouti && (config.coherence_block_size - np) % 2 != 0)
        {
            out.skipped.push_back(np);
            continue;
        }
        out.admissible.push_back(np);
    }
    return out;
}

std::map<std::string, std::string> describe(const BlockFadingConfig& config, Scheme scheme,
                                            const EstimatorSettings& settings)
{
    return {
        {"scheme", std::string(to_string(scheme))},
        {"tx_antennas", std::to_string(config.tx_antennas)},
        {"rx_antennas", std::to_string(config.rx_antennas)},
        {"coherence_block_size", std::to_string(config.coherence_block_size)},
        {"diversity_branches", std::to_string(config.diversity_branches)},
        {"pilot_count", std::to_string(config.pilot_count)},
        {"snr_db", format_double(linear_to_db(config.snr))},
        {"rate", format_double(config.rate)},
        {"s", format_double(config.rcus_s)},
        {"estimator", std::string(to_string(settings.estimator))},
        {"mc_samples", std::to_string(settings.mc_samples)},
        {"sp_block_samples", std::to_string(settings.sp_block_samples)},
        {"mc_floor", format_double(settings.mc_floor)},
        {"seed", std::to_string(settings.options.seed)},
        {"route", settings.options.route == SamplingRoute::raw ? "raw" : "equivalent"},
        {"version", PATBOUND_VERSION},
    };
}

SweepResult pilot_sweep(const BlockFadingConfig& config_base, Scheme scheme, const PilotRange& range,
                        const EstimatorSettings& settings)
{
    const auto candidates = pilot_candidates(config_base, scheme, range);
    if (candidates.admissible.empty())
        throw std::invalid_argument("pilot_sweep: no admissible pilot count in range");

    SweepResult out;
    out.axis_name = "n_p";
    out.skipped_pilots = candidates.skipped;
    out.metadata = describe(config_base, scheme, settings);
    out.metadata["pilot_range"] = std::to_string(range.first) + ":" + std::to_string(range.step) + ":"
                                  + std::to_string(range.last);

    double best = std::numeric_limits<double>::infinity();
    for (int np : candidates.admissible)
    {
        BlockFadingConfig config = config_base;
        config.pilot_count = np;
        SweepRow row;
        row.axis_value = np;
        row.snr_db = linear_to_db(config.snr);
        row.pilot_count = np;
        row.rate = config.rate;
        row.estimate = evaluate_point(config, scheme, settings);
        if (score(row.estimate) < best)
        {
            best = score(row.estimate);
            out.argmin = np;
        }
        out.rows.push_back(std::move(row));
    }
    return out;
}

PilotOptimum optimize_pilots(const BlockFadingConfig& config, Scheme scheme, const PilotRange& range,
                             const EstimatorSettings& settings, std::optional<int> hint)
{
    const auto grid = pilot_candidates(config, scheme, range).admissible;
    if (grid.empty())
        throw std::invalid_argument("optimize_pilots: no admissible pilot count in range");
    const int size = static_cast<int>(grid.size());

    std::map<int, PointEstimate> memo;
    auto value = [&](int index) {
        auto it = memo.find(index);
        if (it == memo.end())
        {
            BlockFadingConfig trial = config;
            trial.pilot_count = grid[index];
            it = memo.emplace(index, evaluate_point(trial, scheme, settings)).first;
        }
        return score(it->second);
    };

    int best = 0;
    if (hint)
    {
        best = static_cast<int>(std::min_element(grid.begin(), grid.end(),
                                                 [&](int a, int b) { return std::abs(a - *hint) < std::abs(b - *hint); })
                                - grid.begin());
    }
    else
    {
        // Golden-section on the grid index, then exhaustive on the last few points.
        int lo = 0;
        int hi = size - 1;
        while (hi - lo > 3)
        {
            const int offset = static_cast<int>(std::lround(0.381966 * (hi - lo)));
            const int left = lo + std::max(1, offset);
            const int right = std::max(left + 1, hi - std::max(1, offset));
            if (value(left) <= value(right))
                hi = right;
            else
                lo = left;
        }
        best = lo;
        for (int i = lo; i <= hi; ++i)
            if (value(i) < value(best))
                best = i;
    }

    // Local descent guards against a noisy or plateaued bracket.
    for (bool moved = true; moved;)
    {
        moved = false;
        for (int neighbor : {best - 1, best + 1})
        {
            if (neighbor >= 0 && neighbor < size && value(neighbor) < value(best))
            {
                best = neighbor;
                moved = true;
            }
        }
    }

    PilotOptimum out;
    out.pilot_count = grid[best];
    out.estimate = memo.at(best);
    out.evaluations = static_cast<int>(memo.size());
    return out;
}

namespace
{

struct SnrProbe
{
    double snr_db = 0.0;
    int pilot_count = 0;
    PointEstimate estimate;

    double value() const { return estimate.primary().value; }
    double std_error() const { return estimate.primary().std_error; }
};

class SnrEvaluator
{
public:
    SnrEvaluator(const BlockFadingConfig& base, Scheme scheme, const std::optional<PilotRange>& pilots,
                 const EstimatorSettings& settings)
        : base_(base)
        , scheme_(scheme)
        , pilots_(pilots)
        , settings_(settings)
    {
    }

    SnrProbe operator()(double snr_db, std::optional<int> hint = std::nullopt) const
    {
        BlockFadingConfig config = base_;
        config.snr = db_to_linear(snr_db);
        SnrProbe probe;
        probe.snr_db = snr_db;
        if (pilots_)
        {
            const auto optimum = optimize_pilots(config, scheme_, *pilots_, settings_, hint);
            probe.pilot_count = optimum.pilot_count;
            probe.estimate = optimum.estimate;
        }
        else
        {
            probe.pilot_count = config.pilot_count;
            probe.estimate = evaluate_point(config, scheme_, settings_);
        }
        return probe;
    }

    void double_budgets()
    {
        settings_.mc_samples *= 2;
        settings_.sp_block_samples *= 2;
    }

private:
    BlockFadingConfig base_;
    Scheme scheme_;
    std::optional<PilotRange> pilots_;
    EstimatorSettings settings_;
};

double interpolate_crossing(const SnrProbe& lo, const SnrProbe& hi, double target)
{
    const double a = lo.value();
    const double b = hi.value();
    if (!(a > 0.0) || !(b > 0.0) || !(a > b))
        return hi.snr_db;
    const double fraction = (std::log(a) - std::log(target)) / (std::log(a) - std::log(b));
    return lo.snr_db + std::clamp(fraction, 0.0, 1.0) * (hi.snr_db - lo.snr_db);
}

}  // namespace

SnrSearchResult min_snr_for_target(const BlockFadingConfig& config_base, Scheme scheme, double target,
                                   const SnrBracket& bracket, const std::optional<PilotRange>& pilot_range,
                                   const EstimatorSettings& settings, double tolerance_db)
{
    if (!(bracket.low_db < bracket.high_db))
        throw BracketError("min_snr_for_target: bracket low end must be below high end");
    if (!(target > 0.0))
        throw std::invalid_argument("min_snr_for_target: target must be positive");

    SnrEvaluator evaluate(config_base, scheme, pilot_range, settings);
    SnrSearchResult out;

    const SnrProbe low = evaluate(bracket.low_db);
    if (low.value() <= target)
    {
        out.snr_db = out.bracket_low_db = out.bracket_high_db = bracket.low_db;
        out.pilot_count = low.pilot_count;
        out.estimate = low.estimate;
        return out;
    }

    constexpr int kGrid = 5;
    std::vector<SnrProbe> coarse;
    for (int attempt = 0; attempt < 2; ++attempt)
    {
        coarse.clear();
        for (int i = 0; i < kGrid; ++i)
        {
            const double db = bracket.low_db + (bracket.high_db - bracket.low_db) * i / (kGrid - 1);
            coarse.push_back(i == 0 && attempt == 0 ? low : evaluate(db));
        }
        if (coarse.back().value() > target)
        {
            std::ostringstream msg;
            msg << "min_snr_for_target: bracket [" << bracket.low_db << ", " << bracket.high_db
                << "] dB does not straddle target " << target << " (epsilon at upper end = "
                << coarse.back().value() << ")";
            throw BracketError(msg.str());
        }
        bool monotone = true;
        for (int i = 0; i + 1 < kGrid; ++i)
        {
            const double slack = 2.0 * std::max(coarse[i].std_error(), coarse[i + 1].std_error());
            if (coarse[i + 1].value() > coarse[i].value() * (1.0 + 1e-12) + slack)
                monotone = false;
        }
        if (monotone)
            break;
        if (attempt == 0)
            evaluate.double_budgets();
        else
            out.monotonicity_warning = true;
    }
    if (coarse.front().value() <= target)
    {
        out.snr_db = out.bracket_low_db = out.bracket_high_db = bracket.low_db;
        out.pilot_count = coarse.front().pilot_count;
        out.estimate = coarse.front().estimate;
        return out;
    }

    int upper = 1;
    while (coarse[upper].value() > target)
        ++upper;
    SnrProbe lo = coarse[upper - 1];
    SnrProbe hi = coarse[upper];
    while (hi.snr_db - lo.snr_db > tolerance_db)
    {
        const SnrProbe mid = evaluate(0.5 * (lo.snr_db + hi.snr_db), hi.pilot_count);
        (mid.value() <= target ? hi : lo) = mid;
    }

    out.snr_db = interpolate_crossing(lo, hi, target);
    out.bracket_low_db = lo.snr_db;
    out.bracket_high_db = hi.snr_db;
    out.pilot_count = hi.pilot_count;
    out.estimate = hi.estimate;
    return out;
}

SweepResult diversity_envelope(const BlockFadingConfig& config_base, Scheme scheme, const EnvelopeSpec& spec,
                               double target, const SnrBracket& bracket, const EstimatorSettings& settings)
{
    if (spec.branches.empty())
        throw std::invalid_argument("diversity_envelope: no diversity branch values given");

    SweepResult out;
    out.axis_name = "L";
    out.metadata = describe(config_base, scheme, settings);
    out.metadata["target_epsilon"] = format_double(target);
    out.metadata["channel_uses"] = std::to_string(spec.channel_uses);
    out.metadata["payload_bits"] = format_double(spec.payload_bits);
    for (int np : spec.fixed_pilots)
        out.fixed_pilot_curves.push_back({np, {}});

    std::vector<int> branch_grid = spec.branches;
    std::sort(branch_grid.begin(), branch_grid.end());
    branch_grid.erase(std::unique(branch_grid.begin(), branch_grid.end()), branch_grid.end());

    double best = std::numeric_limits<double>::infinity();
    for (int branches : branch_grid)
    {
        BlockFadingConfig config = config_base;
        config.diversity_branches = branches;
        config.coherence_block_size = branches > 0 ? spec.channel_uses / branches : 0;
        config.rate = spec.payload_bits / (static_cast<double>(branches) * config.coherence_block_size);
        config.pilot_count = std::max(config.pilot_count, config.tx_antennas);
        if (config.pilot_count >= config.coherence_block_size)
            config.pilot_count = config.tx_antennas;
        {
            auto problems = config.violations();
            if (!problems.empty())
                throw ConfigError(std::move(problems));
        }

        const auto optimized = min_snr_for_target(config, scheme, target, bracket, spec.pilots, settings);
        SweepRow row;
        row.axis_value = branches;
        row.snr_db = optimized.snr_db;
        row.pilot_count = optimized.pilot_count;
        row.rate = config.rate;
        row.estimate = optimized.estimate;

        for (auto& [np, curve] : out.fixed_pilot_curves)
        {
            BlockFadingConfig fixed = config;
            fixed.pilot_count = np;
            if (np < fixed.tx_antennas || np >= fixed.coherence_block_size
                || !scheme_violations(fixed, scheme).empty())
                continue;
            const auto result = min_snr_for_target(fixed, scheme, target, bracket, std::nullopt, settings);
            SweepRow fixed_row;
            fixed_row.axis_value = branches;
            fixed_row.snr_db = result.snr_db;
            fixed_row.pilot_count = np;
            fixed_row.rate = config.rate;
            fixed_row.estimate = result.estimate;
            if (fixed_row.snr_db < row.snr_db)
                row = fixed_row;
            curve.push_back(std::move(fixed_row));
        }

        if (row.snr_db < best)
        {
            best = row.snr_db;
            out.argmin = branches;
        }
        out.rows.push_back(std::move(row));
    }
    return out;
}

SweepResult snr_curve(const BlockFadingConfig& config_base, Scheme scheme, const std::vector<double>& snr_db,
                      const std::optional<PilotRange>& pilot_range, const EstimatorSettings& settings)
{
    if (snr_db.empty())
        throw std::invalid_argument("snr_curve: empty SNR grid");

    BlockFadingConfig config = config_base;
    SweepResult out;
    out.axis_name = "snr_db";
    if (pilot_range)
    {
        EstimatorSettings search = settings;
        if (search.estimator == Estimator::both)
            search.estimator = Estimator::saddlepoint;
        config.pilot_count = optimize_pilots(config_base, scheme, *pilot_range, search).pilot_count;
    }
    out.metadata = describe(config, scheme, settings);
    out.metadata["pilot_reference_snr_db"] = format_double(linear_to_db(config_base.snr));

    std::vector<double> grid = snr_db;
    std::sort(grid.begin(), grid.end());
    for (double db : grid)
    {
        BlockFadingConfig point = config;
        point.snr = db_to_linear(db);
        SweepRow row;
        row.axis_value = db;
        row.snr_db = db;
        row.pilot_count = point.pilot_count;
        row.rate = point.rate;
        if (settings.estimator == Estimator::both)
        {
            row.estimate.sp = run_sp(point, scheme, settings);
            if (row.estimate.sp->value >= settings.mc_floor)
                row.estimate.mc = run_mc(point, scheme, settings);
        }
        else
        {
            row.estimate = evaluate_point(point, scheme, settings);
        }
        out.rows.push_back(std::move(row));
    }
    return out;
}

}  // namespace patbound
