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

#include "patbound/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "parallel.hpp"
#include "patbound/errors.hpp"
#include "patbound/metrics.hpp"

namespace patbound
{

namespace
{

constexpr std::int64_t kChunkSize = 4096;

std::int64_t chunk_count(std::int64_t n)
{
    return (n + kChunkSize - 1) / kChunkSize;
}

}  // namespace

std::string_view to_string(Scheme scheme)
{
    switch (scheme)
    {
    case Scheme::simo:
        return "simo";
    case Scheme::alamouti:
        return "alamouti";
    case Scheme::mimo_generic:
        return "mimo_generic";
    }
    return "unknown";
}

std::optional<Scheme> parse_scheme(std::string_view text)
{
    if (text == "simo" || text == "simo_1xN")
        return Scheme::simo;
    if (text == "alamouti" || text == "alamouti_2x2")
        return Scheme::alamouti;
    if (text == "mimo_generic" || text == "mimo")
        return Scheme::mimo_generic;
    return std::nullopt;
}

std::vector<std::string> scheme_violations(const BlockFadingConfig& config, Scheme scheme)
{
    std::vector<std::string> out;
    switch (scheme)
    {
    case Scheme::simo:
        if (config.tx_antennas != 1)
            out.push_back("scheme simo requires tx_antennas = 1");
        break;
    case Scheme::alamouti:
        if (config.tx_antennas != 2 || config.rx_antennas != 2)
            out.push_back("scheme alamouti requires tx_antennas = 2 and rx_antennas = 2");
        if (config.data_count() % 2 != 0)
        {
            std::ostringstream os;
            os << "scheme alamouti requires an even number of data symbols (got "
               << config.data_count() << ")";
            out.push_back(os.str());
        }
        break;
    case Scheme::mimo_generic:
        if (config.tx_antennas > 4)
            out.push_back("scheme mimo_generic supports at most 4 transmit antennas");
        break;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Block density sampling
// ---------------------------------------------------------------------------

BlockDensitySampler::BlockDensitySampler(const BlockFadingConfig& config, Scheme scheme, SamplingRoute route)
    : config_(config)
    , scheme_(scheme)
    , route_(route)
{
    auto problems = config.violations();
    auto scheme_problems = scheme_violations(config, scheme);
    problems.insert(problems.end(), scheme_problems.begin(), scheme_problems.end());
    if (!problems.empty())
        throw ConfigError(std::move(problems));
}

double BlockDensitySampler::draw(RngStream& rng) const
{
    if (route_ == SamplingRoute::raw || scheme_ == Scheme::mimo_generic)
        return draw_raw(rng);
    if (scheme_ == Scheme::simo)
        return draw_simo_equivalent(rng);
    return draw_alamouti_equivalent(rng);
}

double BlockDensitySampler::draw_raw(RngStream& rng) const
{
    const double s = config_.rcus_s;
    switch (scheme_)
    {
    case Scheme::simo: {
        const auto block = sample_coherence_block(config_, rng);
        const auto obs = mrc_reduce(block.received_data, block.estimated_channel.col(0));
        return info_density_scalar(s, block.data_symbols.row(0).transpose(), obs, config_.snr).value;
    }
    case Scheme::alamouti: {
        const double symbol_power = config_.snr / 2.0;
        const CVector x = sample_qpsk_data(1, config_.data_count(), symbol_power, rng).row(0).transpose();
        const auto block = sample_coherence_block(config_, alamouti_encode(x), rng);
        const auto obs = alamouti_equivalent_observations(block.received_data, block.estimated_channel);
        return info_density_scalar(s, alamouti_effective_symbols(x), obs, symbol_power).value;
    }
    case Scheme::mimo_generic: {
        const auto block = sample_coherence_block(config_, rng);
        return info_density_mimo(s, block.data_symbols, block.received_data, block.estimated_channel,
                                 config_.snr)
            .value;
    }
    }
    return 0.0;
}

// h ~ CN(0, I), h_hat = h + e with e ~ CN(0, I/(snr n_p)); after MRC on h_hat
// the block is y_k = (h_hat^H h / ||h_hat||) x_k + w_k with w_k ~ CN(0, 1)
// independent of (h, h_hat).
double BlockDensitySampler::draw_simo_equivalent(RngStream& rng) const
{
    const double error_variance = 1.0 / (config_.snr * config_.pilot_count);
    double amplitude_sq = 0.0;
    Complex projection = 0.0;
    for (int r = 0; r < config_.rx_antennas; ++r)
    {
        const Complex h = rng.complex_normal();
        const Complex h_hat = h + rng.complex_normal(error_variance);
        amplitude_sq += std::norm(h_hat);
        projection += std::conj(h_hat) * h;
    }
    const double amplitude = std::sqrt(amplitude_sq);
    if (!(amplitude > 0.0))
        throw DegenerateEstimateError("simo block: channel estimate has zero norm");
    const double c = std::sqrt(config_.snr);
    const Complex gain = projection / amplitude * c;

    std::array<Complex, 4> points;
    std::array<Complex, 4> images;
    for (int i = 0; i < 4; ++i)
    {
        points[i] = amplitude * c * qpsk_point(i);
        images[i] = gain * qpsk_point(i);
    }

    const double s = config_.rcus_s;
    double total = 0.0;
    for (int k = 0; k < config_.data_count(); ++k)
    {
        const int sent = rng.quaternary();
        const Complex y = images[sent] + rng.complex_normal();
        total += detail::qpsk_symbol_density(s, y, points, sent);
    }
    return total;
}

// Alamouti combiner output per symbol pair: y = G x_tilde + w with
// G = (1/||H_hat||_F) sum_j V_hat_j^H V_j and w ~ CN(0, I_2), since
// sum_j V_hat_j^H V_hat_j = ||H_hat||_F^2 I makes the combined noise white.
double BlockDensitySampler::draw_alamouti_equivalent(RngStream& rng) const
{
    const double error_variance = 2.0 / (config_.snr * config_.pilot_count);
    Complex h[2][2];
    Complex g[2][2];
    for (int t = 0; t < 2; ++t)
        for (int r = 0; r < 2; ++r)
            h[r][t] = rng.complex_normal();
    double amplitude_sq = 0.0;
    for (int t = 0; t < 2; ++t)
        for (int r = 0; r < 2; ++r)
        {
            g[r][t] = h[r][t] + rng.complex_normal(error_variance);
            amplitude_sq += std::norm(g[r][t]);
        }
    const double amplitude = std::sqrt(amplitude_sq);
    if (!(amplitude > 0.0))
        throw DegenerateEstimateError("alamouti block: channel estimate has zero norm");

    Complex m00 = 0.0, m01 = 0.0, m10 = 0.0, m11 = 0.0;
    for (int j = 0; j < 2; ++j)
    {
        const Complex h0 = h[j][0], h1 = h[j][1];
        const Complex g0 = g[j][0], g1 = g[j][1];
        m00 += std::conj(g0) * h0 + g1 * std::conj(h1);
        m01 += std::conj(g0) * h1 - g1 * std::conj(h0);
        m10 += std::conj(g1) * h0 - g0 * std::conj(h1);
        m11 += std::conj(g1) * h1 + g0 * std::conj(h0);
    }
    const double c = std::sqrt(config_.snr / 2.0);
    const double scale = c / amplitude;
    m00 *= scale;
    m01 *= scale;
    m10 *= scale;
    m11 *= scale;

    std::array<Complex, 4> points;
    for (int i = 0; i < 4; ++i)
        points[i] = amplitude * c * qpsk_point(i);

    const double s = config_.rcus_s;
    double total = 0.0;
    for (int k = 0; k < config_.data_count(); k += 2)
    {
        const int first = rng.quaternary();
        // Conjugating a QPSK point flips the sign of its imaginary part.
        const int second = rng.quaternary() ^ 2;
        const Complex u0 = qpsk_point(first);
        const Complex u1 = qpsk_point(second);
        const Complex y0 = m00 * u0 + m01 * u1 + rng.complex_normal();
        const Complex y1 = m10 * u0 + m11 * u1 + rng.complex_normal();
        total += detail::qpsk_symbol_density(s, y0, points, first);
        total += detail::qpsk_symbol_density(s, y1, points, second);
    }
    return total;
}

// ---------------------------------------------------------------------------
// RCUs Monte Carlo
// ---------------------------------------------------------------------------

double rcus_threshold(double information_bits)
{
    if (!(information_bits > 0.0))
        throw std::invalid_argument("rcus_threshold: number of information bits must be positive");
    const double x = information_bits * std::numbers::ln2;
    if (x > 30.0)
        return x + std::log1p(-std::exp(-x));
    return std::log(std::expm1(x));
}

ErrorProbEstimate rcus_mc(const BlockFadingConfig& config, Scheme scheme, std::int64_t num_samples,
                          const MonteCarloOptions& options)
{
    if (num_samples < 1)
        throw std::invalid_argument("rcus_mc: num_samples must be >= 1");
    const BlockDensitySampler sampler(config, scheme, options.route);
    const double threshold = rcus_threshold(config.information_bits());
    const int branches = config.diversity_branches;

    const std::int64_t chunks = chunk_count(num_samples);
    std::vector<detail::MomentAccumulator> partial(chunks);
    detail::for_each_chunk(chunks, options.workers, [&](std::int64_t chunk) {
        const std::int64_t begin = chunk * kChunkSize;
        const std::int64_t end = std::min(num_samples, begin + kChunkSize);
        detail::MomentAccumulator acc;
        for (std::int64_t j = begin; j < end; ++j)
        {
            double density = 0.0;
            for (int l = 0; l < branches; ++l)
            {
                RngStream rng(options.seed, static_cast<std::uint64_t>(j * branches + l));
                density += sampler.draw(rng);
            }
            acc.add(std::exp(-std::max(0.0, density - threshold)));
        }
        partial[chunk] = acc;
    });

    detail::MomentAccumulator total;
    for (const auto& acc : partial)
        total.merge(acc);

    ErrorProbEstimate out;
    out.value = std::clamp(total.mean, 0.0, 1.0);
    out.std_error = std::sqrt(total.variance() / static_cast<double>(total.count));
    out.method = EstimateMethod::rcus_mc;
    out.samples_used = total.count;
    return out;
}

// ---------------------------------------------------------------------------
// E0 and the saddlepoint approximation
// ---------------------------------------------------------------------------

DensitySampleSet::DensitySampleSet(std::vector<double> values)
    : values_(std::move(values))
{
    if (values_.size() < 2)
        throw std::invalid_argument("DensitySampleSet: at least two samples are required");
    double sum = 0.0;
    min_ = max_ = values_.front();
    for (double v : values_)
    {
        if (!std::isfinite(v))
            throw EstimatorError("DensitySampleSet: non-finite information density sample");
        sum += v;
        min_ = std::min(min_, v);
        max_ = std::max(max_, v);
    }
    mean_ = sum / static_cast<double>(values_.size());
}

DensitySampleSet DensitySampleSet::draw(const BlockFadingConfig& config, Scheme scheme, std::int64_t count,
                                        const MonteCarloOptions& options)
{
    if (count < 2)
        throw std::invalid_argument("DensitySampleSet::draw: at least two samples are required");
    const BlockDensitySampler sampler(config, scheme, options.route);
    std::vector<double> values(static_cast<std::size_t>(count));
    detail::for_each_chunk(chunk_count(count), options.workers, [&](std::int64_t chunk) {
        const std::int64_t begin = chunk * kChunkSize;
        const std::int64_t end = std::min(count, begin + kChunkSize);
        for (std::int64_t i = begin; i < end; ++i)
        {
            RngStream rng(options.seed, static_cast<std::uint64_t>(i));
            values[static_cast<std::size_t>(i)] = sampler.draw(rng);
        }
    });
    return DensitySampleSet(std::move(values));
}

E0Estimate estimate_e0(double tau, const DensitySampleSet& samples)
{
    if (!(tau >= 0.0 && tau <= 1.0))
        throw std::invalid_argument("estimate_e0: tau must lie in [0, 1]");

    E0Estimate out;
    out.tau = tau;
    const auto values = samples.values();
    const auto n = static_cast<double>(values.size());

    if (samples.degenerate())
    {
        const double v = values.front();
        out.e0 = tau * v;
        out.e0_prime = v;
        out.e0_double_prime = 0.0;
        out.degenerate = true;
        return out;
    }

    // Weights exp(-tau i - shift) with the shift making the largest weight 1.
    const double shift = -tau * (tau > 0.0 ? samples.min() : 0.0);
    long double m0 = 0.0L, m1 = 0.0L, m2 = 0.0L;
    for (double v : values)
    {
        const double w = std::exp(-tau * v - shift);
        m0 += w;
        m1 += w * v;
        m2 += w * v * v;
    }
    m0 /= n;
    m1 /= n;
    m2 /= n;
    const double mean0 = static_cast<double>(m0);
    const double tilted_mean = static_cast<double>(m1 / m0);
    const double tilted_var = std::max(0.0, static_cast<double>(m2 / m0) - tilted_mean * tilted_mean);

    out.e0 = tau == 0.0 ? 0.0 : -(std::log(mean0) + shift);
    out.e0_prime = tilted_mean;
    out.e0_double_prime = -tilted_var;

    // Influence functions of log m0, m1/m0 and the tilted variance.
    long double s0 = 0.0L, s1 = 0.0L, s2 = 0.0L;
    for (double v : values)
    {
        const double w = std::exp(-tau * v - shift) / mean0;
        const double d = v - tilted_mean;
        const double psi0 = w - 1.0;
        const double psi1 = w * d;
        const double psi2 = w * (d * d - tilted_var);
        s0 += psi0 * psi0;
        s1 += psi1 * psi1;
        s2 += psi2 * psi2;
    }
    const double denom = n * (n - 1.0);
    out.std_errors = {std::sqrt(static_cast<double>(s0) / denom), std::sqrt(static_cast<double>(s1) / denom),
                      std::sqrt(static_cast<double>(s2) / denom)};
    return out;
}

E0Estimate estimate_e0(double tau, const BlockFadingConfig& config, Scheme scheme,
                       std::int64_t num_block_samples, const MonteCarloOptions& options)
{
    return estimate_e0(tau, DensitySampleSet::draw(config, scheme, num_block_samples, options));
}

namespace
{

double golden_section_maximize(auto&& objective, double lo, double hi, double tolerance)
{
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = hi - inv_phi * (hi - lo);
    double d = lo + inv_phi * (hi - lo);
    double fc = objective(c);
    double fd = objective(d);
    while (hi - lo > tolerance)
    {
        if (fc > fd)
        {
            hi = d;
            d = c;
            fd = fc;
            c = hi - inv_phi * (hi - lo);
            fc = objective(c);
        }
        else
        {
            lo = c;
            c = d;
            fc = fd;
            d = lo + inv_phi * (hi - lo);
            fd = objective(d);
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace

TauHat find_tau_hat(const BlockFadingConfig& config, const DensitySampleSet& samples)
{
    const double per_branch = rcus_threshold(config.information_bits()) / config.diversity_branches;
    // E0'(tau) is the tilted mean; one pass, no standard errors.
    auto slope = [&](double tau) {
        const double shift = -tau * samples.min();
        long double m0 = 0.0L, m1 = 0.0L;
        for (double v : samples.values())
        {
            const double w = std::exp(-tau * v - shift);
            m0 += w;
            m1 += w * v;
        }
        return static_cast<double>(m1 / m0) - per_branch;
    };

    TauHat out;
    const double lo_slope = slope(kTauClamp);
    const double hi_slope = slope(1.0 - kTauClamp);
    if (std::isfinite(lo_slope) && std::isfinite(hi_slope))
    {
        if (lo_slope <= 0.0)
            return {kTauClamp, TauStatus::clamped_low, false};
        if (hi_slope >= 0.0)
            return {1.0 - kTauClamp, TauStatus::clamped_high, false};

        double lo = kTauClamp;
        double hi = 1.0 - kTauClamp;
        bool finite = true;
        for (int iter = 0; iter < 200 && hi - lo > 1e-13; ++iter)
        {
            const double mid = 0.5 * (lo + hi);
            const double value = slope(mid);
            if (!std::isfinite(value))
            {
                finite = false;
                break;
            }
            (value > 0.0 ? lo : hi) = mid;
        }
        if (finite)
        {
            out.tau = 0.5 * (lo + hi);
            return out;
        }
    }

    auto objective = [&](double tau) { return estimate_e0(tau, samples).e0 - tau * per_branch; };
    out.tau = golden_section_maximize(objective, kTauClamp, 1.0 - kTauClamp, 1e-10);
    out.used_fallback = true;
    if (out.tau <= kTauClamp + 1e-9)
        out.status = TauStatus::clamped_low;
    else if (out.tau >= 1.0 - kTauClamp - 1e-9)
        out.status = TauStatus::clamped_high;
    return out;
}

double erfcx(double x)
{
    if (x < 0.0)
        throw std::domain_error("erfcx: negative argument");
    if (x < 26.0)
        return std::exp(x * x) * std::erfc(x);
    // Asymptotic series; the first omitted term is below 1e-13 relative here.
    const double inv2 = 1.0 / (2.0 * x * x);
    const double series = 1.0 - inv2 * (1.0 - 3.0 * inv2 * (1.0 - 5.0 * inv2 * (1.0 - 7.0 * inv2)));
    return series / (x * std::sqrt(std::numbers::pi));
}

namespace
{

ErrorProbEstimate saddlepoint_value(const BlockFadingConfig& config, const E0Estimate& e0, std::size_t samples)
{
    const double L = config.diversity_branches;
    const double curvature = -L * e0.e0_double_prime;
    if (!(curvature > 0.0))
        throw EstimatorError("saddlepoint: E0'' >= 0 at tau_hat; increase the number of block samples");
    const double root = std::sqrt(curvature);
    const double tau = e0.tau;
    const double bracket = 0.5 * (erfcx(tau * root / std::numbers::sqrt2)
                                  + erfcx((1.0 - tau) * root / std::numbers::sqrt2));
    const double log_value = -L * (e0.e0 - tau * e0.e0_prime) + std::log(bracket);

    ErrorProbEstimate out;
    out.value = std::clamp(std::exp(log_value), 0.0, 1.0);
    out.std_error = 0.0;
    out.method = EstimateMethod::saddlepoint;
    out.samples_used = static_cast<std::int64_t>(samples);
    return out;
}

}  // namespace

SaddlepointResult saddlepoint_epsilon(const BlockFadingConfig& config, const DensitySampleSet& samples)
{
    SaddlepointResult out;
    if (samples.degenerate())
    {
        // Every block carries the same density: the sum is deterministic and
        // the RCUs expectation is a single term.
        const double threshold = rcus_threshold(config.information_bits());
        const double total = config.diversity_branches * samples.min();
        out.exact_point_mass = true;
        out.tau = {kTauClamp, TauStatus::clamped_low, false};
        out.e0 = estimate_e0(out.tau.tau, samples);
        out.estimate.value = std::exp(-std::max(0.0, total - threshold));
        out.estimate.method = EstimateMethod::saddlepoint;
        out.estimate.samples_used = static_cast<std::int64_t>(samples.size());
        return out;
    }
    out.tau = find_tau_hat(config, samples);
    out.e0 = estimate_e0(out.tau.tau, samples);
    out.estimate = saddlepoint_value(config, out.e0, samples.size());
    return out;
}

SaddlepointResult saddlepoint_epsilon(const BlockFadingConfig& config, Scheme scheme,
                                      std::int64_t num_block_samples, const MonteCarloOptions& options)
{
    return saddlepoint_epsilon(config, DensitySampleSet::draw(config, scheme, num_block_samples, options));
}

ErrorProbEstimate saddlepoint_at_tau(const BlockFadingConfig& config, const DensitySampleSet& samples, double tau)
{
    return saddlepoint_value(config, estimate_e0(tau, samples), samples.size());
}

}  // namespace patbound
