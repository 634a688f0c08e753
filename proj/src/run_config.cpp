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

#include "patbound/run_config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "patbound/errors.hpp"

namespace patbound
{

std::string_view to_string(Subcommand subcommand)
{
    switch (subcommand)
    {
    case Subcommand::point:
        return "point";
    case Subcommand::pilot_sweep:
        return "pilot-sweep";
    case Subcommand::snr_curve:
        return "snr-curve";
    case Subcommand::envelope:
        return "envelope";
    }
    return "unknown";
}

std::optional<Subcommand> parse_subcommand(std::string_view text)
{
    for (auto sub : {Subcommand::point, Subcommand::pilot_sweep, Subcommand::snr_curve, Subcommand::envelope})
        if (text == to_string(sub))
            return sub;
    return std::nullopt;
}

namespace
{

const std::set<std::string, std::less<>> kKnownKeys = {
    "profile",
    "profile.name",
    "profile.coherence_bandwidth_hz",
    "profile.coherence_time_s",
    "profile.system_bandwidth_hz",
    "profile.rb_bandwidth_hz",
    "profile.rb_duration_s",
    "geometry.d",
    "geometry.r",
    "diversity_branches",
    "coherence_block_size",
    "scheme",
    "tx_antennas",
    "rx_antennas",
    "payload_bits",
    "snr_db",
    "snr_grid_db",
    "snr_bracket_db",
    "target_epsilon",
    "pilot_count",
    "pilot_sweep",
    "s",
    "estimator",
    "mc_samples",
    "sp_block_samples",
    "mc_floor",
    "seed",
    "workers",
    "route",
    "output",
    "envelope.branches",
    "envelope.channel_uses",
    "envelope.fixed_pilots",
};

std::string_view trim(std::string_view text)
{
    const auto first = text.find_first_not_of(" \t\r");
    if (first == std::string_view::npos)
        return {};
    const auto last = text.find_last_not_of(" \t\r");
    return text.substr(first, last - first + 1);
}

template <class T>
std::optional<T> parse_number(std::string_view text)
{
    text = trim(text);
    if (!text.empty() && text.front() == '+')
        text.remove_prefix(1);
    T value{};
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc() || ptr != end || text.empty())
        return std::nullopt;
    if constexpr (std::is_floating_point_v<T>)
        if (!std::isfinite(value))
            return std::nullopt;
    return value;
}

std::vector<std::string_view> split(std::string_view text, char separator)
{
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true)
    {
        const auto pos = text.find(separator, start);
        out.push_back(trim(text.substr(start, pos == std::string_view::npos ? pos : pos - start)));
        if (pos == std::string_view::npos)
            break;
        start = pos + 1;
    }
    return out;
}

std::string format_double(double value)
{
    char buffer[32];
    std::snprintf(buffer, sizeof buffer, "%.17g", value);
    return buffer;
}

class Reader
{
public:
    explicit Reader(std::string_view text)
    {
        int line_number = 0;
        for (auto line : split(text, '\n'))
        {
            ++line_number;
            if (const auto hash = line.find('#'); hash != std::string_view::npos)
                line = trim(line.substr(0, hash));
            if (line.empty())
                continue;
            const auto eq = line.find('=');
            if (eq == std::string_view::npos)
            {
                problem("line " + std::to_string(line_number) + ": expected 'key = value'");
                continue;
            }
            const std::string key(trim(line.substr(0, eq)));
            const std::string value(trim(line.substr(eq + 1)));
            if (key.rfind("manifest.", 0) == 0)
                continue;
            if (!kKnownKeys.count(key))
            {
                problem("line " + std::to_string(line_number) + ": unknown key '" + key + "'");
                continue;
            }
            if (!values_.emplace(key, value).second)
                problem("line " + std::to_string(line_number) + ": duplicate key '" + key + "'");
        }
    }

    bool has(std::string_view key) const { return values_.count(std::string(key)) > 0; }

    std::optional<std::string> text(std::string_view key) const
    {
        auto it = values_.find(std::string(key));
        if (it == values_.end())
            return std::nullopt;
        return it->second;
    }

    template <class T>
    std::optional<T> number(std::string_view key)
    {
        auto raw = text(key);
        if (!raw)
            return std::nullopt;
        auto value = parse_number<T>(*raw);
        if (!value)
            problem(std::string(key) + ": '" + *raw + "' is not a valid "
                    + (std::is_floating_point_v<T> ? "number" : "integer"));
        return value;
    }

    std::vector<double> list(std::string_view key)
    {
        auto raw = text(key);
        if (!raw)
            return {};
        try
        {
            return parse_number_list(*raw);
        }
        catch (const std::invalid_argument& e)
        {
            problem(std::string(key) + ": " + e.what());
            return {};
        }
    }

    void problem(std::string message) { problems_.push_back(std::move(message)); }
    std::vector<std::string>& problems() { return problems_; }

private:
    std::map<std::string, std::string, std::less<>> values_;
    std::vector<std::string> problems_;
};

std::optional<ChannelProfile> read_profile(Reader& in)
{
    const bool overrides = in.has("profile.name") || in.has("profile.coherence_bandwidth_hz")
                           || in.has("profile.coherence_time_s") || in.has("profile.system_bandwidth_hz")
                           || in.has("profile.rb_bandwidth_hz") || in.has("profile.rb_duration_s");
    const auto name = in.text("profile");
    if (!name && !overrides)
        return std::nullopt;

    ChannelProfile profile{"custom", 0.0, 0.0};
    if (name && *name != "custom")
    {
        auto builtin = find_builtin_profile(*name);
        if (!builtin)
        {
            in.problem("profile: unknown profile '" + *name + "' (expected EPA, TDL-C or custom)");
            return std::nullopt;
        }
        profile = *builtin;
    }
    if (auto v = in.text("profile.name"))
        profile.name = *v;
    if (auto v = in.number<double>("profile.coherence_bandwidth_hz"))
        profile.coherence_bandwidth_hz = *v;
    if (auto v = in.number<double>("profile.coherence_time_s"))
        profile.coherence_time_s = *v;
    if (auto v = in.number<double>("profile.system_bandwidth_hz"))
        profile.system_bandwidth_hz = *v;
    if (auto v = in.number<double>("profile.rb_bandwidth_hz"))
        profile.rb_bandwidth_hz = *v;
    if (auto v = in.number<double>("profile.rb_duration_s"))
        profile.rb_duration_s = *v;
    for (auto& p : profile.violations())
        in.problem(p);
    return profile;
}

std::optional<PilotRange> read_pilot_sweep(Reader& in)
{
    auto raw = in.text("pilot_sweep");
    if (!raw)
        return std::nullopt;
    const auto parts = split(*raw, ':');
    if (parts.size() != 3)
    {
        in.problem("pilot_sweep: expected 'first:step:last' (0 for first/last means the full range)");
        return std::nullopt;
    }
    auto first = parse_number<int>(parts[0]);
    auto step = parse_number<int>(parts[1]);
    auto last = parse_number<int>(parts[2]);
    if (!first || !step || !last)
    {
        in.problem("pilot_sweep: '" + *raw + "' must contain three integers");
        return std::nullopt;
    }
    if (*step < 1)
        in.problem("pilot_sweep: step must be >= 1");
    if (*first > 0 && *last > 0 && *first > *last)
        in.problem("pilot_sweep: first must not exceed last");
    return PilotRange{*first, *last, *step};
}

}  // namespace

std::vector<double> parse_number_list(std::string_view text)
{
    text = trim(text);
    if (text.empty())
        throw std::invalid_argument("empty list");
    if (text.find(':') != std::string_view::npos)
    {
        const auto parts = split(text, ':');
        if (parts.size() != 3)
            throw std::invalid_argument("range must be 'start:step:stop'");
        auto start = parse_number<double>(parts[0]);
        auto step = parse_number<double>(parts[1]);
        auto stop = parse_number<double>(parts[2]);
        if (!start || !step || !stop)
            throw std::invalid_argument("range '" + std::string(text) + "' must contain three numbers");
        if (!(*step > 0.0) || *stop < *start)
            throw std::invalid_argument("range needs step > 0 and stop >= start");
        std::vector<double> out;
        const double slack = *step * 1e-6;
        for (long i = 0;; ++i)
        {
            const double value = *start + static_cast<double>(i) * *step;
            if (value > *stop + slack)
                break;
            out.push_back(value);
        }
        return out;
    }
    std::vector<double> out;
    for (auto item : split(text, ','))
    {
        auto value = parse_number<double>(item);
        if (!value)
            throw std::invalid_argument("'" + std::string(item) + "' is not a number");
        out.push_back(*value);
    }
    return out;
}

RunConfig parse_run_config(std::string_view text)
{
    Reader in(text);
    RunConfig run;

    run.profile = read_profile(in);

    if (auto name = in.text("scheme"))
    {
        if (auto scheme = parse_scheme(*name))
            run.scheme = *scheme;
        else
            in.problem("scheme: unknown scheme '" + *name + "' (expected simo_1xN, alamouti_2x2 or mimo_generic)");
    }
    else
    {
        in.problem("scheme is required");
    }

    auto& link = run.link;
    if (auto v = in.number<int>("tx_antennas"))
        link.tx_antennas = *v;
    else if (run.scheme == Scheme::alamouti)
        link.tx_antennas = 2;
    else if (run.scheme == Scheme::mimo_generic && !in.has("tx_antennas"))
        in.problem("tx_antennas is required for mimo_generic");
    if (auto v = in.number<int>("rx_antennas"))
        link.rx_antennas = *v;
    else
        in.problem("rx_antennas is required");
    if (auto v = in.number<double>("payload_bits"))
        run.payload_bits = *v;
    if (!(run.payload_bits > 0.0))
        in.problem("payload_bits must be positive");

    // Envelope first: it may supply the base geometry.
    if (in.has("envelope.branches") || in.has("envelope.channel_uses") || in.has("envelope.fixed_pilots"))
    {
        EnvelopeSpec spec;
        spec.payload_bits = run.payload_bits;
        for (double b : in.list("envelope.branches"))
        {
            if (b != std::floor(b) || b < 1)
                in.problem("envelope.branches: values must be positive integers");
            else
                spec.branches.push_back(static_cast<int>(b));
        }
        if (!in.has("envelope.branches"))
            in.problem("envelope.branches is required when any envelope key is set");
        if (auto v = in.number<int>("envelope.channel_uses"))
            spec.channel_uses = *v;
        for (double p : in.list("envelope.fixed_pilots"))
        {
            if (p != std::floor(p) || p < 1)
                in.problem("envelope.fixed_pilots: values must be positive integers");
            else
                spec.fixed_pilots.push_back(static_cast<int>(p));
        }
        for (int b : spec.branches)
            if (spec.channel_uses / b < link.tx_antennas + 1)
                in.problem("envelope: L = " + std::to_string(b) + " leaves n_c = "
                           + std::to_string(spec.channel_uses / b) + ", too short for pilots and data");
        run.envelope = spec;
    }

    const bool has_dr = in.has("geometry.d") || in.has("geometry.r");
    const auto branches = in.number<int>("diversity_branches");
    const auto block = in.number<int>("coherence_block_size");
    if (has_dr && in.has("coherence_block_size"))
        in.problem("give either geometry.d/geometry.r or coherence_block_size, not both");
    if (has_dr)
    {
        const auto d = in.number<int>("geometry.d");
        const auto r = in.number<int>("geometry.r");
        if (!in.has("geometry.d") || !in.has("geometry.r"))
            in.problem("geometry.d and geometry.r must be given together");
        if (!run.profile)
            in.problem("geometry.d/geometry.r require a profile");
        if (!in.has("diversity_branches"))
            in.problem("diversity_branches is required");
        if (d && r && branches && run.profile)
        {
            try
            {
                run.geometry = make_geometry(*run.profile, *d, *r, *branches);
                link.coherence_block_size = run.geometry->coherence_block_size();
                link.diversity_branches = run.geometry->diversity_branches;
            }
            catch (const GeometryError& e)
            {
                in.problem(std::string("geometry (") + std::string(to_string(e.kind())) + "): " + e.what());
            }
        }
    }
    else if (in.has("coherence_block_size"))
    {
        if (!in.has("diversity_branches"))
            in.problem("diversity_branches is required");
        if (block)
            link.coherence_block_size = *block;
        if (branches)
            link.diversity_branches = *branches;
    }
    else if (run.envelope && !run.envelope->branches.empty())
    {
        link.diversity_branches = *std::min_element(run.envelope->branches.begin(), run.envelope->branches.end());
        link.coherence_block_size = run.envelope->channel_uses / link.diversity_branches;
    }
    else
    {
        in.problem("geometry is required: geometry.d + geometry.r + diversity_branches, or coherence_block_size "
                   "+ diversity_branches");
    }
    if (link.diversity_branches > 0 && link.coherence_block_size > 0)
        link.rate = run.payload_bits / (static_cast<double>(link.diversity_branches) * link.coherence_block_size);

    run.snr_db = in.number<double>("snr_db");
    run.snr_grid_db = in.list("snr_grid_db");
    if (in.has("snr_bracket_db"))
    {
        const auto bracket = in.list("snr_bracket_db");
        if (bracket.size() != 2 || !(bracket[0] < bracket[1]))
            in.problem("snr_bracket_db: expected 'low,high' with low < high");
        else
            run.snr_bracket = SnrBracket{bracket[0], bracket[1]};
    }
    link.snr = db_to_linear(run.snr_db ? *run.snr_db : (run.snr_grid_db.empty() ? 0.0 : run.snr_grid_db.front()));

    run.target_epsilon = in.number<double>("target_epsilon");
    if (run.target_epsilon && !(*run.target_epsilon > 0.0 && *run.target_epsilon <= 1.0))
        in.problem("target_epsilon must lie in (0, 1]");

    run.pilot_sweep = read_pilot_sweep(in);
    if (auto v = in.number<int>("pilot_count"))
    {
        link.pilot_count = *v;
        run.fixed_pilot = true;
    }
    else if (!in.has("pilot_count"))
    {
        link.pilot_count = link.tx_antennas;
        if (!run.pilot_sweep)
            in.problem("pilot_count or pilot_sweep is required");
    }

    if (auto v = in.number<double>("s"))
        link.rcus_s = *v;

    auto& settings = run.settings;
    if (auto name = in.text("estimator"))
    {
        if (auto estimator = parse_estimator(*name))
            settings.estimator = *estimator;
        else
            in.problem("estimator: unknown estimator '" + *name + "' (expected mc, saddlepoint or both)");
    }
    if (auto v = in.number<std::int64_t>("mc_samples"))
        settings.mc_samples = *v;
    if (auto v = in.number<std::int64_t>("sp_block_samples"))
        settings.sp_block_samples = *v;
    if (settings.mc_samples < 2)
        in.problem("mc_samples must be >= 2");
    if (settings.sp_block_samples < 2)
        in.problem("sp_block_samples must be >= 2");
    if (auto v = in.number<double>("mc_floor"))
        settings.mc_floor = *v;
    if (auto v = in.number<std::uint64_t>("seed"))
        settings.options.seed = *v;
    if (auto v = in.number<int>("workers"))
        settings.options.workers = *v;
    if (settings.options.workers < 0)
        in.problem("workers must be >= 0");
    if (auto name = in.text("route"))
    {
        if (*name == "equivalent")
            settings.options.route = SamplingRoute::equivalent;
        else if (*name == "raw")
            settings.options.route = SamplingRoute::raw;
        else
            in.problem("route: expected 'equivalent' or 'raw'");
    }
    if (auto v = in.text("output"))
    {
        if (v->empty())
            in.problem("output must not be empty");
        run.output = *v;
    }

    // Model invariants, reported alongside the syntax problems.
    std::vector<std::string> model = link.violations();
    for (auto& v : scheme_violations(link, run.scheme))
        if (std::find(model.begin(), model.end(), v) == model.end())
            model.push_back(v);
    for (auto& v : model)
        in.problem(v);

    if (!in.problems().empty())
        throw ConfigError(std::move(in.problems()));
    return run;
}

RunConfig load_run_config(const std::string& path)
{
    std::ifstream file(path);
    if (!file)
        throw ConfigError({"cannot read config file '" + path + "'"});
    std::ostringstream text;
    text << file.rdbuf();
    return parse_run_config(text.str());
}

std::string to_config_text(const RunConfig& run)
{
    std::ostringstream os;
    const auto& link = run.link;
    if (run.profile)
    {
        const auto& p = *run.profile;
        os << "profile = custom\n"
           << "profile.name = " << p.name << '\n'
           << "profile.coherence_bandwidth_hz = " << format_double(p.coherence_bandwidth_hz) << '\n'
           << "profile.coherence_time_s = " << format_double(p.coherence_time_s) << '\n'
           << "profile.system_bandwidth_hz = " << format_double(p.system_bandwidth_hz) << '\n'
           << "profile.rb_bandwidth_hz = " << format_double(p.rb_bandwidth_hz) << '\n'
           << "profile.rb_duration_s = " << format_double(p.rb_duration_s) << '\n';
    }
    if (run.geometry)
        os << "geometry.d = " << run.geometry->ofdm_symbols_per_rb << '\n'
           << "geometry.r = " << run.geometry->rbs_per_coherence_band << '\n';
    else
        os << "coherence_block_size = " << link.coherence_block_size << '\n';
    os << "diversity_branches = " << link.diversity_branches << '\n'
       << "scheme = " << to_string(run.scheme) << '\n'
       << "tx_antennas = " << link.tx_antennas << '\n'
       << "rx_antennas = " << link.rx_antennas << '\n'
       << "payload_bits = " << format_double(run.payload_bits) << '\n';
    if (run.snr_db)
        os << "snr_db = " << format_double(*run.snr_db) << '\n';
    if (!run.snr_grid_db.empty())
    {
        os << "snr_grid_db = ";
        for (std::size_t i = 0; i < run.snr_grid_db.size(); ++i)
            os << (i ? "," : "") << format_double(run.snr_grid_db[i]);
        os << '\n';
    }
    os << "snr_bracket_db = " << format_double(run.snr_bracket.low_db) << ','
       << format_double(run.snr_bracket.high_db) << '\n';
    if (run.target_epsilon)
        os << "target_epsilon = " << format_double(*run.target_epsilon) << '\n';
    if (run.fixed_pilot)
        os << "pilot_count = " << link.pilot_count << '\n';
    if (run.pilot_sweep)
        os << "pilot_sweep = " << run.pilot_sweep->first << ':' << run.pilot_sweep->step << ':'
           << run.pilot_sweep->last << '\n';
    const auto& settings = run.settings;
    os << "s = " << format_double(link.rcus_s) << '\n'
       << "estimator = " << to_string(settings.estimator) << '\n'
       << "mc_samples = " << settings.mc_samples << '\n'
       << "sp_block_samples = " << settings.sp_block_samples << '\n'
       << "mc_floor = " << format_double(settings.mc_floor) << '\n'
       << "seed = " << settings.options.seed << '\n'
       << "workers = " << settings.options.workers << '\n'
       << "route = " << (settings.options.route == SamplingRoute::raw ? "raw" : "equivalent") << '\n'
       << "output = " << run.output << '\n';
    if (run.envelope)
    {
        const auto& e = *run.envelope;
        os << "envelope.branches = ";
        for (std::size_t i = 0; i < e.branches.size(); ++i)
            os << (i ? "," : "") << e.branches[i];
        os << "\nenvelope.channel_uses = " << e.channel_uses << '\n';
        if (!e.fixed_pilots.empty())
        {
            os << "envelope.fixed_pilots = ";
            for (std::size_t i = 0; i < e.fixed_pilots.size(); ++i)
                os << (i ? "," : "") << e.fixed_pilots[i];
            os << '\n';
        }
    }
    return os.str();
}

std::vector<std::string> requirement_violations(const RunConfig& run, Subcommand subcommand)
{
    std::vector<std::string> out;
    switch (subcommand)
    {
    case Subcommand::point:
        if (!run.snr_db)
            out.push_back("point requires snr_db");
        if (!run.fixed_pilot)
            out.push_back("point requires pilot_count");
        break;
    case Subcommand::pilot_sweep:
        if (!run.snr_db)
            out.push_back("pilot-sweep requires snr_db");
        if (!run.pilot_sweep)
            out.push_back("pilot-sweep requires pilot_sweep");
        break;
    case Subcommand::snr_curve:
        if (run.snr_grid_db.empty())
            out.push_back("snr-curve requires snr_grid_db");
        if (run.pilot_sweep && !run.snr_db)
            out.push_back("snr-curve with pilot_sweep requires snr_db (pilot optimization point)");
        if (!run.pilot_sweep && !run.fixed_pilot)
            out.push_back("snr-curve requires pilot_count or pilot_sweep");
        break;
    case Subcommand::envelope:
        if (!run.envelope)
            out.push_back("envelope requires envelope.branches");
        if (!run.target_epsilon)
            out.push_back("envelope requires target_epsilon");
        if (!run.pilot_sweep)
            out.push_back("envelope requires pilot_sweep");
        break;
    }
    return out;
}

}  // namespace patbound
