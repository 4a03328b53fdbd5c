#include "bacsim/synth.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ostream>
#include <random>
#include <sstream>

#include <fmt/format.h>

#include "bacsim/error.hpp"
#include "bacsim/ingest.hpp"

namespace bacsim {

namespace {

void append_date_time(fmt::memory_buffer& buf, long long unix_s)
{
    using namespace std::chrono;
    const auto days_since = static_cast<long long>(std::floor(static_cast<double>(unix_s) / 86400.0));
    const sys_days day{days{days_since}};
    const year_month_day ymd{day};
    const long long tod = unix_s - days_since * 86400;
    fmt::format_to(std::back_inserter(buf), "{:02}/{:02}/{:04},{:02}:{:02}:{:02}", static_cast<unsigned>(ymd.day()),
                   static_cast<unsigned>(ymd.month()), static_cast<int>(ymd.year()), tod / 3600, (tod / 60) % 60,
                   tod % 60);
}

}  // namespace

std::array<double, 24> SynthSpec::domestic_start_weights()
{
    return {1.0, 0.6, 0.4, 0.3, 0.3, 0.4, 0.8, 1.5, 2.0, 2.0, 2.2, 2.4,
            2.8, 3.4, 4.0, 4.6, 5.4, 6.2, 6.6, 6.0, 5.0, 3.6, 2.4, 1.6};
}

SynthSpec SynthSpec::domestic_like()
{
    SynthSpec spec;
    spec.start_hour_weights = domestic_start_weights();
    return spec;
}

std::vector<std::string> validate(const SynthSpec& spec)
{
    std::vector<std::string> issues;
    if (spec.cp_count < 0)
        issues.push_back(fmt::format("synth.cp_count must be >= 0, got {}", spec.cp_count));
    if (spec.sessions_per_cp < 0)
        issues.push_back(fmt::format("synth.sessions_per_cp must be >= 0, got {}", spec.sessions_per_cp));

    bool any_positive = false;
    for (const double w : spec.start_hour_weights) {
        if (!(w >= 0.0) || !std::isfinite(w)) {
            issues.push_back("synth.start_hour_weights must all be finite and >= 0");
            break;
        }
        any_positive = any_positive || w > 0.0;
    }
    if (!any_positive)
        issues.push_back("synth.start_hour_weights needs at least one positive weight");

    if (!(spec.plugin_hours.sigma >= 0.0) || !std::isfinite(spec.plugin_hours.mu))
        issues.push_back("synth.plugin_hours needs finite mu and sigma >= 0");
    if (!(spec.energy_kwh.sigma >= 0.0) || !std::isfinite(spec.energy_kwh.mu))
        issues.push_back("synth.energy_kwh needs finite mu and sigma >= 0");
    if (!(spec.min_plugin_hours > 0.0) || !(spec.max_plugin_hours >= spec.min_plugin_hours))
        issues.push_back(fmt::format("synth plug-in bounds need 0 < min_plugin_hours <= max_plugin_hours, got [{}, {}]",
                                     spec.min_plugin_hours, spec.max_plugin_hours));
    if (!(spec.max_energy_kwh > 0.0))
        issues.push_back("synth.max_energy_kwh must be > 0");
    if (!(spec.min_gap_hours >= 0.0))
        issues.push_back("synth.min_gap_hours must be >= 0");
    if (spec.horizon_days <= 0)
        issues.push_back("synth.horizon_days must be > 0");
    else if (spec.min_plugin_hours > spec.horizon_days * 24.0)
        issues.push_back(fmt::format("synth.min_plugin_hours {} is longer than the {}-day horizon",
                                     spec.min_plugin_hours, spec.horizon_days));

    if (spec.ev_max_bands.empty()) {
        issues.push_back("synth.ev_max_bands must not be empty");
    } else {
        bool band_weight = false;
        for (const auto& b : spec.ev_max_bands) {
            if (!(b.min_kw > 0.0) || !(b.max_kw >= b.min_kw) || !std::isfinite(b.max_kw))
                issues.push_back(fmt::format("synth ev_max band [{}, {}) is invalid", b.min_kw, b.max_kw));
            if (!(b.weight >= 0.0))
                issues.push_back("synth ev_max band weights must be >= 0");
            band_weight = band_weight || b.weight > 0.0;
        }
        if (!band_weight)
            issues.push_back("synth.ev_max_bands needs at least one positive weight");
    }
    if (!parse_date_time(spec.start_date, "00:00:00"))
        issues.push_back(fmt::format("synth.start_date '{}' is not DD/MM/YYYY", spec.start_date));
    return issues;
}

void generate(const SynthSpec& spec, std::ostream& out)
{
    const auto issues = validate(spec);
    if (!issues.empty())
        throw SynthError("invalid synthetic spec: " + issues.front());

    std::mt19937_64 rng(spec.seed);
    std::discrete_distribution<int> start_hour(spec.start_hour_weights.begin(), spec.start_hour_weights.end());
    std::uniform_int_distribution<int> second_in_hour(0, 3599);
    std::lognormal_distribution<double> plugin(spec.plugin_hours.mu, spec.plugin_hours.sigma);
    std::lognormal_distribution<double> energy(spec.energy_kwh.mu, spec.energy_kwh.sigma);
    std::vector<double> band_weights;
    for (const auto& b : spec.ev_max_bands)
        band_weights.push_back(b.weight);
    std::discrete_distribution<std::size_t> band_pick(band_weights.begin(), band_weights.end());
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    const long long origin = parse_date_time(spec.start_date, "00:00:00")->time_since_epoch().count();
    const long long horizon_end = origin + static_cast<long long>(spec.horizon_days) * 86400;
    const long long gap_s = std::max(1LL, std::llround(spec.min_gap_hours * 3600.0));
    const long long min_plugin_s = std::max(1LL, std::llround(spec.min_plugin_hours * 3600.0));
    const long long max_plugin_s = std::max(min_plugin_s, std::llround(spec.max_plugin_hours * 3600.0));

    out << "EventID,CPID,StartDate,StartTime,EndDate,EndTime,Energy,PluginDuration\n";
    fmt::memory_buffer buf;
    long long event = 1;
    for (int cp = 0; cp < spec.cp_count; ++cp) {
        const auto& band = spec.ev_max_bands[band_pick(rng)];
        const double ev_target = band.min_kw + (band.max_kw - band.min_kw) * unit(rng);
        const std::string cp_id = fmt::format("SYN{:05}", cp + 1);

        long long cursor = origin;
        for (int k = 0; k < spec.sessions_per_cp; ++k) {
            const long long day_start = cursor - ((cursor - origin) % 86400);
            long long start = day_start + start_hour(rng) * 3600LL + second_in_hour(rng);
            while (start < cursor)
                start += 86400;
            const long long dur_s = std::clamp(std::llround(plugin(rng) * 3600.0), min_plugin_s, max_plugin_s);
            if (start + dur_s > horizon_end)
                throw SynthError(fmt::format(
                    "infeasible synthetic spec: session {} of charge point {} ends after the {}-day horizon; "
                    "reduce sessions_per_cp ({}), plug-in durations or min_gap_hours",
                    k + 1, cp_id, spec.horizon_days, spec.sessions_per_cp));
            const double dur_h = static_cast<double>(dur_s) / 3600.0;
            const double kwh = std::min({energy(rng), spec.max_energy_kwh, ev_target * dur_h});

            buf.clear();
            fmt::format_to(std::back_inserter(buf), "{},{},", event++, cp_id);
            append_date_time(buf, start);
            buf.push_back(',');
            append_date_time(buf, start + dur_s);
            fmt::format_to(std::back_inserter(buf), ",{:.3f},{:.6f}\n", kwh, dur_h);
            out.write(buf.data(), static_cast<std::streamsize>(buf.size()));

            cursor = start + dur_s + gap_s;
        }
    }
}

std::string generate(const SynthSpec& spec)
{
    std::ostringstream out;
    generate(spec, out);
    return out.str();
}

}  // namespace bacsim
