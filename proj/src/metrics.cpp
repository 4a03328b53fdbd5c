#include "bacsim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "bacsim/error.hpp"
#include "bacsim/parallel.hpp"

namespace bacsim {

double effective_duration(const SessionOutcome& outcome, double ev_max_kw)
{
    return outcome.delivered_kwh / ev_max_kw;
}

bool parity(const SessionOutcome& outcome, const ChargingSession& session, double epsilon_kwh)
{
    return outcome.delivered_kwh >= session.energy_kwh - epsilon_kwh;
}

ChargePointReport summarize_chargepoint(const ChargePointProfile& profile,
                                        const ChargePointRun& run,
                                        const PackSpec& packs,
                                        const GridFeed& grid,
                                        double parity_epsilon_kwh)
{
    ChargePointReport r;
    r.cp_id = profile.cp_id;
    r.session_count = static_cast<long long>(run.outcomes.size());
    const double nominal_kw = grid.power_kw + packs.power_kw();

    for (std::size_t i = 0; i < run.outcomes.size(); ++i) {
        const auto& o = run.outcomes[i];
        const auto& s = profile.sessions[i];
        r.raw_kwh += s.energy_kwh;
        r.delivered_kwh += o.delivered_kwh;
        r.battery_drawn_kwh += o.battery_drawn_kwh;
        r.battery_recharged_kwh += o.battery_recharged_kwh;
        r.effective_duration_sum_h += effective_duration(o, profile.ev_max_kw);
        r.supply_duration_sum_h += o.delivered_kwh / nominal_kw;
        r.session_fraction_sum += s.energy_kwh > 0.0 ? o.delivered_kwh / s.energy_kwh : 1.0;
        if (parity(o, s, parity_epsilon_kwh))
            ++r.parity_count;
        if (o.depleted)
            ++r.depleted_count;
    }
    r.battery_recharged_kwh += run.idle_recharged_kwh;

    if (r.session_count > 0) {
        const auto n = static_cast<double>(r.session_count);
        r.mean_delivered_kwh = r.delivered_kwh / n;
        r.mean_effective_duration_h = r.effective_duration_sum_h / n;
    }
    r.delivered_fraction = r.raw_kwh > 0.0 ? r.delivered_kwh / r.raw_kwh : 1.0;

    const double capacity = packs.capacity_kwh();
    if (capacity > 0.0) {
        r.battery_cycles = r.battery_drawn_kwh / capacity;
        r.throughput_cycles = (r.battery_drawn_kwh + r.battery_recharged_kwh) / 2.0 / capacity;
    }
    return r;
}

void HourlyMean::merge(const HourlyMean& other)
{
    for (std::size_t h = 0; h < 24; ++h) {
        sum[h] += other.sum[h];
        count[h] += other.count[h];
    }
}

double HourlyMean::mean(int hour) const
{
    const auto h = static_cast<std::size_t>(hour);
    return count[h] > 0 ? sum[h] / static_cast<double>(count[h]) : 0.0;
}

void accumulate_battery_level_by_end_hour(HourlyMean& acc,
                                          const ChargePointProfile& profile,
                                          std::span<const SessionOutcome> outcomes)
{
    for (std::size_t i = 0; i < outcomes.size(); ++i)
        acc.add(hour_of_day(profile.sessions[i].end_seconds()), outcomes[i].battery_at_end_kwh);
}

CycleStats cycle_stats(std::span<const ChargePointReport> reports, CycleMeasure measure)
{
    if (reports.empty())
        return {};
    CycleStats stats{std::numeric_limits<double>::infinity(), 0.0, -std::numeric_limits<double>::infinity()};
    for (const auto& r : reports) {
        const double c = measure == CycleMeasure::discharge ? r.battery_cycles : r.throughput_cycles;
        stats.min = std::min(stats.min, c);
        stats.max = std::max(stats.max, c);
        stats.mean += c;
    }
    stats.mean /= static_cast<double>(reports.size());
    return stats;
}

namespace {

struct ChargePointResult
{
    ChargePointReport report;
    HourlyMean battery_level;
};

SweepCell reduce_cell(int packs, double grid_kw, std::vector<ChargePointResult>&& results)
{
    SweepCell cell;
    cell.pack_count = packs;
    cell.grid_kw = grid_kw;
    cell.chargepoints = static_cast<long long>(results.size());

    double raw = 0.0, delivered = 0.0, eff = 0.0, supply = 0.0, fraction = 0.0;
    long long parity_count = 0, depleted = 0;
    cell.reports.reserve(results.size());
    for (auto& r : results) {
        const auto& rep = r.report;
        cell.sessions += rep.session_count;
        raw += rep.raw_kwh;
        delivered += rep.delivered_kwh;
        eff += rep.effective_duration_sum_h;
        supply += rep.supply_duration_sum_h;
        fraction += rep.session_fraction_sum;
        parity_count += rep.parity_count;
        depleted += rep.depleted_count;
        cell.battery_level_by_end_hour.merge(r.battery_level);
        cell.reports.push_back(std::move(r.report));
    }

    if (cell.sessions > 0) {
        const auto n = static_cast<double>(cell.sessions);
        cell.mean_delivered_kwh = delivered / n;
        cell.mean_effective_duration_h = eff / n;
        cell.mean_supply_duration_h = supply / n;
        cell.mean_session_delivered_pct = 100.0 * fraction / n;
        cell.parity_pct = 100.0 * static_cast<double>(parity_count) / n;
        cell.depleted_pct = 100.0 * static_cast<double>(depleted) / n;
    }
    cell.delivered_pct = raw > 0.0 ? 100.0 * delivered / raw : (cell.sessions > 0 ? 100.0 : 0.0);
    cell.cycles = cycle_stats(cell.reports, CycleMeasure::discharge);
    cell.throughput_cycles = cycle_stats(cell.reports, CycleMeasure::throughput);
    return cell;
}

}  // namespace

std::vector<SweepCell> sweep(std::span<const ChargePointProfile> profiles,
                             const std::vector<double>& grid_kw,
                             const std::vector<int>& pack_counts,
                             const PackSpec& unit,
                             const SweepOptions& options)
{
    if (grid_kw.empty() || pack_counts.empty())
        throw SimulationError("sweep axes must be non-empty");
    if (!(options.initial_fraction >= 0.0 && options.initial_fraction <= 1.0))
        throw SimulationError(fmt::format("initial battery fraction {} outside [0, 1]", options.initial_fraction));

    std::vector<SweepCell> cells;
    cells.reserve(grid_kw.size() * pack_counts.size());
    for (const double g : grid_kw) {
        for (const int packs : pack_counts) {
            const PackSpec spec{packs, unit.pack_capacity_kwh, unit.pack_power_kw};
            const GridFeed grid{g};
            const double initial = spec.capacity_kwh() * options.initial_fraction;

            std::vector<ChargePointResult> results(profiles.size());
            try {
                parallel_for(profiles.size(), options.workers, [&](std::size_t i) {
                    const auto run = simulate_chargepoint(profiles[i], grid, spec, initial);
                    results[i].report =
                        summarize_chargepoint(profiles[i], run, spec, grid, options.parity_epsilon_kwh);
                    accumulate_battery_level_by_end_hour(results[i].battery_level, profiles[i], run.outcomes);
                });
            } catch (const SimulationError& e) {
                throw SimulationError(fmt::format("sweep cell grid={} kW packs={}: {}", g, packs, e.what()));
            }
            cells.push_back(reduce_cell(packs, g, std::move(results)));
            if (options.on_cell)
                options.on_cell(cells.back());
        }
    }
    return cells;
}

std::vector<std::string> monotonicity_violations(const std::vector<SweepCell>& cells)
{
    // Tolerates summation noise only.
    constexpr double kSlack = 1e-9;
    std::vector<std::string> out;
    auto check = [&](const SweepCell& lo, const SweepCell& hi, const char* axis) {
        if (hi.delivered_pct + kSlack < lo.delivered_pct)
            out.push_back(fmt::format("delivered_pct decreases along {}: ({} kW, {} packs) {} -> ({} kW, {} packs) {}",
                                      axis, lo.grid_kw, lo.pack_count, lo.delivered_pct, hi.grid_kw,
                                      hi.pack_count, hi.delivered_pct));
        if (hi.parity_pct + kSlack < lo.parity_pct)
            out.push_back(fmt::format("parity_pct decreases along {}: ({} kW, {} packs) {} -> ({} kW, {} packs) {}",
                                      axis, lo.grid_kw, lo.pack_count, lo.parity_pct, hi.grid_kw, hi.pack_count,
                                      hi.parity_pct));
    };
    for (const auto& a : cells) {
        for (const auto& b : cells) {
            if (a.grid_kw == b.grid_kw && a.pack_count < b.pack_count)
                check(a, b, "pack_count");
            if (a.pack_count == b.pack_count && a.grid_kw < b.grid_kw)
                check(a, b, "grid_kw");
        }
    }
    return out;
}

std::vector<EnergyBand> energy_by_speed(std::span<const ChargePointProfile> profiles,
                                        const std::vector<double>& edges)
{
    std::vector<EnergyBand> bands;
    if (edges.size() < 2)
        return bands;
    std::vector<std::vector<double>> values(edges.size() - 1);
    for (const auto& p : profiles) {
        const auto it = std::upper_bound(edges.begin(), edges.end(), p.ev_max_kw);
        if (it == edges.begin() || it == edges.end())
            continue;
        auto& bucket = values[static_cast<std::size_t>(it - edges.begin() - 1)];
        for (const auto& s : p.sessions)
            bucket.push_back(s.energy_kwh);
    }
    for (std::size_t b = 0; b + 1 < edges.size(); ++b) {
        EnergyBand band{edges[b], edges[b + 1], static_cast<long long>(values[b].size()), 0.0, 0.0};
        auto& v = values[b];
        if (!v.empty()) {
            double total = 0.0;
            for (const double x : v)
                total += x;
            band.mean_kwh = total / static_cast<double>(v.size());
            std::sort(v.begin(), v.end());
            const auto mid = v.size() / 2;
            band.median_kwh = v.size() % 2 == 1 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
        }
        bands.push_back(band);
    }
    return bands;
}

std::array<double, 24> diurnal_histogram(std::span<const ChargePointProfile> profiles, DiurnalQuantity quantity)
{
    std::array<double, 24> bins{};
    for (const auto& p : profiles) {
        for (const auto& s : p.sessions) {
            const auto start_hour = static_cast<std::size_t>(hour_of_day(s.start_seconds()));
            switch (quantity) {
            case DiurnalQuantity::session_starts: bins[start_hour] += 1.0; break;
            case DiurnalQuantity::dispensed_energy: bins[start_hour] += s.energy_kwh; break;
            case DiurnalQuantity::occupancy: {
                double cursor = s.start_seconds();
                const double end = s.end_seconds();
                while (cursor < end) {
                    const double hour_start = std::floor(cursor / kSecondsPerHour) * kSecondsPerHour;
                    const double boundary = hour_start + kSecondsPerHour;
                    const double stop = std::min(boundary, end);
                    bins[static_cast<std::size_t>(hour_of_day(cursor))] += (stop - cursor) / kSecondsPerHour;
                    cursor = stop;
                }
                break;
            }
            }
        }
    }
    return bins;
}

const char* to_string(DiurnalQuantity q)
{
    switch (q) {
    case DiurnalQuantity::session_starts: return "session_starts";
    case DiurnalQuantity::occupancy: return "occupancy_h";
    case DiurnalQuantity::dispensed_energy: return "dispensed_kwh";
    }
    return "?";
}

}  // namespace bacsim
