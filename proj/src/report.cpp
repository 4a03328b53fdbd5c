#include "bacsim/report.hpp"

#include <cmath>
#include <ostream>

#include <fmt/format.h>
#include <json.hpp>

namespace bacsim {

namespace {

using nlohmann::json;

json edge_value(double v)
{
    return std::isfinite(v) ? json(v) : json("inf");
}

std::string cell_label(const SweepCell& c)
{
    return fmt::format("g{}_p{}", c.grid_kw, c.pack_count);
}

void put(std::ostream& out, const std::string& line)
{
    out.write(line.data(), static_cast<std::streamsize>(line.size()));
}

json cell_json(const SweepCell& c)
{
    return json{{"pack_count", c.pack_count},
                {"grid_kw", c.grid_kw},
                {"chargepoints", c.chargepoints},
                {"sessions", c.sessions},
                {"mean_delivered_kwh", c.mean_delivered_kwh},
                {"delivered_pct", c.delivered_pct},
                {"mean_session_delivered_pct", c.mean_session_delivered_pct},
                {"mean_effective_duration_h", c.mean_effective_duration_h},
                {"mean_supply_duration_h", c.mean_supply_duration_h},
                {"parity_pct", c.parity_pct},
                {"depleted_pct", c.depleted_pct},
                {"cycles", {{"min", c.cycles.min}, {"mean", c.cycles.mean}, {"max", c.cycles.max}}},
                {"throughput_cycles",
                 {{"min", c.throughput_cycles.min},
                  {"mean", c.throughput_cycles.mean},
                  {"max", c.throughput_cycles.max}}}};
}

json ingest_json(const IngestReport& r)
{
    return json{{"rows_read", r.rows_read},
                {"rows_rejected",
                 {{"unparseable", r.rejected.unparseable},
                  {"non_positive_duration", r.rejected.non_positive_duration},
                  {"negative_energy", r.rejected.negative_energy},
                  {"multi_connector", r.rejected.multi_connector},
                  {"total", r.rejected.total()}}},
                {"overlapping_removed", r.overlapping_removed},
                {"cps_filtered_by_speed", r.cps_filtered_by_speed},
                {"sessions_filtered_by_speed", r.sessions_filtered_by_speed},
                {"cps_retained", r.cps_retained},
                {"sessions_retained", r.sessions_retained},
                {"balanced", r.balanced()}};
}

}  // namespace

void write_sweep_csv(std::ostream& out, std::span<const SweepCell> cells)
{
    put(out,
        "pack_count,grid_kw,chargepoints,sessions,mean_delivered_kwh,delivered_pct,mean_session_delivered_pct,"
        "mean_effective_duration_h,mean_supply_duration_h,parity_pct,depleted_pct\n");
    for (const auto& c : cells)
        put(out, fmt::format("{},{},{},{},{},{},{},{},{},{},{}\n", c.pack_count, c.grid_kw, c.chargepoints,
                             c.sessions, c.mean_delivered_kwh, c.delivered_pct, c.mean_session_delivered_pct,
                             c.mean_effective_duration_h, c.mean_supply_duration_h, c.parity_pct, c.depleted_pct));
}

void write_speed_distribution_csv(std::ostream& out, const BandHistogram& max_hist, const BandHistogram& median_hist)
{
    put(out, "band_min_kw,band_max_kw,cps_with_max_rate,cps_with_median_rate\n");
    for (std::size_t i = 0; i < max_hist.counts.size(); ++i)
        put(out, fmt::format("{},{},{},{}\n", max_hist.edges[i], max_hist.edges[i + 1], max_hist.counts[i],
                             i < median_hist.counts.size() ? median_hist.counts[i] : 0));
}

void write_energy_by_speed_csv(std::ostream& out, std::span<const EnergyBand> bands)
{
    put(out, "band_min_kw,band_max_kw,sessions,median_kwh,mean_kwh\n");
    for (const auto& b : bands)
        put(out, fmt::format("{},{},{},{},{}\n", b.lo_kw, b.hi_kw, b.sessions, b.median_kwh, b.mean_kwh));
}

void write_diurnal_csv(std::ostream& out,
                       const std::array<double, 24>& starts,
                       const std::array<double, 24>& occupancy,
                       const std::array<double, 24>& energy)
{
    put(out, "hour,session_starts,occupancy_h,dispensed_kwh\n");
    for (std::size_t h = 0; h < 24; ++h)
        put(out, fmt::format("{},{},{},{}\n", h, starts[h], occupancy[h], energy[h]));
}

void write_battery_level_csv(std::ostream& out, std::span<const SweepCell> cells)
{
    std::string header = "hour";
    for (const auto& c : cells)
        header += fmt::format(",{0}_mean_kwh,{0}_sessions", cell_label(c));
    put(out, header + "\n");
    for (int h = 0; h < 24; ++h) {
        std::string line = std::to_string(h);
        for (const auto& c : cells) {
            const auto& acc = c.battery_level_by_end_hour;
            const auto n = acc.count[static_cast<std::size_t>(h)];
            line += n > 0 ? fmt::format(",{},{}", acc.mean(h), n) : fmt::format(",,0");
        }
        put(out, line + "\n");
    }
}

void write_cycle_stats_csv(std::ostream& out, std::span<const SweepCell> cells)
{
    put(out, "pack_count,grid_kw,cycles_min,cycles_mean,cycles_max,throughput_min,throughput_mean,throughput_max\n");
    for (const auto& c : cells)
        put(out, fmt::format("{},{},{},{},{},{},{},{}\n", c.pack_count, c.grid_kw, c.cycles.min, c.cycles.mean,
                             c.cycles.max, c.throughput_cycles.min, c.throughput_cycles.mean,
                             c.throughput_cycles.max));
}

void write_chargepoint_reports_csv(std::ostream& out, std::span<const SweepCell> cells)
{
    put(out,
        "pack_count,grid_kw,cp_id,session_count,mean_delivered_kwh,delivered_fraction,mean_effective_duration_h,"
        "parity_count,depleted_count,battery_cycles,throughput_cycles\n");
    for (const auto& c : cells)
        for (const auto& r : c.reports)
            put(out, fmt::format("{},{},{},{},{},{},{},{},{},{},{}\n", c.pack_count, c.grid_kw, r.cp_id,
                                 r.session_count, r.mean_delivered_kwh, r.delivered_fraction,
                                 r.mean_effective_duration_h, r.parity_count, r.depleted_count, r.battery_cycles,
                                 r.throughput_cycles));
}

std::string ingest_report_json(const IngestReport& report)
{
    return ingest_json(report).dump(2) + "\n";
}

std::string report_json(const RunTables& t, std::span<const SweepCell> cells)
{
    json speeds = json::array();
    for (std::size_t i = 0; i < t.max_speed.counts.size(); ++i)
        speeds.push_back({{"band_min_kw", edge_value(t.max_speed.edges[i])},
                          {"band_max_kw", edge_value(t.max_speed.edges[i + 1])},
                          {"cps_with_max_rate", t.max_speed.counts[i]},
                          {"cps_with_median_rate", i < t.median_speed.counts.size() ? t.median_speed.counts[i] : 0}});

    json energy = json::array();
    for (const auto& b : t.energy_by_speed)
        energy.push_back({{"band_min_kw", edge_value(b.lo_kw)},
                          {"band_max_kw", edge_value(b.hi_kw)},
                          {"sessions", b.sessions},
                          {"median_kwh", b.median_kwh},
                          {"mean_kwh", b.mean_kwh}});

    json diurnal = json::array();
    for (std::size_t h = 0; h < 24; ++h)
        diurnal.push_back({{"hour", h},
                           {"session_starts", t.starts[h]},
                           {"occupancy_h", t.occupancy[h]},
                           {"dispensed_kwh", t.dispensed[h]}});

    json sweep = json::array();
    json battery = json::object();
    for (const auto& c : cells) {
        sweep.push_back(cell_json(c));
        json bins = json::array();
        for (int h = 0; h < 24; ++h) {
            const auto n = c.battery_level_by_end_hour.count[static_cast<std::size_t>(h)];
            bins.push_back({{"hour", h},
                            {"sessions", n},
                            {"mean_kwh", n > 0 ? json(c.battery_level_by_end_hour.mean(h)) : json(nullptr)}});
        }
        battery[cell_label(c)] = std::move(bins);
    }

    const json doc{{"ingest", ingest_json(t.ingest)},
                   {"speed_distribution", std::move(speeds)},
                   {"energy_by_speed", std::move(energy)},
                   {"diurnal", std::move(diurnal)},
                   {"sweep", std::move(sweep)},
                   {"battery_level_by_end_hour", std::move(battery)},
                   {"monotonic", t.monotonicity_violations.empty()},
                   {"monotonicity_violations", t.monotonicity_violations}};
    return doc.dump(2) + "\n";
}

}  // namespace bacsim
