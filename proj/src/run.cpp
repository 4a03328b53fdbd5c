#include "bacsim/run.hpp"

#include <fstream>
#include <ostream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "bacsim/error.hpp"
#include "bacsim/report.hpp"
#include "bacsim/synth.hpp"

namespace bacsim {

namespace fs = std::filesystem;

namespace {

constexpr const char* kSyntheticCsv = "synthetic_sessions.csv";

template <typename Writer>
void write_file(const fs::path& path, Writer&& writer)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error(fmt::format("cannot create output file '{}'", path.string()));
    writer(out);
    out.flush();
    if (!out)
        throw Error(fmt::format("failed writing output file '{}'", path.string()));
}

SessionGroups load_sessions(const ScenarioConfig& config, const fs::path& staging, IngestReport& report,
                            std::ostream& progress)
{
    SessionGroups groups;
    auto sink = [&](RawSessionRecord&& r) { add_to_groups(groups, std::move(r)); };

    if (config.synth) {
        const auto path = staging / kSyntheticCsv;
        fmt::print(progress, "generating {} x {} synthetic sessions (seed {})\n", config.synth->cp_count,
                   config.synth->sessions_per_cp, config.synth->seed);
        write_file(path, [&](std::ostream& out) { generate(*config.synth, out); });
        std::ifstream in(path, std::ios::binary);
        read_csv(in, IngestOptions{}, sink, report);
        if (!config.keep_synthetic_csv) {
            in.close();
            fs::remove(path);
        }
        return groups;
    }

    const auto& ds = *config.dataset;
    std::ifstream in(ds.path, std::ios::binary);
    if (!in)
        throw IngestError(fmt::format("cannot open dataset '{}'", ds.path.string()));
    fmt::print(progress, "reading {}\n", ds.path.string());
    if (ds.kind == DatasetKind::profiles)
        return read_profile_file(in, report);
    read_csv(in, ds.ingest, sink, report);
    return groups;
}

}  // namespace

std::vector<std::string> output_files(const ScenarioConfig& config)
{
    std::vector<std::string> files{"ingest_report.json", "sweep.csv",        "speed_distribution.csv",
                                   "energy_by_speed.csv", "diurnal.csv",     "battery_level_by_end_hour.csv",
                                   "cycle_stats.csv",     "chargepoint_reports.csv", "report.json"};
    if (config.write_profiles)
        files.emplace_back("profiles.csv");
    if (config.synth && config.keep_synthetic_csv)
        files.emplace_back(kSyntheticCsv);
    return files;
}

RunSummary run(const ScenarioConfig& config, std::ostream& progress)
{
    if (const auto issues = validate(config); !issues.empty()) {
        std::string msg = "invalid configuration:";
        for (const auto& i : issues)
            msg += "\n  - " + i;
        throw ConfigError(msg);
    }

    const fs::path out_dir = config.output_dir;
    const fs::path staging = out_dir.string() + ".partial";
    fs::remove_all(staging);
    fs::create_directories(staging);

    RunSummary summary;
    summary.output_dir = out_dir;
    try {
        RunTables tables;
        auto groups = load_sessions(config, staging, tables.ingest, progress);
        tables.ingest.overlapping_removed = remove_overlaps(groups);
        tables.max_speed = speed_distribution(groups, SpeedStatistic::max, config.effective_speed_edges());
        tables.median_speed = speed_distribution(groups, SpeedStatistic::median, config.effective_speed_edges());

        auto set = infer_profiles(std::move(groups), config.effective_band());
        tables.ingest.cps_filtered_by_speed = set.cps_filtered;
        tables.ingest.sessions_filtered_by_speed = set.sessions_filtered;
        tables.ingest.cps_retained = static_cast<long long>(set.profiles.size());
        for (const auto& p : set.profiles)
            tables.ingest.sessions_retained += static_cast<long long>(p.sessions.size());
        const auto& profiles = set.profiles;
        fmt::print(progress, "{} rows read, {} charge points / {} sessions retained\n", tables.ingest.rows_read,
                   tables.ingest.cps_retained, tables.ingest.sessions_retained);

        tables.energy_by_speed = energy_by_speed(profiles, config.effective_energy_edges());
        tables.starts = diurnal_histogram(profiles, DiurnalQuantity::session_starts);
        tables.occupancy = diurnal_histogram(profiles, DiurnalQuantity::occupancy);
        tables.dispensed = diurnal_histogram(profiles, DiurnalQuantity::dispensed_energy);

        SweepOptions opts;
        opts.initial_fraction = config.initial_fraction;
        opts.parity_epsilon_kwh = config.parity_epsilon_kwh;
        opts.workers = config.workers;
        opts.on_cell = [&](const SweepCell& c) {
            fmt::print(progress, "  grid {} kW, {} packs: delivered {:.2f}%, parity {:.2f}%\n", c.grid_kw,
                       c.pack_count, c.delivered_pct, c.parity_pct);
        };
        summary.cells = sweep(profiles, config.grid_kw, config.pack_counts, config.pack_unit, opts);
        summary.monotonicity_violations = monotonicity_violations(summary.cells);
        for (const auto& v : summary.monotonicity_violations)
            fmt::print(progress, "warning: {}\n", v);
        tables.monotonicity_violations = summary.monotonicity_violations;
        summary.ingest = tables.ingest;

        const auto& cells = summary.cells;
        write_file(staging / "ingest_report.json", [&](std::ostream& o) { o << ingest_report_json(tables.ingest); });
        write_file(staging / "sweep.csv", [&](std::ostream& o) { write_sweep_csv(o, cells); });
        write_file(staging / "speed_distribution.csv",
                   [&](std::ostream& o) { write_speed_distribution_csv(o, tables.max_speed, tables.median_speed); });
        write_file(staging / "energy_by_speed.csv",
                   [&](std::ostream& o) { write_energy_by_speed_csv(o, tables.energy_by_speed); });
        write_file(staging / "diurnal.csv",
                   [&](std::ostream& o) { write_diurnal_csv(o, tables.starts, tables.occupancy, tables.dispensed); });
        write_file(staging / "battery_level_by_end_hour.csv",
                   [&](std::ostream& o) { write_battery_level_csv(o, cells); });
        write_file(staging / "cycle_stats.csv", [&](std::ostream& o) { write_cycle_stats_csv(o, cells); });
        write_file(staging / "chargepoint_reports.csv",
                   [&](std::ostream& o) { write_chargepoint_reports_csv(o, cells); });
        write_file(staging / "report.json", [&](std::ostream& o) { o << report_json(tables, cells); });
        if (config.write_profiles)
            write_file(staging / "profiles.csv", [&](std::ostream& o) { write_profile_file(o, profiles); });

        fs::create_directories(out_dir);
        for (const auto& name : output_files(config))
            fs::rename(staging / name, out_dir / name);
        fs::remove_all(staging);
    } catch (...) {
        std::error_code ec;
        fs::remove_all(staging, ec);
        throw;
    }
    return summary;
}

void print_summary(std::ostream& out, const RunSummary& s)
{
    fmt::print(out, "rows read {}, rejected {}, overlapping removed {}, charge points {} ({} filtered by speed)\n",
               s.ingest.rows_read, s.ingest.rejected.total(), s.ingest.overlapping_removed, s.ingest.cps_retained,
               s.ingest.cps_filtered_by_speed);
    fmt::print(out, "{:>8} {:>6} {:>14} {:>12} {:>12} {:>10} {:>12}\n", "grid_kw", "packs", "delivered_kwh",
               "delivered_%", "eff_dur_h", "parity_%", "cycles_mean");
    for (const auto& c : s.cells)
        fmt::print(out, "{:>8} {:>6} {:>14.2f} {:>12.2f} {:>12.3f} {:>10.2f} {:>12.2f}\n", c.grid_kw, c.pack_count,
                   c.mean_delivered_kwh, c.delivered_pct, c.mean_effective_duration_h, c.parity_pct,
                   c.cycles.mean);
    fmt::print(out, "outputs written to {}\n", s.output_dir.string());
}

ExitCode exit_code_for(const std::exception& e)
{
    if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const SynthError*>(&e))
        return ExitCode::config;
    if (dynamic_cast<const IngestError*>(&e))
        return ExitCode::dataset_io;
    if (dynamic_cast<const SimulationError*>(&e))
        return ExitCode::simulation;
    return ExitCode::internal;
}

}  // namespace bacsim
