#pragma once

#include <array>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "bacsim/ingest.hpp"
#include "bacsim/metrics.hpp"

namespace bacsim {

// CSV writers. Numbers use shortest round-trip formatting so identical runs
// produce identical bytes.
void write_sweep_csv(std::ostream& out, std::span<const SweepCell> cells);
void write_speed_distribution_csv(std::ostream& out, const BandHistogram& max_hist, const BandHistogram& median_hist);
void write_energy_by_speed_csv(std::ostream& out, std::span<const EnergyBand> bands);
void write_diurnal_csv(std::ostream& out,
                       const std::array<double, 24>& starts,
                       const std::array<double, 24>& occupancy,
                       const std::array<double, 24>& energy);
void write_battery_level_csv(std::ostream& out, std::span<const SweepCell> cells);
void write_cycle_stats_csv(std::ostream& out, std::span<const SweepCell> cells);
void write_chargepoint_reports_csv(std::ostream& out, std::span<const SweepCell> cells);

std::string ingest_report_json(const IngestReport& report);

struct RunTables
{
    IngestReport ingest;
    BandHistogram max_speed;
    BandHistogram median_speed;
    std::vector<EnergyBand> energy_by_speed;
    std::array<double, 24> starts{};
    std::array<double, 24> occupancy{};
    std::array<double, 24> dispensed{};
    std::vector<std::string> monotonicity_violations;
};

// Everything in one structured document, with table sections mirroring the CSVs.
std::string report_json(const RunTables& tables, std::span<const SweepCell> cells);

}  // namespace bacsim
