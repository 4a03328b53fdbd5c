#pragma once

#include <array>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "bacsim/charge_model.hpp"
#include "bacsim/session.hpp"

namespace bacsim {

inline constexpr double kDefaultParityEpsilonKwh = 1e-9;

// delivered / ev_max: time the vehicle would need at its own maximum rate.
double effective_duration(const SessionOutcome& outcome, double ev_max_kw);

bool parity(const SessionOutcome& outcome, const ChargingSession& session,
            double epsilon_kwh = kDefaultParityEpsilonKwh);

struct ChargePointReport
{
    std::string cp_id;
    long long session_count = 0;
    double mean_delivered_kwh = 0.0;
    double delivered_fraction = 0.0;  // sum delivered / sum raw
    double mean_effective_duration_h = 0.0;
    long long parity_count = 0;
    long long depleted_count = 0;
    // Discharge-only cycles: sum battery_drawn / bank capacity.
    double battery_cycles = 0.0;
    // (discharge + recharge) / 2 / capacity, recharge including idle gaps.
    double throughput_cycles = 0.0;

    double raw_kwh = 0.0;
    double delivered_kwh = 0.0;
    double battery_drawn_kwh = 0.0;
    double battery_recharged_kwh = 0.0;
    double effective_duration_sum_h = 0.0;
    double supply_duration_sum_h = 0.0;
    double session_fraction_sum = 0.0;
};

ChargePointReport summarize_chargepoint(const ChargePointProfile& profile,
                                        const ChargePointRun& run,
                                        const PackSpec& packs,
                                        const GridFeed& grid,
                                        double parity_epsilon_kwh = kDefaultParityEpsilonKwh);

struct HourlyMean
{
    std::array<double, 24> sum{};
    std::array<long long, 24> count{};

    void add(int hour, double value)
    {
        sum[static_cast<std::size_t>(hour)] += value;
        ++count[static_cast<std::size_t>(hour)];
    }
    void merge(const HourlyMean& other);
    // 0 for empty bins; check `count` to tell them apart.
    double mean(int hour) const;
};

// Mean battery_at_end keyed by the hour in which each session's plug-in window ends.
void accumulate_battery_level_by_end_hour(HourlyMean& acc,
                                          const ChargePointProfile& profile,
                                          std::span<const SessionOutcome> outcomes);

struct CycleStats
{
    double min = 0.0;
    double mean = 0.0;
    double max = 0.0;
};

enum class CycleMeasure { discharge, throughput };

CycleStats cycle_stats(std::span<const ChargePointReport> reports, CycleMeasure measure = CycleMeasure::discharge);

struct SweepCell
{
    int pack_count = 0;
    double grid_kw = 0.0;
    long long chargepoints = 0;
    long long sessions = 0;
    double mean_delivered_kwh = 0.0;
    double delivered_pct = 0.0;               // ratio of sums
    double mean_session_delivered_pct = 0.0;  // mean of per-session ratios
    double mean_effective_duration_h = 0.0;
    // delivered / (grid + bank power): duration if the vehicle accepted the
    // charge point's full nominal output.
    double mean_supply_duration_h = 0.0;
    double parity_pct = 0.0;
    double depleted_pct = 0.0;
    CycleStats cycles;
    CycleStats throughput_cycles;
    HourlyMean battery_level_by_end_hour;
    std::vector<ChargePointReport> reports;
};

struct SweepOptions
{
    // Initial stored energy as a fraction of bank capacity.
    double initial_fraction = 1.0;
    double parity_epsilon_kwh = kDefaultParityEpsilonKwh;
    int workers = 1;
    std::function<void(const SweepCell&)> on_cell;
};

// Cells ordered grid-major, packs-minor. Aggregates are session-weighted
// over every session of every profile, summed in profile order so results do
// not depend on the worker count.
std::vector<SweepCell> sweep(std::span<const ChargePointProfile> profiles,
                             const std::vector<double>& grid_kw,
                             const std::vector<int>& pack_counts,
                             const PackSpec& unit,
                             const SweepOptions& options = {});

// Human-readable descriptions of any decrease in delivered_pct or parity_pct
// along either sweep axis.
std::vector<std::string> monotonicity_violations(const std::vector<SweepCell>& cells);

struct EnergyBand
{
    double lo_kw = 0.0;
    double hi_kw = 0.0;
    long long sessions = 0;
    double median_kwh = 0.0;
    double mean_kwh = 0.0;
};

// Raw session energy bucketed by each session's charge-point ev_max.
std::vector<EnergyBand> energy_by_speed(std::span<const ChargePointProfile> profiles,
                                        const std::vector<double>& edges);

enum class DiurnalQuantity { session_starts, occupancy, dispensed_energy };

// 24 time-of-day bins. Occupancy splits each plug-in interval across the
// hours it spans (wrapping past midnight); starts and dispensed energy are
// keyed by start hour.
std::array<double, 24> diurnal_histogram(std::span<const ChargePointProfile> profiles, DiurnalQuantity quantity);

const char* to_string(DiurnalQuantity q);

}  // namespace bacsim
