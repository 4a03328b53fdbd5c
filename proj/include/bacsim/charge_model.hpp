#pragma once

#include <string>
#include <vector>

#include "bacsim/session.hpp"

namespace bacsim {

// Configuration of one storage unit; the bank is `pack_count` of these in parallel.
struct PackSpec
{
    int pack_count = 0;
    double pack_capacity_kwh = 13.5;
    double pack_power_kw = 5.0;

    double capacity_kwh() const { return pack_count * pack_capacity_kwh; }
    double power_kw() const { return pack_count * pack_power_kw; }
};

// Stationary storage at the charge point. Invariant: 0 <= stored <= capacity.
struct BatteryBank
{
    int pack_count = 0;
    double pack_capacity_kwh = 13.5;
    double pack_power_kw = 5.0;
    double stored_kwh = 0.0;

    static BatteryBank full(const PackSpec& spec);
    static BatteryBank with_stored(const PackSpec& spec, double stored_kwh);

    PackSpec spec() const { return {pack_count, pack_capacity_kwh, pack_power_kw}; }
    double capacity_kwh() const { return pack_count * pack_capacity_kwh; }
    double power_kw() const { return pack_count * pack_power_kw; }
    // Sustained recharge rate; pack power is symmetric for charge and discharge.
    double recharge_limit_kw(double grid_kw) const;
};

struct GridFeed
{
    double power_kw = 3.0;
};

struct SessionOutcome
{
    std::string event_id;
    double delivered_kwh = 0.0;
    double active_charge_hours = 0.0;
    double battery_drawn_kwh = 0.0;
    double battery_at_start_kwh = 0.0;
    double battery_at_end_kwh = 0.0;
    // Battery was empty while the vehicle still wanted more than the grid alone supplies.
    bool depleted = false;

    // Ledger terms: delivered = grid_to_ev + battery_drawn, and
    // at_end - at_start = battery_recharged - battery_drawn.
    double grid_to_ev_kwh = 0.0;
    double battery_recharged_kwh = 0.0;
};

struct ChargePointRun
{
    std::vector<SessionOutcome> outcomes;
    BatteryBank final_bank;
    double initial_stored_kwh = 0.0;
    // Energy put into the bank during the gaps between sessions.
    double idle_recharged_kwh = 0.0;
};

double max_deliverable_power(const BatteryBank& bank, const GridFeed& grid, double ev_max_kw);

BatteryBank simulate_idle(BatteryBank bank, const GridFeed& grid, double hours);

struct SessionResult
{
    SessionOutcome outcome;
    BatteryBank bank;
};

// Replays one plug-in window as piecewise-constant power phases. Phase
// boundaries are the battery emptying or filling, the demand being met and
// the end of the plug-in window; after the demand is met the rest of the
// window is idle time.
SessionResult simulate_session(BatteryBank bank,
                               const GridFeed& grid,
                               const ChargingSession& session,
                               double ev_max_kw);

ChargePointRun simulate_chargepoint(const ChargePointProfile& profile,
                                    const GridFeed& grid,
                                    const PackSpec& packs,
                                    double initial_stored_kwh);

// Energy below this is treated as zero when deciding whether the demand is met.
inline constexpr double kDemandEpsilonKwh = 1e-9;

}  // namespace bacsim
