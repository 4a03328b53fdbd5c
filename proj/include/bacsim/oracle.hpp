#pragma once

#include "bacsim/charge_model.hpp"

namespace bacsim {

// Reference simulator: steps the storage ledger in fixed timeslots instead
// of solving for phase boundaries. Each slot takes the EV energy as the
// tightest of the battery+grid energy, the combined power cap, the vehicle
// cap and the remaining demand, then moves the battery by the grid surplus
// (recharge limited to pack power, stored energy clamped to capacity).
// Slots are truncated at plug-in and plug-out instants.
//
// In the slot where the demand is met, the EV is active for ev/slot_power of
// the slot and the remainder is treated as idle.
ChargePointRun oracle_simulate(const ChargePointProfile& profile,
                               const GridFeed& grid,
                               const PackSpec& packs,
                               double initial_stored_kwh,
                               double timestep_seconds = 1.0);

}  // namespace bacsim
