#include "bacsim/oracle.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "bacsim/error.hpp"

namespace bacsim {

namespace {

struct SlotLedger
{
    double stored = 0.0;
    double recharged = 0.0;
};

// Idle span split into slots of at most `step_h`.
void idle_slots(SlotLedger& ledger, double span_h, double step_h, double recharge_kw, double capacity)
{
    const auto slots = static_cast<long long>(std::ceil(span_h / step_h - 1e-12));
    for (long long k = 0; k < slots; ++k) {
        const double slot_h = std::min(step_h, span_h - static_cast<double>(k) * step_h);
        if (slot_h <= 0.0)
            break;
        const double next = std::min(capacity, ledger.stored + recharge_kw * slot_h);
        ledger.recharged += next - ledger.stored;
        ledger.stored = next;
    }
}

}  // namespace

ChargePointRun oracle_simulate(const ChargePointProfile& profile,
                               const GridFeed& grid,
                               const PackSpec& packs,
                               double initial_stored_kwh,
                               double timestep_seconds)
{
    if (!(timestep_seconds > 0.0))
        throw SimulationError(fmt::format("oracle timestep must be > 0 s, got {}", timestep_seconds));

    ChargePointRun run;
    run.final_bank = BatteryBank::with_stored(packs, initial_stored_kwh);
    run.initial_stored_kwh = initial_stored_kwh;

    const double step_h = timestep_seconds / kSecondsPerHour;
    const double grid_kw = grid.power_kw;
    const double pack_kw = packs.power_kw();
    const double capacity = packs.capacity_kwh();
    const double recharge_kw = std::min(grid_kw, pack_kw);
    const double ev_kw = profile.ev_max_kw;

    SlotLedger ledger{initial_stored_kwh, 0.0};
    const ChargingSession* previous = nullptr;

    for (const auto& session : profile.sessions) {
        if (previous != nullptr) {
            const double gap_h = (session.start_seconds() - previous->end_seconds()) / kSecondsPerHour;
            const double before = ledger.recharged;
            idle_slots(ledger, std::max(0.0, gap_h), step_h, recharge_kw, capacity);
            run.idle_recharged_kwh += ledger.recharged - before;
        }

        SessionOutcome out;
        out.event_id = session.event_id;
        out.battery_at_start_kwh = ledger.stored;
        out.active_charge_hours = session.plugin_hours;
        const double recharged_before = ledger.recharged;

        const auto slots = static_cast<long long>(std::ceil(session.plugin_hours / step_h - 1e-12));
        bool met = session.energy_kwh <= kDemandEpsilonKwh;
        if (met)
            out.active_charge_hours = 0.0;

        for (long long k = 0; k < slots; ++k) {
            const double slot_start = static_cast<double>(k) * step_h;
            const double slot_h = std::min(step_h, session.plugin_hours - slot_start);
            if (slot_h <= 0.0)
                break;

            const double b = ledger.stored;
            if (met) {
                const double next = std::min(capacity, b + recharge_kw * slot_h);
                ledger.recharged += next - b;
                ledger.stored = next;
                continue;
            }

            const double remaining = session.energy_kwh - out.delivered_kwh;
            const double ev = std::min({b + grid_kw * slot_h,
                                        (grid_kw + pack_kw) * slot_h,
                                        ev_kw * slot_h,
                                        remaining});
            const double slot_power = b > 0.0 ? std::min(ev_kw, grid_kw + pack_kw)
                                              : std::min(ev_kw, grid_kw);
            out.delivered_kwh += ev;

            if (remaining - ev <= kDemandEpsilonKwh) {
                // Demand met inside this slot: active for part, idle for the rest.
                met = true;
                const double active_h = std::min(slot_h, ev / slot_power);
                const double discharge = std::min(b, std::max(0.0, slot_power - grid_kw) * active_h);
                const double passthrough = std::min(std::max(0.0, grid_kw - slot_power), pack_kw) * active_h;
                const double after_active = std::min(capacity, b - discharge + passthrough);
                const double next = std::min(capacity, after_active + recharge_kw * (slot_h - active_h));
                out.battery_drawn_kwh += discharge;
                out.grid_to_ev_kwh += ev - discharge;
                ledger.recharged += next - (b - discharge);
                ledger.stored = next;
                out.active_charge_hours = slot_start + active_h;
                continue;
            }

            const double net = grid_kw * slot_h - ev;
            double next = 0.0;
            if (net >= 0.0) {
                next = std::min(capacity, b + std::min(net, pack_kw * slot_h));
                ledger.recharged += next - b;
                out.grid_to_ev_kwh += ev;
            } else {
                next = std::max(0.0, b + net);
                out.battery_drawn_kwh += b - next;
                out.grid_to_ev_kwh += ev - (b - next);
            }
            if (next <= 0.0 && pack_kw > 0.0 && std::min(ev_kw, grid_kw + pack_kw) > grid_kw)
                out.depleted = true;
            ledger.stored = next;
        }

        out.battery_recharged_kwh = ledger.recharged - recharged_before;
        out.battery_at_end_kwh = ledger.stored;
        run.outcomes.push_back(std::move(out));
        previous = &session;
    }

    run.final_bank.stored_kwh = ledger.stored;
    return run;
}

}  // namespace bacsim
