#include "bacsim/charge_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "bacsim/error.hpp"

namespace bacsim {

namespace {

void check_pack_spec(const PackSpec& spec)
{
    if (spec.pack_count < 0)
        throw SimulationError(fmt::format("pack_count must be >= 0, got {}", spec.pack_count));
    if (!(spec.pack_capacity_kwh > 0.0) || !std::isfinite(spec.pack_capacity_kwh))
        throw SimulationError(fmt::format("pack capacity must be > 0 kWh, got {}", spec.pack_capacity_kwh));
    if (!(spec.pack_power_kw > 0.0) || !std::isfinite(spec.pack_power_kw))
        throw SimulationError(fmt::format("pack power must be > 0 kW, got {}", spec.pack_power_kw));
}

void check_bank(const BatteryBank& bank)
{
    check_pack_spec(bank.spec());
    if (!(bank.stored_kwh >= 0.0) || bank.stored_kwh > bank.capacity_kwh())
        throw SimulationError(fmt::format("stored energy {} kWh outside [0, {}]", bank.stored_kwh,
                                          bank.capacity_kwh()));
}

void check_grid(const GridFeed& grid)
{
    if (!(grid.power_kw > 0.0) || !std::isfinite(grid.power_kw))
        throw SimulationError(fmt::format("grid power must be > 0 kW, got {}", grid.power_kw));
}

void check_ev_max(double ev_max_kw)
{
    if (!(ev_max_kw > 0.0) || !std::isfinite(ev_max_kw))
        throw SimulationError(fmt::format("EV max power must be > 0 kW, got {}", ev_max_kw));
}

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

BatteryBank BatteryBank::full(const PackSpec& spec)
{
    return with_stored(spec, spec.capacity_kwh());
}

BatteryBank BatteryBank::with_stored(const PackSpec& spec, double stored_kwh)
{
    BatteryBank bank{spec.pack_count, spec.pack_capacity_kwh, spec.pack_power_kw, stored_kwh};
    check_bank(bank);
    return bank;
}

double BatteryBank::recharge_limit_kw(double grid_kw) const
{
    return std::min(grid_kw, power_kw());
}

double max_deliverable_power(const BatteryBank& bank, const GridFeed& grid, double ev_max_kw)
{
    if (bank.stored_kwh > 0.0)
        return std::min(ev_max_kw, grid.power_kw + bank.power_kw());
    return std::min(ev_max_kw, grid.power_kw);
}

BatteryBank simulate_idle(BatteryBank bank, const GridFeed& grid, double hours)
{
    if (!(hours >= 0.0))
        throw SimulationError(fmt::format("idle duration must be >= 0 h, got {}", hours));
    const double rate = bank.recharge_limit_kw(grid.power_kw);
    bank.stored_kwh = std::min(bank.capacity_kwh(), bank.stored_kwh + rate * hours);
    return bank;
}

SessionResult simulate_session(BatteryBank bank,
                               const GridFeed& grid,
                               const ChargingSession& session,
                               double ev_max_kw)
{
    check_bank(bank);
    check_grid(grid);
    check_ev_max(ev_max_kw);
    if (!(session.plugin_hours > 0.0) || !std::isfinite(session.plugin_hours))
        throw SimulationError(fmt::format("session {}: plugin duration must be > 0 h, got {}",
                                          session.event_id, session.plugin_hours));
    if (!(session.energy_kwh >= 0.0) || !std::isfinite(session.energy_kwh))
        throw SimulationError(fmt::format("session {}: energy must be >= 0 kWh, got {}",
                                          session.event_id, session.energy_kwh));

    const double grid_kw = grid.power_kw;
    const double capacity = bank.capacity_kwh();
    const double pack_power = bank.power_kw();

    SessionOutcome out;
    out.event_id = session.event_id;
    out.battery_at_start_kwh = bank.stored_kwh;

    double t = 0.0;
    double stored = bank.stored_kwh;
    bool demand_met = session.energy_kwh <= kDemandEpsilonKwh;

    // At most two active phases (battery-assisted, then grid-only once the
    // bank is empty) followed by idle time.
    while (!demand_met && t < session.plugin_hours) {
        const double remaining = session.energy_kwh - out.delivered_kwh;
        const double rate = stored > 0.0 ? std::min(ev_max_kw, grid_kw + pack_power)
                                         : std::min(ev_max_kw, grid_kw);
        const double discharge = std::max(0.0, rate - grid_kw);
        const double charge = (rate < grid_kw && stored < capacity)
                                  ? std::min(grid_kw - rate, pack_power)
                                  : 0.0;

        if (stored <= 0.0 && pack_power > 0.0 && std::min(ev_max_kw, grid_kw + pack_power) > grid_kw)
            out.depleted = true;

        // Filling the bank does not change the vehicle's rate, so it is not a
        // phase boundary; the pass-through gain is clamped at capacity instead.
        const double to_demand = remaining / rate;
        const double to_window = session.plugin_hours - t;
        const double to_empty = discharge > 0.0 ? stored / discharge : kInf;
        const double dt = std::min({to_demand, to_window, to_empty});

        out.delivered_kwh += rate * dt;
        out.grid_to_ev_kwh += std::min(rate, grid_kw) * dt;
        out.battery_drawn_kwh += discharge * dt;
        if (charge > 0.0) {
            const double gained = std::min(capacity - stored, charge * dt);
            out.battery_recharged_kwh += gained;
            stored += gained;
        }
        stored -= discharge * dt;
        t += dt;

        if (dt == to_empty)
            stored = 0.0;
        stored = std::clamp(stored, 0.0, capacity);
        if (dt == to_window)
            t = session.plugin_hours;

        if (dt == to_demand || session.energy_kwh - out.delivered_kwh <= kDemandEpsilonKwh)
            demand_met = true;
        else if (dt == to_empty)
            out.depleted = true;
    }

    out.active_charge_hours = demand_met ? t : session.plugin_hours;

    bank.stored_kwh = stored;
    if (t < session.plugin_hours) {
        const double before = bank.stored_kwh;
        bank = simulate_idle(bank, grid, session.plugin_hours - t);
        out.battery_recharged_kwh += bank.stored_kwh - before;
    }
    out.battery_at_end_kwh = bank.stored_kwh;
    return {std::move(out), bank};
}

ChargePointRun simulate_chargepoint(const ChargePointProfile& profile,
                                    const GridFeed& grid,
                                    const PackSpec& packs,
                                    double initial_stored_kwh)
{
    ChargePointRun run;
    try {
        check_grid(grid);
        run.final_bank = BatteryBank::with_stored(packs, initial_stored_kwh);
        run.initial_stored_kwh = initial_stored_kwh;
        run.outcomes.reserve(profile.sessions.size());

        const ChargingSession* previous = nullptr;
        for (const auto& session : profile.sessions) {
            if (previous != nullptr) {
                const double gap_h =
                    (session.start_seconds() - previous->end_seconds()) / kSecondsPerHour;
                if (gap_h < -1e-9)
                    throw SimulationError(fmt::format("session {} overlaps session {}",
                                                      session.event_id, previous->event_id));
                const double before = run.final_bank.stored_kwh;
                run.final_bank = simulate_idle(run.final_bank, grid, std::max(0.0, gap_h));
                run.idle_recharged_kwh += run.final_bank.stored_kwh - before;
            }
            auto result = simulate_session(run.final_bank, grid, session, profile.ev_max_kw);
            run.final_bank = result.bank;
            run.outcomes.push_back(std::move(result.outcome));
            previous = &session;
        }
    } catch (const SimulationError& e) {
        throw SimulationError(fmt::format("charge point {}: {}", profile.cp_id, e.what()));
    }
    return run;
}

}  // namespace bacsim
