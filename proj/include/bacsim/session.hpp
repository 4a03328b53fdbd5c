#pragma once

#include <chrono>
#include <string>
#include <vector>

namespace bacsim {

// Session timestamps are naive wall-clock instants as recorded in the logs.
// They are stored on the system clock so that time-of-day is simply the
// seconds-since-midnight of the value.
using Timestamp = std::chrono::sys_seconds;

inline constexpr double kSecondsPerHour = 3600.0;

struct ChargingSession
{
    std::string event_id;
    Timestamp start{};
    double plugin_hours = 0.0;
    double energy_kwh = 0.0;

    double speed_kw() const { return energy_kwh / plugin_hours; }

    double start_seconds() const { return static_cast<double>(start.time_since_epoch().count()); }
    double end_seconds() const { return start_seconds() + plugin_hours * kSecondsPerHour; }
};

// One charge point: sessions sorted by start and pairwise non-overlapping.
// ev_max_kw is the fastest observed session speed, taken as the vehicle-side
// charging limit.
struct ChargePointProfile
{
    std::string cp_id;
    std::vector<ChargingSession> sessions;
    double ev_max_kw = 0.0;
};

double max_session_speed(const std::vector<ChargingSession>& sessions);

// Seconds since local midnight, as hour in [0, 24).
int hour_of_day(double seconds_since_epoch);

}  // namespace bacsim
