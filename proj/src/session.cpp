#include "bacsim/session.hpp"

#include <algorithm>
#include <cmath>

namespace bacsim {

double max_session_speed(const std::vector<ChargingSession>& sessions)
{
    double best = 0.0;
    for (const auto& s : sessions)
        best = std::max(best, s.speed_kw());
    return best;
}

int hour_of_day(double seconds_since_epoch)
{
    double tod = std::fmod(seconds_since_epoch, 86400.0);
    if (tod < 0.0)
        tod += 86400.0;
    return std::min(23, static_cast<int>(tod / kSecondsPerHour));
}

}  // namespace bacsim
