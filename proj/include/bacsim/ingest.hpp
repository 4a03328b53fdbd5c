#pragma once

#include <functional>
#include <iosfwd>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bacsim/session.hpp"

namespace bacsim {

enum class Flavor { domestic, local_authority };
enum class DurationUnit { hours, minutes };

// Header names for each logical field.
struct ColumnMap
{
    std::string event_id = "EventID";
    std::string cp_id = "CPID";
    std::string start_date = "StartDate";
    std::string start_time = "StartTime";
    std::string end_date = "EndDate";
    std::string end_time = "EndTime";
    std::string energy = "Energy";
    std::string plugin_duration = "PluginDuration";
};

struct IngestOptions
{
    Flavor flavor = Flavor::domestic;
    ColumnMap columns;
    DurationUnit duration_unit = DurationUnit::hours;
    // Rows whose value in this column is > 1 are dropped as multi-connector.
    std::optional<std::string> connector_column;
};

struct RawSessionRecord
{
    std::string event_id;
    std::string cp_id;
    Timestamp start{};
    std::optional<Timestamp> end;
    double energy_kwh = 0.0;
    double plugin_hours = 0.0;
};

struct RejectionCounts
{
    long long unparseable = 0;
    long long non_positive_duration = 0;
    long long negative_energy = 0;
    long long multi_connector = 0;

    long long total() const { return unparseable + non_positive_duration + negative_energy + multi_connector; }
};

// Session-level accounting:
// rows_read = sessions_retained + rejected + overlapping_removed + sessions_filtered_by_speed.
struct IngestReport
{
    long long rows_read = 0;
    RejectionCounts rejected;
    long long overlapping_removed = 0;
    long long cps_filtered_by_speed = 0;
    long long sessions_filtered_by_speed = 0;
    long long cps_retained = 0;
    long long sessions_retained = 0;

    bool balanced() const
    {
        return rows_read ==
               sessions_retained + rejected.total() + overlapping_removed + sessions_filtered_by_speed;
    }
};

// Plug-in durations shorter than this are rejected as non-positive.
inline constexpr double kMinPluginHours = 1e-6;

// Half-open speed band [min_kw, max_kw).
struct SpeedBand
{
    double min_kw = 0.0;
    double max_kw = std::numeric_limits<double>::infinity();

    bool contains(double kw) const { return kw >= min_kw && kw < max_kw; }
};

SpeedBand default_band(Flavor flavor);

// Strict DD/MM/YYYY and HH:MM:SS, independent of the global locale.
std::optional<Timestamp> parse_date_time(std::string_view date, std::string_view time);

// Streams records one by one; bounded memory regardless of input size.
// Throws IngestError if the stream is unreadable or the header lacks a
// required column.
void read_csv(std::istream& in,
              const IngestOptions& options,
              const std::function<void(RawSessionRecord&&)>& sink,
              IngestReport& report);

struct ParsedCsv
{
    std::vector<RawSessionRecord> records;
    IngestReport report;
};

ParsedCsv parse_csv(std::istream& in, const IngestOptions& options);

// Per charge point, ordered by cp_id.
using SessionGroups = std::map<std::string, std::vector<ChargingSession>>;

void add_to_groups(SessionGroups& groups, RawSessionRecord&& record);
SessionGroups group_by_chargepoint(std::vector<RawSessionRecord> records);

// Sorts each group by (start, event_id) and drops every session that starts
// before the last kept session has ended. Returns the number removed.
long long remove_overlaps(SessionGroups& groups);

struct ProfileSet
{
    std::vector<ChargePointProfile> profiles;
    long long cps_filtered = 0;
    long long sessions_filtered = 0;
};

// Keeps the charge points whose maximum session speed lies within `band`.
ProfileSet infer_profiles(SessionGroups groups, const SpeedBand& band);

enum class SpeedStatistic { max, median };

// Counts in [edges[i], edges[i+1]); the last edge may be infinity.
struct BandHistogram
{
    std::vector<double> edges;
    std::vector<long long> counts;
};

BandHistogram speed_distribution(std::span<const ChargePointProfile> profiles,
                                 SpeedStatistic statistic,
                                 const std::vector<double>& edges);

BandHistogram speed_distribution(const SessionGroups& groups,
                                 SpeedStatistic statistic,
                                 const std::vector<double>& edges);

double median_session_speed(const std::vector<ChargingSession>& sessions);

// Canonical cleaned-profile file: one session per line,
// cp_id,event_id,start_unix_s,plugin_duration_h,energy_kwh with
// shortest round-trip decimals so a re-read reproduces values exactly.
void write_profile_file(std::ostream& out, std::span<const ChargePointProfile> profiles);
SessionGroups read_profile_file(std::istream& in, IngestReport& report);

const char* to_string(Flavor flavor);
const char* to_string(DurationUnit unit);

}  // namespace bacsim
