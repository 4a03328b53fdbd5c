#include "bacsim/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <deque>
#include <istream>
#include <ostream>

#include <fmt/format.h>

#include "bacsim/error.hpp"

namespace bacsim {

namespace {

std::string_view trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

// Splits one CSV line. Quoted fields may contain commas; doubled quotes
// inside them are unescaped into `scratch`, which must outlive `fields`.
void split_csv(std::string_view line, std::vector<std::string_view>& fields, std::deque<std::string>& scratch)
{
    fields.clear();
    scratch.clear();
    std::size_t pos = 0;
    while (true) {
        if (pos < line.size() && line[pos] == '"') {
            std::string value;
            bool escaped = false;
            std::size_t i = pos + 1;
            for (; i < line.size(); ++i) {
                if (line[i] == '"') {
                    if (i + 1 < line.size() && line[i + 1] == '"') {
                        value.push_back('"');
                        escaped = true;
                        ++i;
                        continue;
                    }
                    break;
                }
                value.push_back(line[i]);
            }
            const std::size_t close = i;
            std::size_t comma = line.find(',', std::min(close, line.size()));
            if (escaped) {
                scratch.push_back(std::move(value));
                fields.emplace_back(scratch.back());
            } else {
                fields.push_back(line.substr(pos + 1, close - pos - 1));
            }
            if (comma == std::string_view::npos)
                return;
            pos = comma + 1;
        } else {
            const std::size_t comma = line.find(',', pos);
            if (comma == std::string_view::npos) {
                fields.push_back(trim(line.substr(pos)));
                return;
            }
            fields.push_back(trim(line.substr(pos, comma - pos)));
            pos = comma + 1;
        }
    }
}

bool parse_int(std::string_view s, int& out)
{
    if (s.empty())
        return false;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && ptr == s.data() + s.size();
}

std::optional<double> parse_number(std::string_view s)
{
    s = trim(s);
    if (s.empty())
        return std::nullopt;
    if (s.front() == '+')
        s.remove_prefix(1);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(value))
        return std::nullopt;
    return value;
}

// "D/M/YYYY" or "DD/MM/YYYY" only.
std::optional<std::chrono::sys_days> parse_date(std::string_view s)
{
    s = trim(s);
    const auto a = s.find('/');
    const auto b = a == std::string_view::npos ? a : s.find('/', a + 1);
    if (b == std::string_view::npos)
        return std::nullopt;
    const auto d = s.substr(0, a), m = s.substr(a + 1, b - a - 1), y = s.substr(b + 1);
    if (d.size() < 1 || d.size() > 2 || m.size() < 1 || m.size() > 2 || y.size() != 4)
        return std::nullopt;
    int dd = 0, mm = 0, yy = 0;
    if (!parse_int(d, dd) || !parse_int(m, mm) || !parse_int(y, yy))
        return std::nullopt;
    const std::chrono::year_month_day ymd{std::chrono::year{yy}, std::chrono::month{static_cast<unsigned>(mm)},
                                          std::chrono::day{static_cast<unsigned>(dd)}};
    if (!ymd.ok())
        return std::nullopt;
    return std::chrono::sys_days{ymd};
}

std::optional<std::chrono::seconds> parse_time(std::string_view s)
{
    s = trim(s);
    const auto a = s.find(':');
    const auto b = a == std::string_view::npos ? a : s.find(':', a + 1);
    if (b == std::string_view::npos)
        return std::nullopt;
    const auto h = s.substr(0, a), m = s.substr(a + 1, b - a - 1), sec = s.substr(b + 1);
    if (h.size() < 1 || h.size() > 2 || m.size() != 2 || sec.size() != 2)
        return std::nullopt;
    int hh = 0, mm = 0, ss = 0;
    if (!parse_int(h, hh) || !parse_int(m, mm) || !parse_int(sec, ss))
        return std::nullopt;
    if (hh < 0 || hh > 23 || mm < 0 || mm > 59 || ss < 0 || ss > 59)
        return std::nullopt;
    return std::chrono::seconds{hh * 3600 + mm * 60 + ss};
}

struct ColumnIndex
{
    std::size_t event_id, cp_id, start_date, start_time, energy, plugin_duration;
    std::optional<std::size_t> end_date, end_time, connectors;
    std::size_t width;
};

ColumnIndex resolve_header(std::string_view header, const IngestOptions& options)
{
    if (header.size() >= 3 && header.substr(0, 3) == "\xEF\xBB\xBF")
        header.remove_prefix(3);
    std::vector<std::string_view> names;
    std::deque<std::string> scratch;
    split_csv(header, names, scratch);

    auto find = [&](const std::string& name) -> std::optional<std::size_t> {
        for (std::size_t i = 0; i < names.size(); ++i)
            if (names[i] == name)
                return i;
        return std::nullopt;
    };
    auto require = [&](const std::string& name) {
        const auto idx = find(name);
        if (!idx)
            throw IngestError(fmt::format("CSV header is missing required column '{}'", name));
        return *idx;
    };

    const auto& c = options.columns;
    ColumnIndex idx{require(c.event_id),   require(c.cp_id),  require(c.start_date),
                    require(c.start_time), require(c.energy), require(c.plugin_duration),
                    find(c.end_date),      find(c.end_time),  std::nullopt,
                    names.size()};
    if (options.connector_column)
        idx.connectors = require(*options.connector_column);
    return idx;
}

enum class RowStatus { ok, unparseable, non_positive_duration, negative_energy, multi_connector };

RowStatus parse_row(const std::vector<std::string_view>& f,
                    const ColumnIndex& idx,
                    const IngestOptions& options,
                    RawSessionRecord& rec)
{
    if (f.size() != idx.width)
        return RowStatus::unparseable;

    const auto event_id = f[idx.event_id];
    const auto cp_id = f[idx.cp_id];
    if (event_id.empty() || cp_id.empty())
        return RowStatus::unparseable;

    const auto start = parse_date_time(f[idx.start_date], f[idx.start_time]);
    const auto energy = parse_number(f[idx.energy]);
    const auto duration = parse_number(f[idx.plugin_duration]);
    if (!start || !energy || !duration)
        return RowStatus::unparseable;

    std::optional<Timestamp> end;
    if (idx.end_date && idx.end_time) {
        const auto ed = trim(f[*idx.end_date]);
        const auto et = trim(f[*idx.end_time]);
        if (!ed.empty() || !et.empty()) {
            end = parse_date_time(ed, et);
            if (!end)
                return RowStatus::unparseable;
        }
    }

    const double hours = options.duration_unit == DurationUnit::minutes ? *duration / 60.0 : *duration;
    if (!(hours >= kMinPluginHours))
        return RowStatus::non_positive_duration;
    if (*energy < 0.0)
        return RowStatus::negative_energy;

    if (idx.connectors) {
        const auto raw = trim(f[*idx.connectors]);
        if (!raw.empty()) {
            const auto count = parse_number(raw);
            if (!count)
                return RowStatus::unparseable;
            if (*count > 1.0)
                return RowStatus::multi_connector;
        }
    }

    rec.event_id.assign(event_id);
    rec.cp_id.assign(cp_id);
    rec.start = *start;
    rec.end = end;
    rec.energy_kwh = *energy;
    rec.plugin_hours = hours;
    return RowStatus::ok;
}

double median_of(std::vector<double> values)
{
    if (values.empty())
        return 0.0;
    const auto mid = values.size() / 2;
    std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
    const double upper = values[mid];
    if (values.size() % 2 == 1)
        return upper;
    const double lower = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
    return 0.5 * (lower + upper);
}

}  // namespace

SpeedBand default_band(Flavor flavor)
{
    return flavor == Flavor::domestic ? SpeedBand{3.0, 22.0} : SpeedBand{3.0, 100.0};
}

std::optional<Timestamp> parse_date_time(std::string_view date, std::string_view time)
{
    const auto d = parse_date(date);
    const auto t = parse_time(time);
    if (!d || !t)
        return std::nullopt;
    return Timestamp{*d} + *t;
}

void read_csv(std::istream& in,
              const IngestOptions& options,
              const std::function<void(RawSessionRecord&&)>& sink,
              IngestReport& report)
{
    if (!in)
        throw IngestError("dataset stream is not readable");

    std::string line;
    if (!std::getline(in, line)) {
        if (in.bad())
            throw IngestError("failed reading dataset header");
        throw IngestError("dataset is empty (no header row)");
    }
    const ColumnIndex idx = resolve_header(line, options);

    std::vector<std::string_view> fields;
    std::deque<std::string> scratch;
    RawSessionRecord rec;
    while (std::getline(in, line)) {
        if (trim(line).empty())
            continue;
        ++report.rows_read;
        split_csv(line, fields, scratch);
        switch (parse_row(fields, idx, options, rec)) {
        case RowStatus::ok:
            sink(std::move(rec));
            rec = RawSessionRecord{};
            break;
        case RowStatus::unparseable: ++report.rejected.unparseable; break;
        case RowStatus::non_positive_duration: ++report.rejected.non_positive_duration; break;
        case RowStatus::negative_energy: ++report.rejected.negative_energy; break;
        case RowStatus::multi_connector: ++report.rejected.multi_connector; break;
        }
    }
    if (in.bad())
        throw IngestError(fmt::format("read error after {} rows", report.rows_read));
}

ParsedCsv parse_csv(std::istream& in, const IngestOptions& options)
{
    ParsedCsv out;
    read_csv(in, options, [&](RawSessionRecord&& r) { out.records.push_back(std::move(r)); }, out.report);
    return out;
}

void add_to_groups(SessionGroups& groups, RawSessionRecord&& record)
{
    auto& list = groups[record.cp_id];
    list.push_back(ChargingSession{std::move(record.event_id), record.start, record.plugin_hours, record.energy_kwh});
}

SessionGroups group_by_chargepoint(std::vector<RawSessionRecord> records)
{
    SessionGroups groups;
    for (auto& r : records)
        add_to_groups(groups, std::move(r));
    return groups;
}

long long remove_overlaps(SessionGroups& groups)
{
    long long removed = 0;
    for (auto& [cp, sessions] : groups) {
        std::sort(sessions.begin(), sessions.end(), [](const ChargingSession& a, const ChargingSession& b) {
            if (a.start != b.start)
                return a.start < b.start;
            return a.event_id < b.event_id;
        });
        std::vector<ChargingSession> kept;
        kept.reserve(sessions.size());
        for (auto& s : sessions) {
            if (!kept.empty() && s.start_seconds() < kept.back().end_seconds()) {
                ++removed;
                continue;
            }
            kept.push_back(std::move(s));
        }
        sessions = std::move(kept);
    }
    return removed;
}

ProfileSet infer_profiles(SessionGroups groups, const SpeedBand& band)
{
    ProfileSet out;
    out.profiles.reserve(groups.size());
    for (auto& [cp, sessions] : groups) {
        const double ev_max = max_session_speed(sessions);
        if (sessions.empty() || !band.contains(ev_max)) {
            ++out.cps_filtered;
            out.sessions_filtered += static_cast<long long>(sessions.size());
            continue;
        }
        out.profiles.push_back(ChargePointProfile{cp, std::move(sessions), ev_max});
    }
    return out;
}

double median_session_speed(const std::vector<ChargingSession>& sessions)
{
    std::vector<double> speeds;
    speeds.reserve(sessions.size());
    for (const auto& s : sessions)
        speeds.push_back(s.speed_kw());
    return median_of(std::move(speeds));
}

namespace {

void bucket_speed(BandHistogram& hist, const std::vector<ChargingSession>& sessions, SpeedStatistic statistic)
{
    if (sessions.empty())
        return;
    const double value =
        statistic == SpeedStatistic::max ? max_session_speed(sessions) : median_session_speed(sessions);
    const auto it = std::upper_bound(hist.edges.begin(), hist.edges.end(), value);
    if (it == hist.edges.begin() || it == hist.edges.end())
        return;
    ++hist.counts[static_cast<std::size_t>(it - hist.edges.begin() - 1)];
}

}  // namespace

BandHistogram speed_distribution(std::span<const ChargePointProfile> profiles,
                                 SpeedStatistic statistic,
                                 const std::vector<double>& edges)
{
    BandHistogram hist{edges, std::vector<long long>(edges.size() > 1 ? edges.size() - 1 : 0, 0)};
    for (const auto& p : profiles)
        bucket_speed(hist, p.sessions, statistic);
    return hist;
}

BandHistogram speed_distribution(const SessionGroups& groups,
                                 SpeedStatistic statistic,
                                 const std::vector<double>& edges)
{
    BandHistogram hist{edges, std::vector<long long>(edges.size() > 1 ? edges.size() - 1 : 0, 0)};
    for (const auto& [cp, sessions] : groups)
        bucket_speed(hist, sessions, statistic);
    return hist;
}

void write_profile_file(std::ostream& out, std::span<const ChargePointProfile> profiles)
{
    out << "cp_id,event_id,start_unix_s,plugin_duration_h,energy_kwh\n";
    fmt::memory_buffer buf;
    for (const auto& p : profiles) {
        for (const auto& s : p.sessions) {
            buf.clear();
            fmt::format_to(std::back_inserter(buf), "{},{},{},{},{}\n", p.cp_id, s.event_id,
                           s.start.time_since_epoch().count(), s.plugin_hours, s.energy_kwh);
            out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
        }
    }
}

SessionGroups read_profile_file(std::istream& in, IngestReport& report)
{
    if (!in)
        throw IngestError("profile stream is not readable");
    std::string line;
    if (!std::getline(in, line) || trim(line) != "cp_id,event_id,start_unix_s,plugin_duration_h,energy_kwh")
        throw IngestError("profile file header mismatch");

    SessionGroups groups;
    std::vector<std::string_view> f;
    std::deque<std::string> scratch;
    while (std::getline(in, line)) {
        if (trim(line).empty())
            continue;
        ++report.rows_read;
        split_csv(line, f, scratch);
        long long start = 0;
        const auto hours = f.size() == 5 ? parse_number(f[3]) : std::nullopt;
        const auto energy = f.size() == 5 ? parse_number(f[4]) : std::nullopt;
        bool ok = f.size() == 5 && hours && energy && !f[0].empty() && !f[1].empty();
        if (ok) {
            const auto [ptr, ec] = std::from_chars(f[2].data(), f[2].data() + f[2].size(), start);
            ok = ec == std::errc{} && ptr == f[2].data() + f[2].size();
        }
        if (!ok) {
            ++report.rejected.unparseable;
            continue;
        }
        if (!(*hours >= kMinPluginHours)) {
            ++report.rejected.non_positive_duration;
            continue;
        }
        if (*energy < 0.0) {
            ++report.rejected.negative_energy;
            continue;
        }
        groups[std::string(f[0])].push_back(
            ChargingSession{std::string(f[1]), Timestamp{std::chrono::seconds{start}}, *hours, *energy});
    }
    return groups;
}

const char* to_string(Flavor flavor)
{
    return flavor == Flavor::domestic ? "domestic" : "local_authority";
}

const char* to_string(DurationUnit unit)
{
    return unit == DurationUnit::hours ? "hours" : "minutes";
}

}  // namespace bacsim
