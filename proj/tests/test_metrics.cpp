#include <doctest.h>

#include <numeric>
#include <random>

#include "bacsim/error.hpp"
#include "bacsim/metrics.hpp"
#include "test_support.hpp"

using namespace bacsim;
using bacsim::testing::kBaseUnix;
using bacsim::testing::profile_of;
using bacsim::testing::session_at;

TEST_CASE("effective duration and parity")
{
    SessionOutcome o;
    o.delivered_kwh = 10.0;
    CHECK(effective_duration(o, 7.0) == doctest::Approx(10.0 / 7.0));

    const auto s = session_at("p", 0, 1.0, 10.0);
    CHECK(parity(o, s));
    o.delivered_kwh = 10.0 - 5e-10;
    CHECK(parity(o, s));
    o.delivered_kwh = 9.99;
    CHECK_FALSE(parity(o, s));
    CHECK(parity(o, s, 0.02));
}

TEST_CASE("degenerate sweep: grid covers ev_max so everything reaches parity")
{
    std::vector<ChargePointProfile> profiles{
        profile_of({session_at("a", kBaseUnix, 2.0, 5.0), session_at("b", kBaseUnix + 9000, 3.0, 9.0)}, 3.0, "A"),
        profile_of({session_at("c", kBaseUnix, 1.0, 2.5)}, 2.5, "B")};
    const auto cells = sweep(profiles, {3.0}, {0, 3, 10}, PackSpec{});
    REQUIRE(cells.size() == 3);
    for (const auto& c : cells) {
        CHECK(c.delivered_pct == doctest::Approx(100.0));
        CHECK(c.parity_pct == 100.0);
        CHECK(c.sessions == 3);
        CHECK(c.mean_delivered_kwh == cells[0].mean_delivered_kwh);
        CHECK(c.mean_effective_duration_h == cells[0].mean_effective_duration_h);
        CHECK(c.cycles.max == 0.0);
    }
}

TEST_CASE("sweep cells are grid-major and session weighted")
{
    // A: one session, full parity. B: three sessions, none at parity.
    std::vector<ChargePointProfile> profiles{
        profile_of({session_at("a", kBaseUnix, 10.0, 1.0)}, 7.0, "A"),
        profile_of({session_at("b1", kBaseUnix, 1.0, 20.0), session_at("b2", kBaseUnix + 7200, 1.0, 20.0),
                    session_at("b3", kBaseUnix + 14400, 1.0, 20.0)},
                   7.0, "B")};
    const auto cells = sweep(profiles, {3.0, 7.0}, {0, 1}, PackSpec{});
    REQUIRE(cells.size() == 4);
    CHECK(cells[0].grid_kw == 3.0);
    CHECK(cells[0].pack_count == 0);
    CHECK(cells[1].pack_count == 1);
    CHECK(cells[2].grid_kw == 7.0);

    const auto& base = cells[0];
    CHECK(base.sessions == 4);
    CHECK(base.parity_pct == doctest::Approx(25.0));
    CHECK(base.mean_delivered_kwh == doctest::Approx((1.0 + 3 * 3.0) / 4.0));
    CHECK(base.delivered_pct == doctest::Approx(100.0 * 10.0 / 61.0));
    CHECK(base.mean_session_delivered_pct == doctest::Approx(100.0 * (1.0 + 3 * 0.15) / 4.0));
    CHECK(monotonicity_violations(cells).empty());
}

TEST_CASE("monotonicity_violations reports decreases")
{
    std::vector<SweepCell> cells(2);
    cells[0].pack_count = 0;
    cells[1].pack_count = 1;
    cells[0].delivered_pct = 90.0;
    cells[1].delivered_pct = 80.0;
    const auto v = monotonicity_violations(cells);
    REQUIRE(v.size() == 1);
    CHECK(v[0].find("delivered_pct") != std::string::npos);
}

TEST_CASE("energy_by_speed buckets by charge point ev_max")
{
    const std::vector<double> edges{0.0, 3.0, 7.0, 11.0, 22.0};
    std::vector<ChargePointProfile> one{profile_of({session_at("x", 0, 2.0, 5.0)}, 5.0)};
    const auto bands = energy_by_speed(one, edges);
    REQUIRE(bands.size() == 4);
    CHECK(bands[1].sessions == 1);
    CHECK(bands[1].median_kwh == 5.0);
    CHECK(bands[1].mean_kwh == 5.0);
    CHECK(bands[0].sessions == 0);
    CHECK(bands[0].median_kwh == 0.0);

    std::vector<ChargePointProfile> two{
        profile_of({session_at("a", 0, 2.0, 2.0), session_at("b", 9000, 2.0, 4.0)}, 7.0, "A"),
        profile_of({session_at("c", 0, 2.0, 9.0)}, 10.0, "B")};
    const auto b2 = energy_by_speed(two, edges);
    CHECK(b2[2].sessions == 3);
    CHECK(b2[2].median_kwh == 4.0);
    CHECK(b2[2].mean_kwh == doctest::Approx(5.0));
}

TEST_CASE("diurnal occupancy splits intervals across hours")
{
    // 10:30 to 12:30
    std::vector<ChargePointProfile> p{profile_of({session_at("o", kBaseUnix + 10 * 3600 + 1800, 2.0, 4.0)}, 7.0)};
    const auto occ = diurnal_histogram(p, DiurnalQuantity::occupancy);
    CHECK(occ[10] == doctest::Approx(0.5));
    CHECK(occ[11] == doctest::Approx(1.0));
    CHECK(occ[12] == doctest::Approx(0.5));
    CHECK(std::accumulate(occ.begin(), occ.end(), 0.0) == doctest::Approx(2.0));
    const auto starts = diurnal_histogram(p, DiurnalQuantity::session_starts);
    CHECK(starts[10] == 1.0);
    const auto energy = diurnal_histogram(p, DiurnalQuantity::dispensed_energy);
    CHECK(energy[10] == 4.0);

    // Wraps past midnight: 23:00 to 01:30.
    std::vector<ChargePointProfile> w{profile_of({session_at("w", kBaseUnix + 23 * 3600, 2.5, 1.0)}, 7.0)};
    const auto wrap = diurnal_histogram(w, DiurnalQuantity::occupancy);
    CHECK(wrap[23] == doctest::Approx(1.0));
    CHECK(wrap[0] == doctest::Approx(1.0));
    CHECK(wrap[1] == doctest::Approx(0.5));

    const auto empty = diurnal_histogram(std::span<const ChargePointProfile>{}, DiurnalQuantity::occupancy);
    for (const double x : empty)
        CHECK(x == 0.0);
}

TEST_CASE("diurnal occupancy mass equals total plug-in time")
{
    std::mt19937_64 rng(5);
    std::vector<ChargePointProfile> profiles;
    double total = 0.0;
    for (int i = 0; i < 30; ++i) {
        auto sc = bacsim::testing::random_scenario(rng, 6);
        for (const auto& s : sc.profile.sessions)
            total += s.plugin_hours;
        profiles.push_back(std::move(sc.profile));
    }
    const auto occ = diurnal_histogram(profiles, DiurnalQuantity::occupancy);
    CHECK(std::accumulate(occ.begin(), occ.end(), 0.0) == doctest::Approx(total).epsilon(1e-12));
}

TEST_CASE("battery level is keyed by the hour the plug-in window ends")
{
    // Ends at 14:00 with 9.5 kWh left.
    const auto profile = profile_of({session_at("b", kBaseUnix + 12 * 3600, 2.0, 10.0)}, 7.0);
    const PackSpec one{1, 13.5, 5.0};
    const auto run = simulate_chargepoint(profile, GridFeed{3.0}, one, 13.5);
    HourlyMean acc;
    accumulate_battery_level_by_end_hour(acc, profile, run.outcomes);
    CHECK(acc.count[14] == 1);
    CHECK(acc.mean(14) == doctest::Approx(9.5).epsilon(1e-12));
    CHECK(acc.mean(13) == 0.0);
    CHECK(acc.count[13] == 0);
}

TEST_CASE("cycle statistics")
{
    std::vector<ChargePointReport> reports(2);
    reports[0].battery_drawn_kwh = 27.0;
    reports[0].battery_cycles = 27.0 / 13.5;
    reports[1].battery_cycles = 1.0;
    const auto s = cycle_stats(reports);
    CHECK(s.min == 1.0);
    CHECK(s.max == 2.0);
    CHECK(s.mean == 1.5);
    CHECK(cycle_stats(std::span<const ChargePointReport>{}).mean == 0.0);

    // Two sessions drawing 13.5 kWh each with a 24 h refill in between.
    const auto profile = profile_of({session_at("1", kBaseUnix, 10.0, 24.0), session_at("2", kBaseUnix + 86400, 10.0, 24.0)},
                                    8.0);
    const PackSpec one{1, 13.5, 5.0};
    const auto run = simulate_chargepoint(profile, GridFeed{3.0}, one, 13.5);
    const auto report = summarize_chargepoint(profile, run, one, GridFeed{3.0});
    CHECK(report.battery_drawn_kwh == doctest::Approx(27.0));
    CHECK(report.battery_cycles == doctest::Approx(2.0));
    CHECK(report.battery_cycles == doctest::Approx(report.battery_drawn_kwh / one.capacity_kwh()));

    const PackSpec none{0, 13.5, 5.0};
    const auto bare = simulate_chargepoint(profile, GridFeed{3.0}, none, 0.0);
    CHECK(summarize_chargepoint(profile, bare, none, GridFeed{3.0}).battery_cycles == 0.0);
}

TEST_CASE("sweep results do not depend on worker count")
{
    std::mt19937_64 rng(17);
    std::vector<ChargePointProfile> profiles;
    for (int i = 0; i < 40; ++i) {
        auto sc = bacsim::testing::random_scenario(rng, 6);
        sc.profile.cp_id = "CP" + std::to_string(i);
        profiles.push_back(std::move(sc.profile));
    }
    SweepOptions serial, threaded;
    threaded.workers = 4;
    const auto a = sweep(profiles, {3.0, 7.0}, {0, 2, 5}, PackSpec{}, serial);
    const auto b = sweep(profiles, {3.0, 7.0}, {0, 2, 5}, PackSpec{}, threaded);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].delivered_pct == b[i].delivered_pct);
        CHECK(a[i].parity_pct == b[i].parity_pct);
        CHECK(a[i].mean_effective_duration_h == b[i].mean_effective_duration_h);
        CHECK(a[i].cycles.mean == b[i].cycles.mean);
        for (int h = 0; h < 24; ++h)
            CHECK(a[i].battery_level_by_end_hour.mean(h) == b[i].battery_level_by_end_hour.mean(h));
    }
}

TEST_CASE("sweep rejects bad options")
{
    std::vector<ChargePointProfile> profiles{profile_of({session_at("a", 0, 1.0, 1.0)}, 7.0)};
    CHECK_THROWS_AS(sweep(profiles, {}, {0}, PackSpec{}), SimulationError);
    SweepOptions bad;
    bad.initial_fraction = 1.5;
    CHECK_THROWS_AS(sweep(profiles, {3.0}, {0}, PackSpec{}, bad), SimulationError);
}
