#include <doctest.h>

#include <random>

#include "bacsim/charge_model.hpp"
#include "bacsim/error.hpp"
#include "bacsim/oracle.hpp"
#include "test_support.hpp"

using namespace bacsim;
using bacsim::testing::profile_of;
using bacsim::testing::session_at;

namespace {

const PackSpec kOnePack{1, 13.5, 5.0};

// 1 s stepping of an idle bank, independent of simulate_idle.
double stepped_idle(double stored, double capacity, double grid_kw, double pack_kw, double hours)
{
    const int steps = static_cast<int>(hours * 3600.0 + 0.5);
    for (int i = 0; i < steps; ++i)
        stored = std::min(capacity, stored + std::min(grid_kw, pack_kw) / 3600.0);
    return stored;
}

}  // namespace

TEST_CASE("max_deliverable_power honours grid, bank and vehicle caps")
{
    CHECK(max_deliverable_power(BatteryBank::full(kOnePack), GridFeed{3.0}, 7.0) == 7.0);
    CHECK(max_deliverable_power(BatteryBank::with_stored(kOnePack, 0.0), GridFeed{3.0}, 7.0) == 3.0);
    CHECK(max_deliverable_power(BatteryBank::full({10, 13.5, 5.0}), GridFeed{3.0}, 50.0) == 50.0);
    CHECK(max_deliverable_power(BatteryBank::full({1, 13.5, 5.0}), GridFeed{3.0}, 50.0) == 8.0);
}

TEST_CASE("simulate_idle recharges at min(grid, pack power) up to capacity")
{
    CHECK(simulate_idle(BatteryBank::with_stored(kOnePack, 0.0), GridFeed{3.0}, 2.0).stored_kwh ==
          doctest::Approx(6.0).epsilon(1e-12));
    CHECK(simulate_idle(BatteryBank::with_stored(kOnePack, 13.0), GridFeed{3.0}, 2.0).stored_kwh == 13.5);

    const PackSpec two{2, 13.5, 5.0};
    const double oracle = stepped_idle(0.0, 27.0, 12.0, 10.0, 1.0);
    CHECK(oracle == doctest::Approx(10.0).epsilon(1e-9));
    CHECK(simulate_idle(BatteryBank::with_stored(two, 0.0), GridFeed{12.0}, 1.0).stored_kwh ==
          doctest::Approx(oracle).epsilon(1e-9));

    CHECK(simulate_idle(BatteryBank::with_stored({0, 13.5, 5.0}, 0.0), GridFeed{3.0}, 5.0).stored_kwh == 0.0);
    CHECK_THROWS_AS(simulate_idle(BatteryBank::full(kOnePack), GridFeed{3.0}, -1.0), SimulationError);
}

TEST_CASE("simulate_session closed-form phases")
{
    SUBCASE("grid alone suffices")
    {
        const auto r = simulate_session(BatteryBank::with_stored({0, 13.5, 5.0}, 0.0), GridFeed{3.0},
                                        session_at("a", 0, 5.0, 10.0), 7.0);
        CHECK(r.outcome.delivered_kwh == doctest::Approx(10.0).epsilon(1e-12));
        CHECK(r.outcome.active_charge_hours == doctest::Approx(10.0 / 3.0).epsilon(1e-12));
        CHECK(r.outcome.battery_drawn_kwh == 0.0);
        CHECK_FALSE(r.outcome.depleted);
    }
    SUBCASE("battery boost then idle recharge")
    {
        const auto r = simulate_session(BatteryBank::full(kOnePack), GridFeed{3.0}, session_at("b", 0, 2.0, 10.0), 7.0);
        CHECK(std::abs(r.outcome.delivered_kwh - 10.0) <= 1e-9);
        CHECK(std::abs(r.outcome.active_charge_hours - 10.0 / 7.0) <= 1e-9);
        CHECK(std::abs(r.outcome.battery_drawn_kwh - 40.0 / 7.0) <= 1e-9);
        CHECK(std::abs(r.outcome.battery_at_end_kwh - 9.5) <= 1e-9);
        CHECK(r.bank.stored_kwh == r.outcome.battery_at_end_kwh);

        const auto oracle = oracle_simulate(profile_of({session_at("b", 0, 2.0, 10.0)}, 7.0), GridFeed{3.0},
                                            kOnePack, 13.5, 1.0);
        CHECK(std::abs(oracle.outcomes[0].delivered_kwh - 10.0) <= 1e-6);
        CHECK(std::abs(oracle.outcomes[0].battery_at_end_kwh - 9.5) <= 1e-4);
    }
    SUBCASE("short window misses parity without depleting")
    {
        const auto r = simulate_session(BatteryBank::full(kOnePack), GridFeed{3.0}, session_at("c", 0, 0.5, 40.0), 50.0);
        CHECK(std::abs(r.outcome.delivered_kwh - 4.0) <= 1e-9);
        CHECK(std::abs(r.outcome.battery_drawn_kwh - 2.5) <= 1e-9);
        CHECK(r.outcome.active_charge_hours == 0.5);
        CHECK_FALSE(r.outcome.depleted);
    }
    SUBCASE("battery empties mid-session")
    {
        // 2 kWh stored, 5 kW discharge: empty after 0.4 h, then 3 kW for 0.6 h.
        const auto r = simulate_session(BatteryBank::with_stored(kOnePack, 2.0), GridFeed{3.0},
                                        session_at("d", 0, 1.0, 40.0), 50.0);
        CHECK(std::abs(r.outcome.delivered_kwh - (8.0 * 0.4 + 3.0 * 0.6)) <= 1e-9);
        CHECK(r.outcome.battery_at_end_kwh == 0.0);
        CHECK(r.outcome.depleted);
    }
    SUBCASE("pass-through recharges while the vehicle draws below grid power")
    {
        // EV at 2 kW for 2 h from a 3 kW grid: 1 kW surplus into the bank.
        const auto r = simulate_session(BatteryBank::with_stored(kOnePack, 5.0), GridFeed{3.0},
                                        session_at("e", 0, 2.0, 4.0), 2.0);
        CHECK(std::abs(r.outcome.delivered_kwh - 4.0) <= 1e-9);
        CHECK(std::abs(r.outcome.battery_at_end_kwh - 7.0) <= 1e-9);
    }
    SUBCASE("zero-energy session is pure idle")
    {
        const auto r = simulate_session(BatteryBank::with_stored(kOnePack, 10.0), GridFeed{3.0},
                                        session_at("f", 0, 1.0, 0.0), 7.0);
        CHECK(r.outcome.delivered_kwh == 0.0);
        CHECK(r.outcome.active_charge_hours == 0.0);
        CHECK(r.outcome.battery_at_end_kwh == doctest::Approx(13.0).epsilon(1e-12));
    }
}

TEST_CASE("simulate_session rejects corrupt sessions")
{
    const auto bank = BatteryBank::full(kOnePack);
    CHECK_THROWS_AS(simulate_session(bank, GridFeed{3.0}, session_at("x", 0, 0.0, 1.0), 7.0), SimulationError);
    CHECK_THROWS_AS(simulate_session(bank, GridFeed{3.0}, session_at("x", 0, -1.0, 1.0), 7.0), SimulationError);
    CHECK_THROWS_AS(simulate_session(bank, GridFeed{3.0}, session_at("x", 0, 1.0, -0.5), 7.0), SimulationError);
    CHECK_THROWS_AS(BatteryBank::with_stored(kOnePack, 14.0), SimulationError);
    CHECK_THROWS_AS(BatteryBank::with_stored({1, 13.5, 0.0}, 0.0), SimulationError);
}

TEST_CASE("simulate_chargepoint threads battery state across sessions")
{
    SUBCASE("a day of idle refills the bank between identical sessions")
    {
        const auto p = profile_of({session_at("s1", 0, 2.0, 10.0), session_at("s2", 24 * 3600, 2.0, 10.0)}, 7.0);
        const auto run = simulate_chargepoint(p, GridFeed{3.0}, kOnePack, 13.5);
        REQUIRE(run.outcomes.size() == 2);
        const auto single = simulate_session(BatteryBank::full(kOnePack), GridFeed{3.0}, p.sessions[0], 7.0);
        for (const auto& o : run.outcomes) {
            CHECK(std::abs(o.delivered_kwh - single.outcome.delivered_kwh) <= 1e-9);
            CHECK(std::abs(o.battery_at_end_kwh - 9.5) <= 1e-9);
        }
        CHECK(run.outcomes[1].battery_at_start_kwh == 13.5);
        CHECK(run.idle_recharged_kwh == doctest::Approx(4.0).epsilon(1e-9));
    }
    SUBCASE("empty profile leaves the bank untouched")
    {
        const auto run = simulate_chargepoint(profile_of({}, 7.0), GridFeed{3.0}, kOnePack, 6.0);
        CHECK(run.outcomes.empty());
        CHECK(run.final_bank.stored_kwh == 6.0);
    }
    SUBCASE("no packs is pure grid charging")
    {
        std::mt19937_64 rng(3);
        for (int i = 0; i < 200; ++i) {
            auto sc = bacsim::testing::random_scenario(rng);
            const auto run = simulate_chargepoint(sc.profile, sc.grid, {0, 13.5, 5.0}, 0.0);
            for (std::size_t k = 0; k < run.outcomes.size(); ++k) {
                const auto& s = sc.profile.sessions[k];
                const double expect =
                    std::min({s.energy_kwh, std::min(sc.grid.power_kw, sc.profile.ev_max_kw) * s.plugin_hours});
                CHECK(std::abs(run.outcomes[k].delivered_kwh - expect) <= 1e-9);
            }
        }
    }
    SUBCASE("overlapping sessions are rejected with charge point context")
    {
        const auto p = profile_of({session_at("s1", 0, 2.0, 1.0), session_at("s2", 3600, 2.0, 1.0)}, 7.0, "CPX");
        try {
            simulate_chargepoint(p, GridFeed{3.0}, kOnePack, 0.0);
            FAIL("expected SimulationError");
        } catch (const SimulationError& e) {
            CHECK(std::string(e.what()).find("CPX") != std::string::npos);
        }
    }
}

TEST_CASE("charge model properties on random scenarios")
{
    std::mt19937_64 rng(11);
    for (int i = 0; i < 300; ++i) {
        const auto sc = bacsim::testing::random_scenario(rng);
        const auto run = simulate_chargepoint(sc.profile, sc.grid, sc.packs, sc.initial_stored_kwh);
        CHECK(bacsim::testing::ledger_violation(run, sc.packs).empty());

        double elapsed_h = 0.0, delivered = 0.0;
        const auto& ss = sc.profile.sessions;
        elapsed_h = (ss.back().end_seconds() - ss.front().start_seconds()) / 3600.0;
        for (std::size_t k = 0; k < run.outcomes.size(); ++k) {
            const auto& o = run.outcomes[k];
            const auto& s = ss[k];
            delivered += o.delivered_kwh;
            CHECK(o.delivered_kwh >= 0.0);
            CHECK(o.delivered_kwh <= s.energy_kwh + 1e-9);
            CHECK(o.active_charge_hours <= s.plugin_hours);
            CHECK(o.delivered_kwh <= sc.profile.ev_max_kw * s.plugin_hours + 1e-9);
            CHECK(o.delivered_kwh <= sc.grid.power_kw * s.plugin_hours + o.battery_at_start_kwh + 1e-9);
        }
        CHECK(delivered <= sc.initial_stored_kwh + sc.grid.power_kw * elapsed_h + 1e-9);

        // Bit-identical on replay.
        const auto again = simulate_chargepoint(sc.profile, sc.grid, sc.packs, sc.initial_stored_kwh);
        for (std::size_t k = 0; k < run.outcomes.size(); ++k) {
            CHECK(again.outcomes[k].delivered_kwh == run.outcomes[k].delivered_kwh);
            CHECK(again.outcomes[k].battery_at_end_kwh == run.outcomes[k].battery_at_end_kwh);
        }
    }
}

TEST_CASE("single-session delivery is monotone in packs and grid power")
{
    std::mt19937_64 rng(5);
    for (int i = 0; i < 300; ++i) {
        auto sc = bacsim::testing::random_scenario(rng, 1);
        double prev = -1.0;
        for (int packs = 0; packs <= 10; ++packs) {
            const PackSpec spec{packs, 13.5, 5.0};
            const auto run = simulate_chargepoint(sc.profile, sc.grid, spec, spec.capacity_kwh());
            CHECK(run.outcomes[0].delivered_kwh + 1e-12 >= prev);
            prev = run.outcomes[0].delivered_kwh;
        }
        const auto low = simulate_chargepoint(sc.profile, GridFeed{3.0}, sc.packs, sc.packs.capacity_kwh());
        const auto high = simulate_chargepoint(sc.profile, GridFeed{7.0}, sc.packs, sc.packs.capacity_kwh());
        CHECK(high.outcomes[0].delivered_kwh + 1e-12 >= low.outcomes[0].delivered_kwh);
    }
}

TEST_CASE("charge point totals are monotone in packs")
{
    std::mt19937_64 rng(17);
    for (int i = 0; i < 200; ++i) {
        const auto sc = bacsim::testing::random_scenario(rng, 12);
        double prev = -1.0;
        for (int packs = 0; packs <= 10; ++packs) {
            const PackSpec spec{packs, 13.5, 5.0};
            const auto run = simulate_chargepoint(sc.profile, sc.grid, spec, spec.capacity_kwh());
            double total = 0.0;
            for (const auto& o : run.outcomes)
                total += o.delivered_kwh;
            CHECK(total + 1e-9 >= prev);
            prev = total;
        }
    }
}

TEST_CASE("grid at or above ev_max makes packs irrelevant")
{
    std::mt19937_64 rng(23);
    for (int i = 0; i < 100; ++i) {
        auto sc = bacsim::testing::random_scenario(rng);
        sc.profile.ev_max_kw = std::min(sc.profile.ev_max_kw, sc.grid.power_kw);
        const auto base = simulate_chargepoint(sc.profile, sc.grid, {0, 13.5, 5.0}, 0.0);
        for (int packs = 1; packs <= 10; packs += 3) {
            const PackSpec spec{packs, 13.5, 5.0};
            const auto run = simulate_chargepoint(sc.profile, sc.grid, spec, spec.capacity_kwh() * 0.3);
            for (std::size_t k = 0; k < run.outcomes.size(); ++k) {
                const auto& s = sc.profile.sessions[k];
                CHECK(run.outcomes[k].delivered_kwh == base.outcomes[k].delivered_kwh);
                CHECK(std::abs(run.outcomes[k].delivered_kwh -
                               std::min(s.energy_kwh, sc.profile.ev_max_kw * s.plugin_hours)) <= 1e-9);
            }
        }
    }
}
