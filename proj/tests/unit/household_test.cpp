#include "doctest.h"
#include "oracles.hpp"

#include "prosumage/errors.hpp"
#include "prosumage/household.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

using namespace prosumage;

namespace {

const double kEta = std::sqrt(0.92);

// Stylised household: flat base load with an evening peak and a clear-sky PV
// yield that is longer in summer.
ProfileSet test_profile(double load_scale = 1.0, double evening_peak = 0.6) {
    std::vector<double> demand(17520), pv(17520);
    for (std::size_t i = 0; i < demand.size(); ++i) {
        const double day = static_cast<double>(i / 48);
        const double hour = (i % 48) * 0.5 + 0.25;
        const double season = std::cos(2.0 * std::numbers::pi * (day - 15.0) / 365.0);
        const double evening = std::exp(-0.5 * std::pow((hour - 19.0) / 1.5, 2));
        demand[i] = load_scale * (0.15 + evening_peak * evening * 0.5);
        const double length = 12.0 + 2.0 * season;
        const double x = (hour - (12.0 - length / 2.0)) / length;
        pv[i] = (x > 0.0 && x < 1.0) ? 0.4 * std::sin(std::numbers::pi * x) * (0.85 + 0.15 * season) : 0.0;
    }
    return {"T", TimeSeries(2030, 30, demand, Unit::KWhPerStep), TimeSeries(2030, 30, pv, Unit::KWhPerKWpPerStep)};
}

CostCurves test_costs(double multiplier = 1.0) {
    std::map<int, double> pv, bat;
    for (int y = 2019; y <= 2045; ++y) {
        pv[y] = multiplier * 1656.41 * std::pow(0.955, y - 2019);
        bat[y] = multiplier * 1605.48 * std::pow(0.93, y - 2019);
    }
    return CostCurves::from_raw(pv, bat);
}

EconomicContext test_econ(double fit, double cost_multiplier = 1.0) {
    EconomicContext econ;
    econ.tariff.fit_fraction = fit;
    econ.costs = test_costs(cost_multiplier);
    return econ;
}

oracle::Household to_oracle(const ProfileSet& p, const HouseholdState& s = {}) {
    oracle::Household h;
    h.demand.assign(p.demand.values().begin(), p.demand.values().end());
    h.pv_yield.assign(p.pv_yield.values().begin(), p.pv_yield.values().end());
    for (const auto& v : s.pv) h.pv.push_back({v.install_year, v.capacity});
    for (const auto& v : s.battery) h.battery.push_back({v.install_year, v.capacity});
    return h;
}

oracle::Prices to_oracle(const CostCurves& c) { return {c.pv(), c.battery()}; }

}  // namespace

TEST_CASE("dispatch step: surplus charges up to the inverter limit, rest exported") {
    double soc = 3.0;
    const auto s = dispatch_step(2.0, 0.5, soc, 6.0, 2.4 * 0.5, kEta);
    CHECK(s.self_consumption == doctest::Approx(0.5));
    CHECK(s.battery_charge_ac == doctest::Approx(1.2));
    CHECK(soc == doctest::Approx(4.1510).epsilon(1e-4));
    CHECK(soc == doctest::Approx(3.0 + 1.2 * 0.9591663));
    CHECK(s.grid_export == doctest::Approx(0.3));
    CHECK(s.grid_import == 0.0);
}

TEST_CASE("dispatch step: deficit drains the battery, rest imported") {
    double soc = 0.2;
    const auto s = dispatch_step(0.0, 1.0, soc, 6.0, 1.2, kEta);
    CHECK(s.battery_discharge_ac == doctest::Approx(0.19183).epsilon(1e-4));
    CHECK(s.grid_import == doctest::Approx(0.80817).epsilon(1e-4));
    CHECK(soc == doctest::Approx(0.0));
}

TEST_CASE("dispatch step: no PV and no battery passes demand through") {
    double soc = 0.0;
    const auto s = dispatch_step(0.0, 0.7, soc, 0.0, 0.0, kEta);
    CHECK(s.grid_import == 0.7);
    CHECK(s.self_consumption == 0.0);
    CHECK(s.grid_export == 0.0);
    CHECK(s.battery_charge_ac == 0.0);
    CHECK(s.battery_discharge_ac == 0.0);
}

TEST_CASE("dispatch step balances hold over random steps") {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 10000; ++i) {
        const double usable = u(rng) < 0.2 ? 0.0 : 15.0 * u(rng);
        double soc = usable * u(rng);
        const double before = soc;
        const double pv = u(rng) < 0.3 ? 0.0 : 3.0 * u(rng);
        const double load = 2.0 * u(rng);
        const double limit = usable / 2.5 * 0.5;
        const auto s = dispatch_step(pv, load, soc, usable, limit, kEta);
        REQUIRE(std::abs(pv - (s.self_consumption + s.battery_charge_ac + s.grid_export)) <= 1e-9);
        REQUIRE(std::abs(load - (s.self_consumption + s.battery_discharge_ac + s.grid_import)) <= 1e-9);
        REQUIRE(std::abs(soc - (before + s.battery_charge_ac * kEta - s.battery_discharge_ac / kEta)) <= 1e-9);
        REQUIRE(soc >= 0.0);
        REQUIRE(soc <= usable + 1e-12);
        REQUIRE(s.battery_charge_ac <= limit + 1e-12);
        REQUIRE(s.battery_discharge_ac <= limit + 1e-12);
        REQUIRE(s.grid_import >= 0.0);
        REQUIRE(s.grid_export >= 0.0);
        // Never charge and discharge in the same step.
        REQUIRE(s.battery_charge_ac * s.battery_discharge_ac == 0.0);
    }
}

TEST_CASE("annual battery roundtrip equals 0.92 when the battery ends empty") {
    // An overcast last day drains the battery by the end of the year.
    const auto sunny = test_profile();
    std::vector<double> pv(sunny.pv_yield.values().begin(), sunny.pv_yield.values().end());
    std::fill(pv.end() - 48, pv.end(), 0.0);
    const ProfileSet profile{"T", sunny.demand, TimeSeries(2030, 30, pv, Unit::KWhPerKWpPerStep)};
    DegradedCapacity cap;
    cap.usable_pv_kwp = 5.0;
    cap.usable_battery_kwh = 8.0;
    cap.usable_battery_kw = 8.0 / 2.5;
    const auto r = simulate_dispatch(profile, cap, BatterySpec{});
    REQUIRE(r.state_of_charge.back() == 0.0);
    REQUIRE(r.totals.battery_charge_ac > 100.0);
    CHECK(std::abs(r.totals.battery_discharge_ac - 0.92 * r.totals.battery_charge_ac) <=
          1e-6 * r.totals.battery_charge_ac);

    // Totals agree with the series and with the totals-only path.
    const auto t = dispatch_totals(profile, cap, BatterySpec{});
    CHECK(t.grid_import == r.totals.grid_import);
    CHECK(t.grid_export == r.totals.grid_export);
    double imports = 0.0;
    for (double x : r.grid_import) imports += x;
    CHECK(imports == doctest::Approx(r.totals.grid_import).epsilon(1e-12));
}

TEST_CASE("simulate_dispatch matches the independent dispatch oracle") {
    const auto profile = test_profile(1.3, 0.9);
    for (double kwh : {0.0, 3.0, 13.5}) {
        DegradedCapacity cap;
        cap.usable_pv_kwp = 4.5;
        cap.usable_battery_kwh = kwh;
        cap.usable_battery_kw = kwh / 2.5;
        const auto mine = dispatch_totals(profile, cap, BatterySpec{});
        const auto ref = oracle::dispatch_year(to_oracle(profile), 4.5, kwh);
        CHECK(mine.grid_import == doctest::Approx(ref.imports).epsilon(1e-12));
        CHECK(mine.grid_export == doctest::Approx(ref.exports).epsilon(1e-12));
        CHECK(mine.battery_charge_ac == doctest::Approx(ref.charge).epsilon(1e-12));
    }
}

TEST_CASE("annual bill with and without FiT eligibility") {
    TariffSchedule tariff;
    tariff.fit_fraction = 0.25;
    DispatchTotals t;
    t.grid_import = 4000.0;
    t.grid_export = 2000.0;
    const double fixed = 365.0;
    CHECK(annual_bill(t, tariff, 5.0, 2019) == doctest::Approx(1160.0 - 145.0 + fixed));
    CHECK(annual_bill(t, tariff, 5.5, 2019) == doctest::Approx(1160.0 + fixed));
    CHECK(annual_bill(DispatchTotals{}, tariff, 5.0, 2019) == doctest::Approx(fixed));
    CHECK(tariff.rate(2021) == doctest::Approx(0.29 * 1.04 * 1.04));
}

TEST_CASE("NPV examples") {
    Cashflows none{5000.0, std::vector<double>(10, 0.0)};
    CHECK(net_present_value(none, 0.05) == doctest::Approx(-5000.0));
    Cashflows flows{5000.0, std::vector<double>(10, 1000.0)};
    CHECK(net_present_value(flows, 0.05) == doctest::Approx(2721.734929).epsilon(1e-9));
    CHECK(std::abs(net_present_value(flows, 0.05) - 2721.73) <= 1e-2);
    Cashflows zero{0.0, std::vector<double>(10, 0.0)};
    CHECK(net_present_value(zero, 0.05) == 0.0);
}

TEST_CASE("discounted payback examples") {
    Cashflows flows{3000.0, std::vector<double>(10, 1000.0)};
    const auto dpp = discounted_payback(flows, 0.05);
    REQUIRE(dpp.has_value());
    CHECK(std::abs(*dpp - 3.336) <= 1e-2);
    CHECK(*dpp == doctest::Approx(3.0 + (3000.0 - 2723.2480) / (1000.0 / std::pow(1.05, 4))));
    Cashflows costless{0.0, std::vector<double>(10, 0.0)};
    CHECK(discounted_payback(costless, 0.05) == 0.0);
    Cashflows never{3000.0, std::vector<double>(10, 0.0)};
    CHECK_FALSE(discounted_payback(never, 0.05).has_value());
}

TEST_CASE("linear fade and retirement") {
    HouseholdSpecs specs;
    HouseholdState s;
    s.battery.push_back({2020, 6.0});
    s.pv.push_back({2020, 5.0});
    CHECK(degrade(s, 2025, specs).usable_battery_kwh == doctest::Approx(5.10));
    CHECK(degrade(s, 2030, specs).usable_pv_kwp == doctest::Approx(4.60));
    CHECK(degrade(s, 2020, specs).usable_pv_kwp == 5.0);
    CHECK(degrade(s, 2020, specs).usable_battery_kwh == 6.0);
    CHECK(degrade(s, 2020, specs).usable_battery_kw == doctest::Approx(6.0 / 2.5));
    // Battery retires at age 10, PV keeps going.
    const auto later = degrade(s, 2030, specs);
    CHECK(later.usable_battery_kwh == 0.0);
    CHECK(later.nominal_battery_kwh == 0.0);
    CHECK(later.nominal_pv_kwp == 5.0);
    CHECK(degrade(s, 2019, specs).usable_pv_kwp == 0.0);  // not installed yet
}

TEST_CASE("cost curves apply local scale factors once") {
    const auto c = CostCurves::from_raw({{2019, 1000.0}}, {{2019, 2000.0}});
    CHECK(c.pv_cost(2019) == doctest::Approx(780.0));
    CHECK(c.battery_cost(2019) == doctest::Approx(1460.0));
    const auto s = c.scaled(0.8, 1.2);
    CHECK(s.pv_cost(2019) == doctest::Approx(624.0));
    CHECK(s.battery_cost(2019) == doctest::Approx(1752.0));
    CHECK_THROWS_AS(c.validate(2019, 2020), ValidationError);
    CHECK_THROWS_AS(c.pv_cost(2018), ContractViolation);
}

TEST_CASE("configuration NPV is zero for the zero addition") {
    const auto profile = test_profile();
    const auto econ = test_econ(0.25);
    CHECK(npv_of_configuration(profile, {}, Candidate{}, econ, HouseholdSpecs{}, 2019) == 0.0);
    CHECK(dpp_of_configuration(profile, {}, Candidate{}, econ, HouseholdSpecs{}, 2019) == 0.0);
}

TEST_CASE("invest_decision agrees with the independent enumeration") {
    const HouseholdSpecs specs;
    const EvaluationGrid grid;
    struct Case {
        double fit;
        int year;
        HouseholdState state;
        double load;
    };
    HouseholdState with_pv;
    with_pv.pv.push_back({2019, 3.0});
    HouseholdState with_both = with_pv.with_addition(2021, 0.0, 5.0);
    HouseholdState near_cap;
    near_cap.pv.push_back({2019, 9.5});
    near_cap.battery.push_back({2020, 17.0});
    const std::vector<Case> cases{{0.5, 2019, {}, 1.0},       {0.25, 2019, {}, 1.6},     {0.0, 2024, {}, 1.6},
                                  {0.25, 2023, with_pv, 1.2}, {0.0, 2026, with_both, 2.0}, {0.0, 2025, near_cap, 1.5}};
    for (const auto& c : cases) {
        CAPTURE(c.fit);
        CAPTURE(c.year);
        const auto profile = test_profile(c.load);
        const auto econ = test_econ(c.fit);
        const auto mine = invest_decision(profile, c.state, econ, grid, specs, c.year);
        const auto ref = oracle::best_addition(to_oracle(profile, c.state), to_oracle(econ.costs), c.fit, c.year);
        REQUIRE(mine.has_value() == ref.has_value());
        if (mine) {
            CHECK(mine->added_pv == ref->pv);
            CHECK(mine->added_battery == ref->battery);
            CHECK(mine->npv == doctest::Approx(ref->npv).epsilon(1e-9));
        }
    }
}

TEST_CASE("invest_decision: prohibitive costs yield no investment") {
    const auto profile = test_profile();
    const auto econ = test_econ(0.5, 100.0);
    CHECK_FALSE(invest_decision(profile, {}, econ, EvaluationGrid{}, HouseholdSpecs{}, 2019).has_value());
}

TEST_CASE("invest_decision: the payback gate blocks profitable candidates") {
    const auto profile = test_profile();
    auto econ = test_econ(0.5);
    const auto open = invest_decision(profile, {}, econ, EvaluationGrid{}, HouseholdSpecs{}, 2019);
    REQUIRE(open.has_value());
    REQUIRE(open->npv > 0.0);
    econ.dpp_threshold = 0.5;
    CHECK_FALSE(invest_decision(profile, {}, econ, EvaluationGrid{}, HouseholdSpecs{}, 2019).has_value());
}

TEST_CASE("run_household replays the independent decision loop") {
    const auto profile = test_profile(1.4, 0.8);
    const double fit = 0.0;
    const auto econ = test_econ(fit);
    const auto run = run_household(profile, econ, EvaluationGrid{}, HouseholdSpecs{}, 2019, 2030);
    const auto ref = oracle::replay(to_oracle(profile), to_oracle(econ.costs), fit, 2019, 2030);
    REQUIRE(run.decisions.size() == ref.size());
    REQUIRE_FALSE(ref.empty());
    for (std::size_t i = 0; i < ref.size(); ++i) {
        CHECK(run.decisions[i].year == ref[i].first);
        CHECK(run.decisions[i].added_pv == ref[i].second.pv);
        CHECK(run.decisions[i].added_battery == ref[i].second.battery);
    }
    // Final-year net series is import minus export.
    for (std::size_t t = 0; t < 17520; t += 97) {
        CHECK(run.net_grid[t] <= run.demand[t] + 1e-12);
    }
}

TEST_CASE("run_household with prohibitive costs leaves demand untouched") {
    const auto profile = test_profile();
    const auto run = run_household(profile, test_econ(0.5, 100.0), EvaluationGrid{}, HouseholdSpecs{}, 2019, 2021);
    CHECK(run.decisions.empty());
    for (std::size_t t = 0; t < profile.demand.size(); ++t) REQUIRE(run.net_grid[t] == profile.demand[t]);
}

TEST_CASE("parameter validation") {
    EvaluationGrid g;
    CHECK(g.pv_points() == 21);
    CHECK(g.battery_points() == 19);
    g.pv_step = 0.3;
    CHECK_THROWS_AS(g.validate(), ValidationError);
    EconomicContext e;
    e.horizon_years = 3;
    CHECK_THROWS_AS(e.validate(), ValidationError);
    BatterySpec b;
    b.roundtrip_efficiency = 1.2;
    CHECK_THROWS_AS(b.validate(), ValidationError);
}
