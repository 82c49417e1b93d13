#include "doctest.h"
#include "temp_dir.hpp"

#include "prosumage/analytics.hpp"
#include "prosumage/csv.hpp"
#include "prosumage/errors.hpp"

#include <algorithm>
#include <random>

using namespace prosumage;

namespace {

Technology tech(std::string name, TechKind kind, std::string profile = {}) {
    Technology t;
    t.name = std::move(name);
    t.kind = kind;
    t.availability_profile = std::move(profile);
    t.renewable = kind == TechKind::VariableRenewable;
    return t;
}

SectorSolution solution_with(std::vector<std::pair<std::string, double>> capacities) {
    SectorSolution s;
    s.status = LpStatus::Optimal;
    for (auto& [name, cap] : capacities) {
        TechnologyResult r;
        r.name = name;
        r.capacity = cap;
        s.technologies.push_back(r);
    }
    return s;
}

ResidualDemand hourly_residual(std::vector<double> residual, std::vector<double> net, std::vector<double> imports,
                               std::vector<double> demand, std::vector<double> pv) {
    const std::size_t n = 8760;
    auto series = [&](std::vector<double> v) {
        v.resize(n, v.empty() ? 0.0 : v.back());
        return TimeSeries(2030, 60, std::move(v), Unit::MWhPerStep);
    };
    std::vector<double> reduction(residual.size()), network(residual.size());
    for (std::size_t h = 0; h < residual.size(); ++h) {
        reduction[h] = demand[h] - net[h];
        network[h] = residual[h] + reduction[h];
    }
    return {series(network), series(residual), series(reduction), series(pv), series(net),
            series(imports), series(demand)};
}

}  // namespace

TEST_CASE("rldc sorts descending and keeps the multiset") {
    CHECK(rldc(std::vector<double>{3, 1, 2}) == std::vector<double>{3, 2, 1});
    CHECK(rldc(std::vector<double>(5, 4.0)) == std::vector<double>(5, 4.0));
    std::mt19937_64 rng(5);
    std::normal_distribution<double> g(0.0, 100.0);
    std::vector<double> v(8760);
    for (auto& x : v) x = g(rng);
    const auto sorted = rldc(v);
    CHECK(std::is_sorted(sorted.rbegin(), sorted.rend()));
    auto a = v;
    auto b = sorted;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    CHECK(a == b);
}

TEST_CASE("rldc decomposition") {
    const std::size_t H = 24;
    std::vector<double> demand(H), pv_avail(H, 0.0), wind_avail(H, 0.3), household_pv(H, 0.0);
    for (std::size_t h = 0; h < H; ++h) demand[h] = 100.0 + 3.0 * static_cast<double>(h);
    for (std::size_t h = 8; h <= 16; ++h) pv_avail[h] = 0.5;
    household_pv[12] = 1.0;

    std::vector<Technology> techs{tech("gas", TechKind::Dispatchable), tech("pv", TechKind::VariableRenewable, "pv"),
                                  tech("wind", TechKind::VariableRenewable, "wind")};
    techs[1].availability = pv_avail;
    techs[2].availability = wind_avail;
    const auto ref_sol = solution_with({{"gas", 120}, {"pv", 20}, {"wind", 10}});
    const auto scn_sol = solution_with({{"gas", 110}, {"pv", 18}, {"wind", 10}});

    SUBCASE("zero household PV collapses the pairs") {
        RldcInputs ref{demand, std::vector<double>(H, 0.0), techs, &ref_sol};
        RldcInputs same = ref;
        const auto curves = rldc_decomposition(same, ref);
        REQUIRE(curves.size() == 4);
        CHECK(curves[0].label == "reference");
        CHECK(curves[1].values == curves[0].values);
        CHECK(curves[3].values == curves[2].values);
    }
    SUBCASE("household PV at noon shifts the PV-only curve") {
        RldcInputs ref{demand, std::vector<double>(H, 0.0), techs, &ref_sol};
        RldcInputs scn{demand, household_pv, techs, &scn_sol};
        const auto curves = rldc_decomposition(scn, ref);
        std::vector<double> expected(H);
        for (std::size_t h = 0; h < H; ++h) expected[h] = demand[h] - pv_avail[h] * 20.0 - household_pv[h];
        std::sort(expected.rbegin(), expected.rend());
        CHECK(curves[3].label == "household_pv_as_utility_pv");
        CHECK(curves[3].values == expected);
        std::vector<double> pv_only(H);
        for (std::size_t h = 0; h < H; ++h) pv_only[h] = demand[h] - pv_avail[h] * 20.0;
        std::sort(pv_only.rbegin(), pv_only.rend());
        CHECK(curves[2].values == pv_only);
        // Prosumage curve uses the scenario's own utility capacities.
        std::vector<double> pros(H);
        for (std::size_t h = 0; h < H; ++h) pros[h] = demand[h] - pv_avail[h] * 18.0 - 0.3 * 10.0;
        std::sort(pros.rbegin(), pros.rend());
        CHECK(curves[1].values == pros);
    }
    SUBCASE("mismatched years are rejected") {
        RldcInputs ref{demand, {}, techs, &ref_sol};
        RldcInputs shorter{std::vector<double>(H - 1, 1.0), {}, techs, &scn_sol};
        CHECK_THROWS_AS(rldc_decomposition(shorter, ref), ValidationError);
    }
}

TEST_CASE("weighted price") {
    CHECK(weighted_price(std::vector<double>{10, 20}, std::vector<double>{1, 3}) == doctest::Approx(17.5));
    CHECK(weighted_price(std::vector<double>{42, 42, 42}, std::vector<double>{5, 0.1, 9}) == doctest::Approx(42.0));
    CHECK_THROWS_AS(weighted_price(std::vector<double>{1, 2}, std::vector<double>{0, 0}), ValidationError);
    CHECK_THROWS_AS(weighted_price(std::vector<double>{1, 2}, std::vector<double>{1}), ValidationError);
}

TEST_CASE("customer segments partition the residual demand") {
    std::vector<double> residual{1000, 900}, net{-50, 120}, imports{10, 130}, demand{200, 180}, pv{300, 20};
    const auto r = hourly_residual(residual, net, imports, demand, pv);
    const auto segments = customer_segments(r);
    REQUIRE(segments.size() == 3);
    for (std::size_t h = 0; h < 8760; h += 1000) {
        double total = 0.0;
        for (const auto& s : segments) total += s.profile[h];
        REQUIRE(total == doctest::Approx(r.residual[h]));
    }
    CHECK(segments[0].profile[0] == -50.0);
    CHECK(segments[1].profile[0] == 200.0);
    CHECK(segments[2].profile[0] == doctest::Approx(850.0));
    const auto imports_only = customer_segments(r, true);
    CHECK(imports_only[0].profile[0] == 10.0);
}

TEST_CASE("segment prices bracket the demand-weighted mean") {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> residual(8760), net(8760), imports(8760), demand(8760), pv(8760), prices(8760);
    for (std::size_t h = 0; h < 8760; ++h) {
        demand[h] = 300.0 + 100.0 * u(rng);
        pv[h] = (h % 24 >= 8 && h % 24 <= 16) ? 400.0 * u(rng) : 0.0;
        net[h] = demand[h] - pv[h];
        imports[h] = std::max(0.0, net[h]);
        residual[h] = 2000.0 + 500.0 * u(rng) - (demand[h] - net[h]);
        prices[h] = 20.0 + 80.0 * u(rng);
    }
    const auto r = hourly_residual(residual, net, imports, demand, pv);
    const auto segments = customer_segments(r);
    const double overall = weighted_price(prices, r.residual.values());
    double lo = 1e300, hi = -1e300;
    for (const auto& s : segments) {
        const double p = weighted_price(prices, s.profile);
        lo = std::min(lo, p);
        hi = std::max(hi, p);
    }
    // Only guaranteed when every segment volume is positive; it is here.
    CHECK(lo <= overall + 1e-9);
    CHECK(hi >= overall - 1e-9);

    const auto reference = reference_residual(r.network_demand);
    const auto sp = segment_prices(r, prices, reference, prices);
    REQUIRE(sp.size() == 3);
    // Identical prices: the non-prosumage price is unchanged.
    CHECK(*sp[1].scenario_price == doctest::Approx(*sp[1].reference_price));
    CHECK(sp[1].price_effect == doctest::Approx(0.0).epsilon(1e-6));
    CHECK(sp[0].volume_effect < 0.0);  // prosumage households buy less
}

TEST_CASE("CO2 report") {
    std::vector<Technology> techs{tech("coal", TechKind::Dispatchable), tech("wind", TechKind::VariableRenewable)};
    techs[0].efficiency = 0.40;
    techs[0].emission_factor = 0.34;
    auto sol = solution_with({{"coal", 10}, {"wind", 5}});
    sol.technologies[0].annual_output = 100.0;
    sol.technologies[1].annual_output = 50.0;
    const auto r = co2_report(sol, techs, 150.0);
    CHECK(r.total_t == doctest::Approx(85.0));
    CHECK(r.intensity_kg_per_kwh == doctest::Approx(85.0 / 150.0));

    sol.technologies[0].annual_output = 0.0;
    CHECK(co2_report(sol, techs, 150.0).total_t == 0.0);

    // Linear in generation.
    sol.technologies[0].annual_output = 300.0;
    CHECK(co2_report(sol, techs, 150.0).total_t == doctest::Approx(3.0 * 85.0));
}

TEST_CASE("system cost adds annuities of alive fleet vintages") {
    auto sol = solution_with({});
    sol.objective = 1.0e6;
    CHECK(system_cost(sol, {}).total == sol.objective);

    std::vector<FleetInvestment> log{{2025, 0.0, 1.0, 0.0, 5000.0}};
    const auto c = system_cost(sol, log);
    CHECK(c.prosumage_battery == doctest::Approx(616.45).epsilon(1e-5));
    CHECK(c.total == 1.0e6 + c.prosumage_battery);

    // A battery from 2019 has retired by 2030; PV from 2019 has not.
    std::vector<FleetInvestment> old{{2019, 1.0, 1.0, 1000.0, 5000.0}};
    const auto o = system_cost(sol, old);
    CHECK(o.prosumage_battery == 0.0);
    CHECK(o.prosumage_pv == doctest::Approx(annuitize(1000.0, 25.0, 0.04)));
}

TEST_CASE("fleet investment log and capacity scale the cohort mean") {
    CostCurves costs = CostCurves::from_raw({{2019, 1000.0}, {2020, 900.0}}, {{2019, 1000.0}, {2020, 800.0}}, 1.0, 1.0);
    HouseholdOutcome a{"a", {{2019, 5.0, 0.0, 1.0, 2.0, 5000.0}}};
    HouseholdOutcome b{"b", {{2019, 3.0, 5.0, 1.0, 2.0, 8000.0}, {2020, 0.0, 5.0, 1.0, 2.0, 4000.0}}};
    const std::vector<HouseholdOutcome> cohort{a, b};
    const auto log = fleet_investment_log(cohort, costs, 1000);
    REQUIRE(log.size() == 2);
    CHECK(log[0].year == 2019);
    CHECK(log[0].pv_kwp == doctest::Approx(4000.0));
    CHECK(log[0].battery_kwh == doctest::Approx(2500.0));
    CHECK(log[0].pv_capex == doctest::Approx(4000.0 * 1000.0));
    CHECK(log[1].battery_capex == doctest::Approx(2500.0 * 800.0));

    const auto cap = fleet_capacity(cohort, HouseholdSpecs{}, 2028, 1000);
    CHECK(cap.pv_mw == doctest::Approx(4.0));
    CHECK(cap.battery_mwh == doctest::Approx(5.0));
    CHECK(cap.battery_mw == doctest::Approx(2.0));
    const auto later = fleet_capacity(cohort, HouseholdSpecs{}, 2035, 1000);
    CHECK(later.pv_mw == doctest::Approx(4.0));
    CHECK(later.battery_mwh == 0.0);

    const auto state = b.state();
    CHECK(state.pv.size() == 1);
    CHECK(state.battery.size() == 2);
}

TEST_CASE("delta report of a scenario with itself is zero") {
    std::vector<Technology> techs{tech("coal", TechKind::Dispatchable), tech("pv", TechKind::VariableRenewable, "pv")};
    auto sol = solution_with({{"coal", 500}, {"pv", 300}});
    sol.technologies[0].annual_output = 1000.0;
    sol.objective = 5e8;
    ScenarioOutcome o{"x", 0.39, sol, techs, 1e6, system_cost(sol, {}), {}};
    const auto d = delta_report(o, o);
    CHECK(d.system_cost == 0.0);
    CHECK(d.system_cost_pct == 0.0);
    CHECK(d.co2_t == 0.0);
    for (const auto& t : d.technologies) {
        CHECK(t.capacity_mw == 0.0);
        CHECK(t.generation_gwh == 0.0);
        CHECK_FALSE(t.per_household_pv.has_value());
    }
    auto other = o;
    other.res_share = 0.49;
    CHECK_THROWS_AS(delta_report(other, o), ValidationError);
}

TEST_CASE("substitution ratios are utility capacity displaced per household capacity") {
    std::vector<Technology> techs{tech("wind", TechKind::VariableRenewable, "wind"),
                                  tech("pv", TechKind::VariableRenewable, "pv")};
    auto ref_sol = solution_with({{"wind", 1000}, {"pv", 1200}});
    auto scn_sol = solution_with({{"wind", 900}, {"pv", 820}});
    ScenarioOutcome ref{"ref", 0.39, ref_sol, techs, 1e6, system_cost(ref_sol, {}), {}};
    ScenarioOutcome scn{"scn", 0.39, scn_sol, techs, 1e6, system_cost(scn_sol, {}), {1000.0, 0.0, 0.0}};
    const auto d = delta_report(scn, ref);
    REQUIRE(d.technologies.size() == 2);
    CHECK(*d.technologies[0].per_household_pv == doctest::Approx(0.10));
    CHECK(*d.technologies[1].per_household_pv == doctest::Approx(0.38));
    CHECK_FALSE(d.technologies[1].per_household_battery_mw.has_value());
}

TEST_CASE("report writers produce parseable CSV") {
    TempDir dir("reports");
    std::vector<LabeledCurve> curves{{"a", {3, 2, 1}}, {"b", {5, 4, 0}}};
    write_curves_csv(dir / "c.csv", curves);
    const auto t = csv::read(dir / "c.csv");
    CHECK(t.rows.size() == 3);
    CHECK(t.find_column("a_mwh").has_value());
}
