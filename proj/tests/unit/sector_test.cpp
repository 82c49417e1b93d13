#include "doctest.h"
#include "oracles.hpp"
#include "temp_dir.hpp"

#include "prosumage/errors.hpp"
#include "prosumage/sector.hpp"

#include <cmath>
#include <numbers>
#include <set>

using namespace prosumage;

namespace {

bool have_highs() {
    for (const auto& b : available_backends()) {
        if (b == "highs") return true;
    }
    return false;
}

Technology dispatchable(std::string name, double fixed, double variable) {
    Technology t;
    t.name = std::move(name);
    t.kind = TechKind::Dispatchable;
    t.fixed_om = fixed;
    t.variable_om = variable;
    return t;
}

Technology renewable(std::string name, double fixed, std::vector<double> availability) {
    Technology t;
    t.name = std::move(name);
    t.kind = TechKind::VariableRenewable;
    t.renewable = true;
    t.fixed_om = fixed;
    t.availability = std::move(availability);
    return t;
}

Technology battery(double power_fixed, double energy_overnight) {
    Technology t;
    t.name = "battery";
    t.kind = TechKind::Storage;
    t.fixed_om = power_fixed;
    t.overnight_cost_energy = energy_overnight;
    t.efficiency = 0.81;
    t.lifetime = 10;
    t.variable_om = 0.5;
    return t;
}

std::vector<double> daily(std::size_t hours, double base, double swing, double phase) {
    std::vector<double> v(hours);
    for (std::size_t h = 0; h < hours; ++h) {
        v[h] = base + swing * std::sin(2.0 * std::numbers::pi * (static_cast<double>(h % 24) - phase) / 24.0);
    }
    return v;
}

std::vector<double> solar(std::size_t hours) {
    std::vector<double> v(hours);
    for (std::size_t h = 0; h < hours; ++h) {
        const double x = (static_cast<double>(h % 24) - 6.0) / 12.0;
        v[h] = (x > 0.0 && x < 1.0) ? 0.9 * std::sin(std::numbers::pi * x) : 0.0;
    }
    return v;
}

// A week-long system with every row class present.
SectorScenario week(std::optional<double> res) {
    SectorScenario s;
    const std::size_t H = 168;
    s.residual_demand = daily(H, 100.0, 30.0, 12.0);
    s.household_pv_generation.assign(H, 0.0);
    s.res_share = res;
    s.capacity_cost_weight = static_cast<double>(H) / 8760.0;
    s.technologies = {dispatchable("base", 200000.0, 20.0), dispatchable("peak", 50000.0, 90.0),
                      renewable("sun", 60000.0, solar(H)), renewable("wind", 110000.0, daily(H, 0.4, 0.3, 3.0)),
                      battery(15000.0, 150000.0)};
    return s;
}

double relative(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

}  // namespace

TEST_CASE("annuities") {
    CHECK(annuitize(1254000.0, 25.0, 0.04) == doctest::Approx(80271.0).epsilon(1e-5));
    CHECK(annuitize(173773.0, 15.0, 0.04) == doctest::Approx(15629.33).epsilon(1e-6));
    CHECK(annuitize(173773.0, 15.0, 0.04) == doctest::Approx(15628.0).epsilon(1e-4));
    CHECK(annuitize(5000.0, 10.0, 0.04) == doctest::Approx(616.45).epsilon(1e-5));
    CHECK(annuitize(5000.0, 10.0, 0.0) == 500.0);
    CHECK(annuitize(5000.0, 10.0, 1e-9) == doctest::Approx(500.0).epsilon(1e-8));
}

TEST_CASE("default catalog carries the published cost table") {
    const auto c = default_catalog();
    CHECK(c.technologies.size() == 8);
    REQUIRE(c.find("coal"));
    CHECK(c.find("coal")->overnight_cost_power == 3195000.0);
    CHECK(c.find("coal")->efficiency == 0.40);
    CHECK(c.find("coal")->emission_factor == 0.34);
    CHECK(c.find("ccgt")->emission_factor == 0.20);
    CHECK(c.find("wind")->capacity_lower_bound == 419.0);
    CHECK(c.find("pv")->capacity_lower_bound == 202.0);
    CHECK(c.find("li-ion")->overnight_cost_energy == 173773.0);
    CHECK(c.find("li-ion")->lifetime == 15.0);
    CHECK(c.find("hydrogen")->efficiency == 0.419);
    CHECK(c.find("bioenergy")->renewable);
    CHECK_NOTHROW(c.validate());
}

TEST_CASE("catalog CSV round trip and validation") {
    TempDir dir("catalog");
    const auto c = default_catalog();
    write_catalog_csv(dir / "c.csv", c);
    const auto back = read_catalog_csv(dir / "c.csv");
    REQUIRE(back.technologies.size() == c.technologies.size());
    for (std::size_t i = 0; i < c.technologies.size(); ++i) {
        CHECK(back.technologies[i].name == c.technologies[i].name);
        CHECK(back.technologies[i].kind == c.technologies[i].kind);
        CHECK(back.technologies[i].overnight_cost_power == c.technologies[i].overnight_cost_power);
        CHECK(back.technologies[i].fuel_cost == c.technologies[i].fuel_cost);
        CHECK(back.technologies[i].availability_profile == c.technologies[i].availability_profile);
    }
    auto bad = c;
    bad.technologies[1].fixed_om = -5.0;
    CHECK_THROWS_AS(bad.validate(), ValidationError);
    auto dup = c;
    dup.technologies.push_back(c.technologies[0]);
    CHECK_THROWS_AS(dup.validate(), ValidationError);
    auto scaled = c;
    scaled.scale_overnight_costs({"pv", "li-ion"}, 0.8);
    CHECK(scaled.find("pv")->overnight_cost_power == doctest::Approx(0.8 * 817000.0));
    CHECK(scaled.find("li-ion")->overnight_cost_energy == doctest::Approx(0.8 * 173773.0));
    CHECK(scaled.find("wind")->overnight_cost_power == c.find("wind")->overnight_cost_power);
}

TEST_CASE("2-hour toy: one capacity column, two balance rows") {
    SectorScenario s;
    s.residual_demand = {1.0, 2.0};
    s.technologies = {dispatchable("plant", 10.0, 5.0)};
    const auto model = build_lp(s);
    CHECK(model.lp.num_rows() == 4);
    CHECK(model.lp.num_columns() == 3);
    CHECK(model.balance_row.size() == 2);
    for (const auto& name : std::vector<std::string>{"dense", "highs"}) {
        if (name == "highs" && !have_highs()) continue;
        CAPTURE(name);
        const auto sol = solve(model, s, *make_backend(name));
        CHECK(sol.objective == doctest::Approx(35.0));
        CHECK(sol.technologies[0].capacity == doctest::Approx(2.0));
        CHECK(sol.technologies[0].output[0] == doctest::Approx(1.0));
        CHECK(sol.technologies[0].output[1] == doctest::Approx(2.0));
        CHECK(sol.prices[0] == doctest::Approx(5.0));
        CHECK(sol.prices[1] == doctest::Approx(15.0));
        const auto report = validate_solution(sol.raw, model.lp);
        CHECK(report.ok());
        CHECK(report.dual_objective == doctest::Approx(1.0 * 5.0 + 2.0 * 15.0));
    }
}

TEST_CASE("zero demand builds nothing") {
    SectorScenario s;
    s.residual_demand = std::vector<double>(24, 0.0);
    s.technologies = {dispatchable("plant", 10.0, 5.0), renewable("sun", 3.0, solar(24))};
    const auto sol = solve(build_lp(s), s, DenseSimplexBackend{});
    CHECK(sol.objective == doctest::Approx(0.0));
    CHECK(sol.technologies[0].capacity == doctest::Approx(0.0));
    CHECK(sol.technologies[1].capacity == doctest::Approx(0.0));
}

TEST_CASE("48-hour, 3-technology instance matches the brute-force capacity grid") {
    const std::size_t H = 48;
    SectorScenario s;
    s.residual_demand = daily(H, 70.0, 25.0, 13.0);
    s.residual_demand[19] += 20.0;  // short peaks favour the peaker
    s.residual_demand[43] += 20.0;
    const auto wind = daily(H, 0.45, 0.35, 2.0);
    s.capacity_cost_weight = static_cast<double>(H) / 8760.0;
    s.technologies = {dispatchable("base", 200000.0, 20.0), dispatchable("peak", 50000.0, 80.0),
                      renewable("wind", 60000.0, wind)};
    const auto sol = solve(build_lp(s), s, DenseSimplexBackend{});

    std::vector<oracle::Plant> plants;
    for (const auto& t : s.technologies) {
        plants.push_back({t.fixed_om * s.capacity_cost_weight, t.marginal_cost(), t.availability});
    }
    const auto brute = oracle::capacity_grid_search(s.residual_demand, plants, 140.0, 141);
    MESSAGE("LP " << sol.objective << " vs grid " << brute.cost);
    CHECK(brute.cost >= sol.objective - 1e-6 * sol.objective);
    CHECK((brute.cost - sol.objective) / sol.objective <= 0.01);
    for (const auto& t : sol.technologies) CHECK(t.capacity > 0.0);  // the instance uses all three
}

TEST_CASE("closed-form row and column counts for a full-year catalog") {
    SectorScenario s;
    s.residual_demand = std::vector<double>(8760, 1000.0);
    s.residual_demand[5] = -10.0;
    s.residual_demand[6] = -1.0;
    s.household_pv_generation.assign(8760, 0.0);
    s.res_share = 0.39;
    auto catalog = default_catalog();
    catalog.attach_availability({{"wind", daily(8760, 0.4, 0.2, 0.0)}, {"pv", solar(8760)}});
    s.technologies = catalog.technologies;
    const auto m = build_lp(s);
    const std::size_t H = 8760, dispatch = 4, variable = 2, storage = 2;
    CHECK(m.balance_row.size() == H);
    CHECK(m.lp.num_rows() == H * (1 + dispatch + variable + 4 * storage) + 1);
    CHECK(m.lp.num_columns() == (dispatch + variable + storage) + storage + H * (dispatch + variable + 3 * storage) + 2);
    CHECK(m.res_row >= 0);
}

TEST_CASE("RES share bounds are enforced") {
    auto s = week(1.2);
    CHECK_THROWS_AS(build_lp(s), ValidationError);
    s.res_share = 0.0;
    CHECK_THROWS_AS(build_lp(s), ValidationError);
    s = week(0.5);
    s.technologies.erase(s.technologies.begin() + 2, s.technologies.begin() + 4);
    CHECK_THROWS_AS(build_lp(s), ValidationError);
}

TEST_CASE("week-long system: invariants of an optimal dispatch") {
    if (!have_highs()) return;
    const auto s = week(0.5);
    const auto model = build_lp(s);
    const auto sol = solve(model, s, *make_backend("highs"));
    const auto report = validate_solution(sol.raw, model.lp, 1e-6);
    CHECK(report.ok(1e-6));

    for (std::size_t h = 0; h < s.hours(); ++h) {
        double supply = 0.0;
        for (const auto& t : sol.technologies) {
            supply += t.output[h];
            if (!t.charge.empty()) supply -= t.charge[h];
        }
        const double spill = model.spill_col[h] >= 0 ? sol.raw.column_values[model.spill_col[h]] : 0.0;
        REQUIRE(std::abs(supply - spill - s.residual_demand[h]) <= 1e-6 * std::max(1.0, s.residual_demand[h]));
        // A binding RES row can make surplus hours negatively priced.
        if (sol.res_dual <= 1e-9) REQUIRE(sol.prices[h] >= -1e-6);
    }

    const auto* bat = sol.find("battery");
    REQUIRE(bat);
    double charged = 0.0, discharged = 0.0;
    for (std::size_t h = 0; h < s.hours(); ++h) {
        charged += bat->charge[h];
        discharged += bat->output[h];
    }
    if (charged > 1e-6) CHECK(discharged == doctest::Approx(0.81 * charged).epsilon(1e-6));
    CHECK(sol.realized_res_share >= 0.5 - 1e-6);
    CHECK(sol.res_dual >= -1e-9);
    for (const auto& t : sol.technologies) {
        if (t.kind != TechKind::VariableRenewable) continue;
        for (std::size_t h = 0; h < s.hours(); ++h) REQUIRE(t.curtailment[h] >= 0.0);
    }
}

TEST_CASE("dense simplex and HiGHS agree on a day with storage and a RES row") {
    if (!have_highs()) return;
    auto s = week(0.4);
    const std::size_t H = 24;
    s.residual_demand.resize(H);
    s.household_pv_generation.resize(H);
    for (auto& t : s.technologies) {
        if (!t.availability.empty()) t.availability.resize(H);
    }
    s.capacity_cost_weight = H / 8760.0;
    const auto model = build_lp(s);
    const auto a = solve(model, s, DenseSimplexBackend{});
    const auto b = solve(model, s, *make_backend("highs"));
    CHECK(relative(a.objective, b.objective) <= 1e-7);
    CHECK(validate_solution(a.raw, model.lp).ok());
    CHECK(validate_solution(b.raw, model.lp).ok());
}

TEST_CASE("raising the RES share never lowers the objective") {
    if (!have_highs()) return;
    double previous = 0.0;
    for (double share : {0.2, 0.35, 0.5, 0.65, 0.8}) {
        const auto s = week(share);
        const auto sol = solve(build_lp(s), s, *make_backend("highs"));
        CHECK(sol.objective >= previous - 1e-6 * std::abs(previous));
        previous = sol.objective;
    }
}

TEST_CASE("scaling every cost scales the objective and the duals") {
    if (!have_highs()) return;
    auto s = week(0.5);
    const auto base = solve(build_lp(s), s, *make_backend("highs"));
    for (auto& t : s.technologies) {
        t.overnight_cost_power *= 3.0;
        t.overnight_cost_energy *= 3.0;
        t.fixed_om *= 3.0;
        t.variable_om *= 3.0;
        t.fuel_cost *= 3.0;
    }
    const auto tripled = solve(build_lp(s), s, *make_backend("highs"));
    CHECK(tripled.objective == doctest::Approx(3.0 * base.objective).epsilon(1e-7));
    double weighted_base = 0.0, weighted_tripled = 0.0;
    for (std::size_t h = 0; h < s.hours(); ++h) {
        weighted_base += base.prices[h] * s.residual_demand[h];
        weighted_tripled += tripled.prices[h] * s.residual_demand[h];
    }
    CHECK(weighted_tripled == doctest::Approx(3.0 * weighted_base).epsilon(1e-6));
}

TEST_CASE("endogenous share: cheap renewables reach 100 percent") {
    SectorScenario s;
    const std::size_t H = 24;
    s.residual_demand = std::vector<double>(H, 50.0);
    s.capacity_cost_weight = H / 8760.0;
    s.technologies = {dispatchable("gas", 100000.0, 60.0), renewable("firm-green", 1000.0, std::vector<double>(H, 1.0))};
    const auto sol = run_endogenous(s, DenseSimplexBackend{});
    CHECK(sol.realized_res_share == doctest::Approx(1.0));
}

TEST_CASE("endogenous share: expensive renewables stop at the forced lower bound") {
    SectorScenario s;
    const std::size_t H = 24;
    s.residual_demand = std::vector<double>(H, 50.0);
    s.capacity_cost_weight = H / 8760.0;
    auto wind = renewable("wind", 1e7, daily(H, 0.5, 0.3, 0.0));
    wind.capacity_lower_bound = 10.0;
    s.technologies = {dispatchable("gas", 50000.0, 60.0), wind};
    const auto sol = run_endogenous(s, DenseSimplexBackend{});
    double forced = 0.0;
    for (std::size_t h = 0; h < H; ++h) forced += std::min(50.0, 10.0 * wind.availability[h]);
    CHECK(sol.find("wind")->capacity == doctest::Approx(10.0));
    CHECK(sol.realized_res_share == doctest::Approx(forced / (50.0 * H)));
}

TEST_CASE("negative residual hours are spilled and prices stay non-negative") {
    SectorScenario s;
    const std::size_t H = 24;
    s.residual_demand = daily(H, 10.0, 30.0, 6.0);  // dips below zero mid-day
    s.capacity_cost_weight = H / 8760.0;
    s.technologies = {dispatchable("gas", 50000.0, 60.0)};
    const auto model = build_lp(s);
    std::size_t spill_columns = 0;
    for (std::size_t h = 0; h < H; ++h) spill_columns += model.spill_col[h] >= 0 ? 1 : 0;
    CHECK(spill_columns > 0);
    const auto sol = solve(model, s, DenseSimplexBackend{});
    for (double p : sol.prices) CHECK(p >= -1e-6);
}

TEST_CASE("infeasible RES share is diagnosed by row class") {
    SectorScenario s;
    const std::size_t H = 24;
    s.residual_demand = std::vector<double>(H, 50.0);
    s.capacity_cost_weight = H / 8760.0;
    auto sun = renewable("sun", 1000.0, solar(H));
    s.technologies = {dispatchable("gas", 50000.0, 60.0), sun};
    s.res_share = 0.9;  // the sun can cover at most half the day
    try {
        solve(build_lp(s), s, DenseSimplexBackend{});
        FAIL("expected a solve error");
    } catch (const SolveError& e) {
        CHECK(std::string(e.what()).find("res_share") != std::string::npos);
    }
}

TEST_CASE("validate_solution flags exactly the perturbed balance row") {
    const auto s = week(std::nullopt);
    SectorScenario day = s;
    const std::size_t H = 24;
    day.residual_demand.resize(H);
    day.household_pv_generation.resize(H);
    for (auto& t : day.technologies) {
        if (!t.availability.empty()) t.availability.resize(H);
    }
    day.capacity_cost_weight = H / 8760.0;
    const auto model = build_lp(day);
    auto sol = solve(model, day, DenseSimplexBackend{});
    CHECK(validate_solution(sol.raw, model.lp).violations.empty());
    const std::size_t hour = 17;
    sol.raw.column_values[static_cast<std::size_t>(model.output(0, hour))] += 1.0;
    std::set<int> flagged;
    for (const auto& v : validate_solution(sol.raw, model.lp).violations) {
        const auto& label = model.lp.row_label(v.row);
        if (label.cls == RowClass::Balance) flagged.insert(label.hour);
    }
    CHECK(flagged == std::set<int>{static_cast<int>(hour)});
}

TEST_CASE("interior point with a loose tolerance fails the duality-gap check") {
    bool have_ipm = false;
    for (const auto& b : available_backends()) have_ipm = have_ipm || b == "highs-ipm";
    if (!have_ipm) return;
    const auto s = week(0.5);
    const auto model = build_lp(s);
    SolverOptions loose;
    loose.tolerance = 1e-5;  // looser and HiGHS stops without an optimal status
    const auto rough = make_backend("highs-ipm")->solve(model.lp, loose);
    CAPTURE(rough.message);
    REQUIRE(rough.status == LpStatus::Optimal);
    CHECK(validate_solution(rough, model.lp).relative_gap > 1e-6);
    const auto tight = make_backend("highs")->solve(model.lp, {});
    CHECK(validate_solution(tight, model.lp).relative_gap <= 1e-6);
}

TEST_CASE("solution files round trip") {
    if (!have_highs()) return;
    TempDir dir("solution");
    const auto s = week(0.5);
    const auto sol = solve(build_lp(s), s, *make_backend("highs"));
    write_solution_csv(dir.path(), sol, 2030);
    const auto back = read_solution_csv(dir.path());
    CHECK(back.objective == sol.objective);
    REQUIRE(back.technologies.size() == sol.technologies.size());
    for (std::size_t k = 0; k < sol.technologies.size(); ++k) {
        CHECK(back.technologies[k].capacity == sol.technologies[k].capacity);
        CHECK(back.technologies[k].output == sol.technologies[k].output);
    }
    CHECK(back.prices == sol.prices);
}
