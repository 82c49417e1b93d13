#include "doctest.h"
#include "temp_dir.hpp"

#include "prosumage/errors.hpp"
#include "prosumage/fleet.hpp"

using namespace prosumage;

namespace {

TimeSeries half_hourly(double v) { return TimeSeries::constant(2030, 30, v, Unit::KWhPerStep); }

HouseholdSeries constant_household(double net, double imports, double demand, double pv) {
    return {half_hourly(net), half_hourly(imports), half_hourly(demand), half_hourly(pv)};
}

}  // namespace

TEST_CASE("representative household is the element-wise mean") {
    const std::vector<HouseholdSeries> two{constant_household(1, 1, 2, 0), constant_household(3, 3, 4, 1)};
    const auto rep = representative_profile(two);
    CHECK(rep.net_grid[0] == 2.0);
    CHECK(rep.net_grid[17519] == 2.0);
    CHECK(rep.demand[5] == 3.0);
    CHECK(rep.pv_generation[5] == 0.5);

    const std::vector<HouseholdSeries> one{constant_household(0.3, 0.4, 0.5, 0.2)};
    const auto same = representative_profile(one);
    CHECK(same.net_grid[100] == 0.3);
    CHECK(same.grid_import[100] == 0.4);

    CHECK_THROWS_AS(representative_profile(std::vector<HouseholdSeries>{}), ContractViolation);
}

TEST_CASE("residual demand arithmetic") {
    const auto network = TimeSeries::constant(2030, 60, 1000.0, Unit::MWhPerStep);
    // Per household 1.0 kWh/h underlying and -0.2 kWh/h net, as two half-hours.
    const std::vector<HouseholdSeries> cohort{constant_household(-0.1, 0.0, 0.5, 0.8)};
    const auto rep = representative_profile(cohort);
    const auto r = build_residual(network, rep, FleetSpec{500'000});
    CHECK(r.reduction[0] == doctest::Approx(600.0));
    CHECK(r.residual[0] == doctest::Approx(400.0));
    CHECK(r.residual[8759] == doctest::Approx(400.0));
    CHECK(r.household_pv_generation[0] == doctest::Approx(800.0));
    CHECK(r.household_demand[0] == doctest::Approx(500.0));
    CHECK(r.household_net_grid[0] == doctest::Approx(-100.0));
    CHECK_THROWS_AS(build_residual(network, rep, FleetSpec{0}), ValidationError);
}

TEST_CASE("no prosumage leaves network demand unchanged") {
    std::vector<double> v(8760);
    for (std::size_t h = 0; h < v.size(); ++h) v[h] = 1500.0 + 0.37 * static_cast<double>(h % 24);
    const TimeSeries network(2030, 60, v, Unit::MWhPerStep);
    // Net equal to underlying demand: nothing self-supplied.
    const std::vector<HouseholdSeries> cohort{constant_household(0.6, 0.6, 0.6, 0.0)};
    const auto r = build_residual(network, representative_profile(cohort), FleetSpec{});
    for (std::size_t h = 0; h < v.size(); ++h) REQUIRE(r.residual[h] == v[h]);

    const auto ref = reference_residual(network);
    for (std::size_t h = 0; h < v.size(); ++h) {
        REQUIRE(ref.residual[h] == v[h]);
        REQUIRE(ref.reduction[h] == 0.0);
    }
}

TEST_CASE("residual demand can be negative in net export hours") {
    const auto network = TimeSeries::constant(2030, 60, 100.0, Unit::MWhPerStep);
    const std::vector<HouseholdSeries> cohort{constant_household(-0.5, 0.0, 0.2, 1.0)};
    const auto r = build_residual(network, representative_profile(cohort), FleetSpec{500'000});
    CHECK(r.residual[0] == doctest::Approx(100.0 - 700.0));
}

TEST_CASE("residual files round trip exactly") {
    TempDir dir("residual");
    std::vector<double> v(8760);
    for (std::size_t h = 0; h < v.size(); ++h) v[h] = 1234.5 + 0.1 * static_cast<double>(h % 17);
    const TimeSeries network(2030, 60, v, Unit::MWhPerStep);
    const std::vector<HouseholdSeries> cohort{constant_household(0.13, 0.21, 0.33, 0.41)};
    const auto r = build_residual(network, representative_profile(cohort), FleetSpec{400'000});
    write_residual_csv(dir / "r.csv", r);
    const auto back = read_residual_csv(dir / "r.csv");
    for (std::size_t h = 0; h < v.size(); h += 13) {
        REQUIRE(back.residual[h] == r.residual[h]);
        REQUIRE(back.network_demand[h] == r.network_demand[h]);
        REQUIRE(back.household_pv_generation[h] == r.household_pv_generation[h]);
        REQUIRE(back.household_import[h] == r.household_import[h]);
    }
}
