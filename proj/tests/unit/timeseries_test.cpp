#include "doctest.h"
#include "temp_dir.hpp"

#include "prosumage/csv.hpp"
#include "prosumage/errors.hpp"
#include "prosumage/timeseries.hpp"

#include <fstream>
#include <random>
#include <sstream>

using namespace prosumage;

namespace {

std::vector<double> filled(std::size_t n, double v) { return std::vector<double>(n, v); }

// Writes a one-household profile file, letting the caller edit rows.
template <class Edit>
void write_profile_file(const std::filesystem::path& path, int year, Edit&& edit) {
    std::ostringstream out;
    out << "timestamp,A_demand,A_pv,B_demand,B_pv\n";
    for (std::size_t i = 0; i < steps_per_year(30); ++i) {
        std::string row = model_timestamp(year, 30, i) + ",0.5,0.1,0.25,0";
        if (edit(i, row)) out << row << "\n";
    }
    std::ofstream(path) << out.str();
}

}  // namespace

TEST_CASE("steps per year and timestamps follow the 365-day calendar") {
    CHECK(steps_per_year(30) == 17520);
    CHECK(steps_per_year(60) == 8760);
    CHECK_THROWS_AS(steps_per_year(15), ContractViolation);
    CHECK(model_timestamp(2030, 30, 0) == "2030-01-01T00:00");
    CHECK(model_timestamp(2030, 30, 3) == "2030-01-01T01:30");
    CHECK(model_timestamp(2030, 60, 8759) == "2030-12-31T23:00");
    // 2020 is a leap year; the model calendar skips 29 February.
    CHECK(model_timestamp(2020, 60, 59 * 24) == "2020-03-01T00:00");
}

TEST_CASE("time series rejects wrong length and out-of-range availability") {
    CHECK_THROWS_AS(TimeSeries(2030, 60, filled(100, 1.0), Unit::MWhPerStep), ContractViolation);
    CHECK_THROWS_AS(TimeSeries(2030, 60, filled(8760, 1.5), Unit::Availability), ContractViolation);
    const auto ok = TimeSeries::constant(2030, 60, 0.5, Unit::Availability);
    CHECK(ok.size() == 8760);
    CHECK(unit_from_string(to_string(Unit::KWhPerKWpPerStep)) == Unit::KWhPerKWpPerStep);
}

TEST_CASE("resample_to_hourly sums half-hour pairs") {
    std::vector<double> v = filled(17520, 0.0);
    v[0] = 1.0;
    v[1] = 2.0;
    v[2] = 0.5;
    v[3] = 0.5;
    const auto hourly = resample_to_hourly(TimeSeries(2030, 30, v, Unit::KWhPerStep));
    CHECK(hourly.step_minutes() == 60);
    CHECK(hourly.size() == 8760);
    CHECK(hourly[0] == 3.0);
    CHECK(hourly[1] == 1.0);

    const auto zeros = resample_to_hourly(TimeSeries::constant(2030, 30, 0.0, Unit::KWhPerStep));
    CHECK(annual_sum(zeros) == 0.0);

    CHECK_THROWS_AS(resample_to_hourly(TimeSeries::constant(2030, 60, 1.0, Unit::KWhPerStep)), ContractViolation);
    CHECK_THROWS_AS(resample_to_hourly(TimeSeries::constant(2030, 30, 0.5, Unit::Availability)), ContractViolation);
}

TEST_CASE("resampling conserves the annual sum of a random year") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 3.0);
    std::vector<double> v(17520);
    for (auto& x : v) x = u(rng);
    const TimeSeries s(2030, 30, v, Unit::KWhPerStep);
    // Oracle: long double accumulation.
    long double reference = 0.0L;
    for (double x : v) reference += x;
    const double total = annual_sum(resample_to_hourly(s));
    CHECK(total == doctest::Approx(static_cast<double>(reference)).epsilon(1e-14));
}

TEST_CASE("annual_sum of constant series") {
    CHECK(annual_sum(TimeSeries::constant(2030, 30, 1.0, Unit::KWhPerStep)) == 17520.0);
    CHECK(annual_sum(TimeSeries::constant(2030, 60, 2.0, Unit::MWhPerStep)) == 17520.0);
}

TEST_CASE("ingest reads complete households") {
    TempDir dir("ingest");
    write_profile_file(dir / "p.csv", 2030, [](std::size_t, std::string&) { return true; });
    const auto r = ingest_profiles(dir / "p.csv");
    REQUIRE(r.profiles.size() == 2);
    CHECK(r.rejected.empty());
    CHECK(r.profiles[0].household_id == "A");
    CHECK(r.profiles[0].demand.size() == 17520);
    CHECK(r.profiles[0].demand.start_year() == 2030);
    CHECK(annual_sum(r.profiles[0].demand) == doctest::Approx(0.5 * 17520));
    CHECK(r.profiles[1].pv_yield[10] == 0.0);
}

TEST_CASE("ingest rejects a household with a missing cell and reports it") {
    TempDir dir("ingest_missing");
    write_profile_file(dir / "p.csv", 2030, [](std::size_t i, std::string& row) {
        if (i == 100) row = model_timestamp(2030, 30, i) + ",0.5,0.1,NA,0";
        return true;
    });
    const auto r = ingest_profiles(dir / "p.csv");
    REQUIRE(r.profiles.size() == 1);
    CHECK(r.profiles[0].household_id == "A");
    REQUIRE(r.rejected.size() == 1);
    CHECK(r.rejected[0].household_id == "B");
    CHECK(r.rejected[0].line == 102);  // header is line 1, step 100 is line 102
}

TEST_CASE("ingest fails on a missing timestamp with the line number") {
    TempDir dir("ingest_gap");
    write_profile_file(dir / "p.csv", 2030, [](std::size_t i, std::string&) { return i != 500; });
    try {
        ingest_profiles(dir / "p.csv");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 502);  // the row after the gap carries the wrong timestamp
    }
}

TEST_CASE("ingest drops 29 February in leap years") {
    TempDir dir("ingest_leap");
    // Leap-year file: write the full 366-day calendar by hand.
    std::ostringstream out;
    out << "timestamp,A_demand,A_pv\n";
    for (int day = 0; day < 366; ++day) {
        const int month_days[] = {31, 29, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
        int m = 0, d = day;
        while (d >= month_days[m]) d -= month_days[m++];
        for (int k = 0; k < 48; ++k) {
            char stamp[32];
            std::snprintf(stamp, sizeof stamp, "2020-%02d-%02dT%02d:%02d", m + 1, d + 1, k / 2, (k % 2) * 30);
            const double value = (m == 1 && d == 28) ? 99.0 : 1.0;
            out << stamp << "," << value << ",0\n";
        }
    }
    std::ofstream(dir / "leap.csv") << out.str();
    const auto r = ingest_profiles(dir / "leap.csv");
    REQUIRE(r.profiles.size() == 1);
    CHECK(r.profiles[0].demand.size() == 17520);
    CHECK(annual_sum(r.profiles[0].demand) == 17520.0);  // no 99s survived
}

TEST_CASE("profile and series files round trip") {
    TempDir dir("roundtrip");
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> d(17520), p(17520);
    for (std::size_t i = 0; i < d.size(); ++i) {
        d[i] = u(rng);
        p[i] = 0.5 * u(rng);
    }
    std::vector<ProfileSet> in{{"X1", TimeSeries(2030, 30, d, Unit::KWhPerStep),
                                TimeSeries(2030, 30, p, Unit::KWhPerKWpPerStep)}};
    write_profiles_csv(dir / "p.csv", in);
    const auto back = ingest_profiles(dir / "p.csv");
    REQUIRE(back.profiles.size() == 1);
    for (std::size_t i = 0; i < d.size(); ++i) {
        REQUIRE(back.profiles[0].demand[i] == d[i]);
        REQUIRE(back.profiles[0].pv_yield[i] == p[i]);
    }

    const auto hourly = TimeSeries(2030, 60, std::vector<double>(d.begin(), d.begin() + 8760), Unit::MWhPerStep);
    const std::vector<std::string> names{"load"};
    const std::vector<const TimeSeries*> series{&hourly};
    write_series_csv(dir / "s.csv", names, series);
    const auto s = read_series_csv(dir / "s.csv", "load", 60, Unit::MWhPerStep);
    CHECK(s.size() == 8760);
    CHECK(s[1234] == hourly[1234]);
    CHECK_THROWS_AS(read_series_csv(dir / "s.csv", "missing", 60, Unit::MWhPerStep), ParseError);
}

TEST_CASE("csv parsing reports the offending line") {
    const auto t = csv::parse("a,b\n1,2\n3,x\n");
    CHECK(t.rows.size() == 2);
    CHECK(csv::parse_double(t.rows[0][1], "mem", t.line_numbers[0]) == 2.0);
    try {
        csv::parse_double(t.rows[1][1], "mem", t.line_numbers[1]);
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 3);
    }
    CHECK(csv::format_double(0.1) == "0.1");
    CHECK(csv::format_double(-0.0) == "0");
}
