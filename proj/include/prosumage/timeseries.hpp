#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace prosumage {

enum class Unit {
    KWhPerStep,
    MWhPerStep,
    MW,
    Availability,       // dimensionless, in [0, 1]
    KWhPerKWpPerStep,   // specific PV yield
};

std::string_view to_string(Unit unit);
Unit unit_from_string(std::string_view text);

inline constexpr int kHoursPerYear = 8760;

/// Number of steps in a (non-leap) model year; step_minutes must be 30 or 60.
std::size_t steps_per_year(int step_minutes);

/// Fixed-step series spanning exactly one 365-day model year. Immutable.
class TimeSeries {
public:
    TimeSeries(int start_year, int step_minutes, std::vector<double> values, Unit unit);

    static TimeSeries constant(int start_year, int step_minutes, double value, Unit unit);

    int start_year() const noexcept { return start_year_; }
    int step_minutes() const noexcept { return step_minutes_; }
    Unit unit() const noexcept { return unit_; }
    std::size_t size() const noexcept { return values_.size(); }
    std::span<const double> values() const noexcept { return values_; }
    double operator[](std::size_t i) const { return values_[i]; }

    /// Same grid, new values and (optionally) unit.
    TimeSeries with_values(std::vector<double> values) const;
    TimeSeries with_values(std::vector<double> values, Unit unit) const;

private:
    int start_year_;
    int step_minutes_;
    std::vector<double> values_;
    Unit unit_;
};

/// Half-hourly (or hourly) demand and per-kWp PV yield for one household.
struct ProfileSet {
    std::string household_id;
    TimeSeries demand;    // kWh per step
    TimeSeries pv_yield;  // kWh per kWp per step
};

/// Column mapping for household profile files. A household `H` contributes the
/// columns `H<demand_suffix>` and `H<pv_suffix>`.
struct ProfileSchema {
    std::string timestamp_column = "timestamp";
    std::string demand_suffix = "_demand";
    std::string pv_suffix = "_pv";
    int step_minutes = 30;
};

struct RejectedHousehold {
    std::string household_id;
    std::size_t line;  // first file line with a missing value
    std::string reason;
};

struct IngestResult {
    std::vector<ProfileSet> profiles;
    std::vector<RejectedHousehold> rejected;
};

/// Reads a wide household profile CSV. Rows dated 29 February are dropped so
/// every year has 365 days; any other gap in the timestamp grid is a ParseError.
/// Households with an empty or NA cell are rejected and reported, not parsed.
IngestResult ingest_profiles(const std::filesystem::path& path, const ProfileSchema& schema = {});

/// Single-column series file: `timestamp,<column>`.
TimeSeries read_series_csv(const std::filesystem::path& path, std::string_view column, int step_minutes,
                           Unit unit);

/// Writes `timestamp,<name...>` with one row per step. All series must share a grid.
void write_series_csv(const std::filesystem::path& path, std::span<const std::string> names,
                      std::span<const TimeSeries* const> series);

/// Writes profiles in the layout `ingest_profiles` reads.
void write_profiles_csv(const std::filesystem::path& path, std::span<const ProfileSet> profiles,
                        const ProfileSchema& schema = {});

/// ISO-8601 local timestamp (`YYYY-MM-DDTHH:MM`) of step `index` on the non-leap model calendar.
std::string model_timestamp(int year, int step_minutes, std::size_t index);

/// Sums consecutive half-hour pairs. Energy units only.
TimeSeries resample_to_hourly(const TimeSeries& series);

/// Compensated sum of all values.
double annual_sum(const TimeSeries& series);
double annual_sum(std::span<const double> values);

}  // namespace prosumage
