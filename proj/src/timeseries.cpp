#include "prosumage/timeseries.hpp"

#include "prosumage/csv.hpp"
#include "prosumage/errors.hpp"

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <optional>

namespace prosumage {

namespace {

constexpr std::array<int, 12> kDaysInMonth{31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};

struct Stamp {
    std::chrono::year_month_day date;
    int minute_of_day;
};

std::optional<Stamp> parse_timestamp(std::string_view text) {
    int y = 0, mo = 0, d = 0, h = 0, mi = 0, s = 0;
    char sep = 0;
    const std::string owned(text);
    const int n = std::sscanf(owned.c_str(), "%d-%d-%d%c%d:%d:%d", &y, &mo, &d, &sep, &h, &mi, &s);
    if (n < 6 || (sep != 'T' && sep != ' ')) return std::nullopt;
    const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(mo)},
                                          std::chrono::day{static_cast<unsigned>(d)}};
    if (!ymd.ok() || h < 0 || h > 23 || mi < 0 || mi > 59) return std::nullopt;
    return Stamp{ymd, h * 60 + mi};
}

bool is_feb29(const std::chrono::year_month_day& ymd) {
    return ymd.month() == std::chrono::February && ymd.day() == std::chrono::day{29};
}

long long absolute_minutes(const Stamp& s) {
    const auto days = std::chrono::sys_days{s.date}.time_since_epoch().count();
    return static_cast<long long>(days) * 1440 + s.minute_of_day;
}

bool is_missing(std::string_view field) {
    return field.empty() || field == "NA" || field == "NaN" || field == "nan" || field == "null";
}

bool is_energy(Unit unit) {
    return unit == Unit::KWhPerStep || unit == Unit::MWhPerStep || unit == Unit::KWhPerKWpPerStep;
}

}  // namespace

std::string_view to_string(Unit unit) {
    switch (unit) {
        case Unit::KWhPerStep: return "kWh-per-step";
        case Unit::MWhPerStep: return "MWh-per-step";
        case Unit::MW: return "MW";
        case Unit::Availability: return "availability";
        case Unit::KWhPerKWpPerStep: return "kWh-per-kWp-per-step";
    }
    return "?";
}

Unit unit_from_string(std::string_view text) {
    for (Unit u : {Unit::KWhPerStep, Unit::MWhPerStep, Unit::MW, Unit::Availability, Unit::KWhPerKWpPerStep}) {
        if (to_string(u) == text) return u;
    }
    throw ValidationError("unknown unit '" + std::string(text) + "'");
}

std::size_t steps_per_year(int step_minutes) {
    if (step_minutes != 30 && step_minutes != 60) {
        throw ContractViolation("step_minutes must be 30 or 60, got " + std::to_string(step_minutes));
    }
    return static_cast<std::size_t>(kHoursPerYear * 60 / step_minutes);
}

TimeSeries::TimeSeries(int start_year, int step_minutes, std::vector<double> values, Unit unit)
    : start_year_(start_year), step_minutes_(step_minutes), values_(std::move(values)), unit_(unit) {
    const auto expected = steps_per_year(step_minutes);
    if (values_.size() != expected) {
        throw ContractViolation("series has " + std::to_string(values_.size()) + " steps, a " +
                                std::to_string(step_minutes) + "-minute year needs " + std::to_string(expected));
    }
    for (std::size_t i = 0; i < values_.size(); ++i) {
        const double v = values_[i];
        if (!std::isfinite(v)) throw ContractViolation("non-finite value at step " + std::to_string(i));
        if (unit_ == Unit::Availability && (v < 0.0 || v > 1.0)) {
            throw ContractViolation("availability outside [0,1] at step " + std::to_string(i));
        }
    }
}

TimeSeries TimeSeries::constant(int start_year, int step_minutes, double value, Unit unit) {
    return TimeSeries(start_year, step_minutes, std::vector<double>(steps_per_year(step_minutes), value), unit);
}

TimeSeries TimeSeries::with_values(std::vector<double> values) const {
    return TimeSeries(start_year_, step_minutes_, std::move(values), unit_);
}

TimeSeries TimeSeries::with_values(std::vector<double> values, Unit unit) const {
    return TimeSeries(start_year_, step_minutes_, std::move(values), unit);
}

std::string model_timestamp(int year, int step_minutes, std::size_t index) {
    const std::size_t minute_of_year = index * static_cast<std::size_t>(step_minutes);
    std::size_t day = minute_of_year / 1440;
    const std::size_t minute = minute_of_year % 1440;
    int month = 0;
    while (month < 11 && day >= static_cast<std::size_t>(kDaysInMonth[month])) {
        day -= kDaysInMonth[month];
        ++month;
    }
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02zu:%02zu", year, month + 1, static_cast<int>(day) + 1,
                  minute / 60, minute % 60);
    return buf;
}

IngestResult ingest_profiles(const std::filesystem::path& path, const ProfileSchema& schema) {
    const auto table = csv::read(path);
    const auto ts_col = table.column(schema.timestamp_column);
    const std::string src = path.string();

    // Pair up household columns in header order.
    struct Columns {
        std::string id;
        std::size_t demand;
        std::size_t pv;
    };
    std::vector<Columns> households;
    for (std::size_t c = 0; c < table.header.size(); ++c) {
        const auto& name = table.header[c];
        if (name.size() <= schema.demand_suffix.size() ||
            name.compare(name.size() - schema.demand_suffix.size(), schema.demand_suffix.size(),
                         schema.demand_suffix) != 0) {
            continue;
        }
        std::string id = name.substr(0, name.size() - schema.demand_suffix.size());
        auto pv = table.find_column(id + schema.pv_suffix);
        if (!pv) throw ParseError(src, 1, "household '" + id + "' has no " + id + schema.pv_suffix + " column");
        households.push_back({std::move(id), c, *pv});
    }
    if (households.empty()) throw ParseError(src, 1, "no household columns matching *" + schema.demand_suffix);

    const auto expected = steps_per_year(schema.step_minutes);
    std::vector<std::size_t> kept_rows;
    kept_rows.reserve(expected);
    std::optional<long long> previous;
    long long skipped_minutes = 0;
    int start_year = 0;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto line = table.line_numbers[r];
        auto stamp = parse_timestamp(table.rows[r][ts_col]);
        if (!stamp) throw ParseError(src, line, "bad timestamp '" + table.rows[r][ts_col] + "'");
        if (is_feb29(stamp->date)) {
            if (stamp->minute_of_day == 0) skipped_minutes += 1440;
            continue;
        }
        const long long t = absolute_minutes(*stamp) - skipped_minutes;
        if (previous && t - *previous != schema.step_minutes) {
            throw ParseError(src, line,
                             "timestamp gap: expected a " + std::to_string(schema.step_minutes) + "-minute step");
        }
        if (!previous) start_year = static_cast<int>(stamp->date.year());
        previous = t;
        kept_rows.push_back(r);
    }
    if (kept_rows.size() != expected) {
        throw ParseError(src, table.rows.empty() ? 1 : table.line_numbers.back(),
                         "expected " + std::to_string(expected) + " steps, found " + std::to_string(kept_rows.size()));
    }

    IngestResult result;
    for (const auto& h : households) {
        std::vector<double> demand, pv;
        demand.reserve(expected);
        pv.reserve(expected);
        std::optional<RejectedHousehold> rejection;
        for (auto r : kept_rows) {
            const auto& row = table.rows[r];
            const auto line = table.line_numbers[r];
            const auto& d = row[h.demand];
            const auto& p = row[h.pv];
            if (is_missing(d) || is_missing(p)) {
                rejection = RejectedHousehold{h.id, line, "missing value"};
                break;
            }
            const double dv = csv::parse_double(d, path, line);
            const double pvv = csv::parse_double(p, path, line);
            if (dv < 0.0 || pvv < 0.0) {
                rejection = RejectedHousehold{h.id, line, "negative value"};
                break;
            }
            demand.push_back(dv);
            pv.push_back(pvv);
        }
        if (rejection) {
            result.rejected.push_back(std::move(*rejection));
            continue;
        }
        result.profiles.push_back(ProfileSet{
            h.id, TimeSeries(start_year, schema.step_minutes, std::move(demand), Unit::KWhPerStep),
            TimeSeries(start_year, schema.step_minutes, std::move(pv), Unit::KWhPerKWpPerStep)});
    }
    return result;
}

TimeSeries read_series_csv(const std::filesystem::path& path, std::string_view column, int step_minutes,
                           Unit unit) {
    const auto table = csv::read(path);
    const auto ts_col = table.column("timestamp");
    const auto col = table.column(column);
    std::vector<double> values;
    values.reserve(table.rows.size());
    std::optional<long long> previous;
    long long skipped = 0;
    int start_year = 0;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto line = table.line_numbers[r];
        auto stamp = parse_timestamp(table.rows[r][ts_col]);
        if (!stamp) throw ParseError(path.string(), line, "bad timestamp '" + table.rows[r][ts_col] + "'");
        if (is_feb29(stamp->date)) {
            if (stamp->minute_of_day == 0) skipped += 1440;
            continue;
        }
        const long long t = absolute_minutes(*stamp) - skipped;
        if (previous && t - *previous != step_minutes) throw ParseError(path.string(), line, "timestamp gap");
        if (!previous) start_year = static_cast<int>(stamp->date.year());
        previous = t;
        values.push_back(csv::parse_double(table.rows[r][col], path, line));
    }
    if (values.size() != steps_per_year(step_minutes)) {
        throw ParseError(path.string(), table.rows.empty() ? 1 : table.line_numbers.back(),
                         "expected " + std::to_string(steps_per_year(step_minutes)) + " steps, found " +
                             std::to_string(values.size()));
    }
    return TimeSeries(start_year, step_minutes, std::move(values), unit);
}

void write_series_csv(const std::filesystem::path& path, std::span<const std::string> names,
                      std::span<const TimeSeries* const> series) {
    if (names.size() != series.size() || series.empty()) {
        throw ContractViolation("write_series_csv: need one name per series");
    }
    const auto& first = *series.front();
    for (const auto* s : series) {
        if (s->size() != first.size() || s->step_minutes() != first.step_minutes()) {
            throw ContractViolation("write_series_csv: series grids differ");
        }
    }
    std::vector<std::string> header{"timestamp"};
    header.insert(header.end(), names.begin(), names.end());
    csv::Writer out(std::move(header));
    std::vector<std::string> row(series.size() + 1);
    for (std::size_t i = 0; i < first.size(); ++i) {
        row[0] = model_timestamp(first.start_year(), first.step_minutes(), i);
        for (std::size_t k = 0; k < series.size(); ++k) row[k + 1] = csv::format_double((*series[k])[i]);
        out.add_row(row);
    }
    out.commit(path);
}

void write_profiles_csv(const std::filesystem::path& path, std::span<const ProfileSet> profiles,
                        const ProfileSchema& schema) {
    std::vector<std::string> names;
    std::vector<const TimeSeries*> series;
    for (const auto& p : profiles) {
        names.push_back(p.household_id + schema.demand_suffix);
        series.push_back(&p.demand);
        names.push_back(p.household_id + schema.pv_suffix);
        series.push_back(&p.pv_yield);
    }
    // write_series_csv names its first column "timestamp"; honour a custom schema name.
    if (schema.timestamp_column != "timestamp") {
        throw ContractViolation("write_profiles_csv supports the default timestamp column only");
    }
    write_series_csv(path, names, series);
}

TimeSeries resample_to_hourly(const TimeSeries& series) {
    if (series.step_minutes() != 30) throw ContractViolation("resample_to_hourly expects a 30-minute series");
    if (!is_energy(series.unit())) {
        throw ContractViolation("resample_to_hourly sums energy; unit " + std::string(to_string(series.unit())) +
                                " cannot be summed");
    }
    const auto in = series.values();
    std::vector<double> out(in.size() / 2);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = in[2 * i] + in[2 * i + 1];
    return TimeSeries(series.start_year(), 60, std::move(out), series.unit());
}

double annual_sum(std::span<const double> values) {
    // Neumaier compensated summation.
    double sum = 0.0;
    double c = 0.0;
    for (double v : values) {
        const double t = sum + v;
        if (std::abs(sum) >= std::abs(v)) {
            c += (sum - t) + v;
        } else {
            c += (v - t) + sum;
        }
        sum = t;
    }
    return sum + c;
}

double annual_sum(const TimeSeries& series) { return annual_sum(series.values()); }

}  // namespace prosumage
