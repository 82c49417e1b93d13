// Writes the bundled synthetic dataset: household profiles, network demand,
// wind availability, cost curves and the default technology catalog.
//
// Random numbers come from mt19937_64 with hand-written transforms so the
// output is identical across standard libraries.

#include "prosumage/csv.hpp"
#include "prosumage/sector.hpp"
#include "prosumage/timeseries.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <numbers>
#include <random>

namespace {

using namespace prosumage;
constexpr double kPi = std::numbers::pi;

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double normal() {
        // Box-Muller, one value per call.
        const double u1 = std::max(uniform(), 1e-300);
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
    }

private:
    std::mt19937_64 engine_;
};

double round_to(double v, double quantum) {
    const double inv = std::round(1.0 / quantum);
    return std::round(v * inv) / inv;
}

// Southern-hemisphere season: +1 in mid-January (summer), -1 in mid-July.
double summerness(int day) { return std::cos(2.0 * kPi * (day - 15) / 365.0); }

std::vector<double> pv_yield_profile(Rng& rng) {
    const std::size_t n = steps_per_year(30);
    std::vector<double> out(n, 0.0);
    double cloud = 0.8;
    for (int day = 0; day < 365; ++day) {
        const double s = summerness(day);
        const double daylength = 12.0 + 2.2 * s;  // hours
        const double sunrise = 12.0 - daylength / 2.0;
        // Cloudiness persists from day to day.
        cloud = std::clamp(0.6 * cloud + 0.4 * (0.55 + 0.45 * rng.uniform()) + 0.08 * s, 0.15, 1.0);
        const double peak_kw = 0.78 + 0.06 * s;
        for (int k = 0; k < 48; ++k) {
            const double t = (k + 0.5) * 0.5;  // mid-step hour
            const double x = (t - sunrise) / daylength;
            if (x <= 0.0 || x >= 1.0) continue;
            const double shape = std::pow(std::sin(kPi * x), 1.3);
            const double noise = 1.0 + 0.05 * rng.normal();
            out[static_cast<std::size_t>(day * 48 + k)] =
                round_to(std::clamp(peak_kw * shape * cloud * noise, 0.0, 0.95) * 0.5, 1e-4);
        }
    }
    return out;
}

std::vector<double> demand_profile(Rng& rng) {
    const std::size_t n = steps_per_year(30);
    std::vector<double> out(n);
    const double scale = 0.8 + 0.5 * rng.uniform();        // household size
    const double evening = 0.6 + 0.6 * rng.uniform();      // evening peak strength
    const double cooling = 0.2 + 0.5 * rng.uniform();      // summer air-conditioning
    const double daytime = 0.1 + 0.4 * rng.uniform();      // occupancy during the day
    for (std::size_t i = 0; i < n; ++i) {
        const int day = static_cast<int>(i / 48);
        const double hour = (i % 48) * 0.5;
        const double s = summerness(day);
        const bool weekend = (day + 2) % 7 >= 5;
        const double morning = std::exp(-0.5 * std::pow((hour - 7.5) / 1.2, 2));
        const double eve = std::exp(-0.5 * std::pow((hour - 19.0) / 2.0, 2));
        const double midday = std::exp(-0.5 * std::pow((hour - 13.0) / 3.0, 2));
        double kw = 0.25 + 0.5 * morning + evening * 1.4 * eve + (weekend ? 0.5 : daytime) * midday;
        kw += std::max(0.0, s) * cooling * 2.0 * std::exp(-0.5 * std::pow((hour - 16.5) / 3.0, 2));
        kw += std::max(0.0, -s) * 0.4 * eve;  // winter heating
        kw *= scale * (1.0 + 0.15 * rng.normal());
        out[i] = round_to(std::max(0.05, kw) * 0.5, 1e-4);
    }
    return out;
}

std::vector<double> network_demand(Rng& rng) {
    const std::size_t n = kHoursPerYear;
    std::vector<double> out(n);
    double weather = 0.0;
    for (std::size_t h = 0; h < n; ++h) {
        const int day = static_cast<int>(h / 24);
        const double hour = static_cast<double>(h % 24);
        const double s = summerness(day);
        const bool weekend = (day + 2) % 7 >= 5;
        if (h % 24 == 0) weather = 0.7 * weather + 0.3 * rng.normal();
        const double diurnal = 0.80 + 0.18 * std::exp(-0.5 * std::pow((hour - 11.0) / 4.0, 2)) +
                               0.32 * std::exp(-0.5 * std::pow((hour - 18.5) / 2.2, 2)) -
                               0.12 * std::exp(-0.5 * std::pow((hour - 3.5) / 2.0, 2));
        const double seasonal = 1.0 + 0.10 * s * s + 0.05 * s;
        double mw = 1850.0 * diurnal * seasonal * (weekend ? 0.92 : 1.0) * (1.0 + 0.04 * weather);
        mw *= 1.0 + 0.01 * rng.normal();
        out[h] = round_to(mw, 0.01);
    }
    return out;
}

std::vector<double> wind_availability(Rng& rng) {
    std::vector<double> out(kHoursPerYear);
    double x = 0.0;
    for (std::size_t h = 0; h < out.size(); ++h) {
        const int day = static_cast<int>(h / 24);
        const double hour = static_cast<double>(h % 24);
        x = 0.97 * x + 0.25 * rng.normal();
        // Afternoon sea breeze and a windier winter.
        const double mean = 0.36 - 0.05 * summerness(day) + 0.06 * std::sin(2.0 * kPi * (hour - 10.0) / 24.0);
        const double v = mean + 0.18 * std::tanh(x);
        out[h] = round_to(std::clamp(v, 0.0, 1.0), 1e-4);
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Generate the bundled synthetic dataset"};
    std::filesystem::path out = "data/synthetic";
    int households = 20;
    int year = 2030;
    std::uint64_t seed = 20190701;
    app.add_option("--out", out, "Output directory");
    app.add_option("--households", households, "Number of households")->check(CLI::Range(1, 500));
    app.add_option("--year", year, "Calendar year used for timestamps");
    app.add_option("--seed", seed, "Generator seed");
    CLI11_PARSE(app, argc, argv);

    try {
        std::filesystem::create_directories(out);
        Rng rng(seed);

        std::vector<ProfileSet> profiles;
        for (int i = 0; i < households; ++i) {
            char id[16];
            std::snprintf(id, sizeof id, "H%02d", i + 1);
            auto demand = demand_profile(rng);
            auto pv = pv_yield_profile(rng);
            profiles.push_back({id, TimeSeries(year, 30, std::move(demand), Unit::KWhPerStep),
                                TimeSeries(year, 30, std::move(pv), Unit::KWhPerKWpPerStep)});
        }
        write_profiles_csv(out / "profiles.csv", profiles);

        const TimeSeries network(year, 60, network_demand(rng), Unit::MWhPerStep);
        const std::vector<std::string> demand_names{"demand_mwh"};
        const std::vector<const TimeSeries*> demand_series{&network};
        write_series_csv(out / "network_demand.csv", demand_names, demand_series);

        const TimeSeries wind(year, 60, wind_availability(rng), Unit::Availability);
        const std::vector<std::string> wind_names{"wind"};
        const std::vector<const TimeSeries*> wind_series{&wind};
        write_series_csv(out / "wind_availability.csv", wind_names, wind_series);

        // Raw installed-cost trajectories before local scaling (0.78 PV, 0.73 battery).
        csv::Writer costs({"year", "pv_cost_aud_per_kwp", "battery_cost_aud_per_kwh"});
        for (int y = 2019; y <= 2030; ++y) {
            const double pv = 1292.0 / 0.78 * std::pow(0.955, y - 2019);
            const double battery = 1172.0 / 0.73 * std::pow(0.93, y - 2019);
            costs.add_row({std::to_string(y), csv::format_double(round_to(pv, 0.01)),
                           csv::format_double(round_to(battery, 0.01))});
        }
        costs.commit(out / "cost_curves.csv");

        write_catalog_csv(out / "catalog.csv", default_catalog());
        std::cout << "wrote " << households << " households to " << out.string() << "\n";
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
