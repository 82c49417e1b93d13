#pragma once

// Independent re-implementations used as test oracles. They share no code with
// the library: constants are restated here and the loops are written from the
// model rules, not from the library sources.

#include <map>
#include <optional>
#include <utility>
#include <vector>

namespace oracle {

struct Vintage {
    int year;
    double size;
};

struct Household {
    std::vector<double> demand;    // kWh per half hour
    std::vector<double> pv_yield;  // kWh per kWp per half hour
    std::vector<Vintage> pv;
    std::vector<Vintage> battery;
};

struct Prices {
    std::map<int, double> pv_per_kwp;    // already scaled to local prices
    std::map<int, double> battery_per_kwh;
};

struct Choice {
    double pv;
    double battery;
    double npv;
};

struct YearFlows {
    double imports = 0.0;
    double exports = 0.0;
    double charge = 0.0;
    double discharge = 0.0;
};

/// Greedy half-hourly dispatch for one year with the given usable sizes.
YearFlows dispatch_year(const Household& h, double pv_kwp, double battery_kwh);

/// Annual bill under the flat tariff with the 5 kWp FiT eligibility cap.
double bill(const YearFlows& f, double alive_pv_kwp, double fit_fraction, int year);

/// Enumerates all 21 x 19 additions for `year` and applies the NPV / payback rules.
std::optional<Choice> best_addition(const Household& h, const Prices& prices, double fit_fraction, int year);

/// Replays the yearly decision loop from an empty household.
std::vector<std::pair<int, Choice>> replay(Household h, const Prices& prices, double fit_fraction, int first_year,
                                           int last_year);

// Brute-force capacity expansion for a system without storage: every capacity
// combination on a grid is dispatched in merit order and the cheapest feasible
// one is kept.
struct Plant {
    double capacity_cost;  // AUD/MW for the whole horizon
    double energy_cost;    // AUD/MWh
    std::vector<double> availability;  // empty: fully dispatchable
};

struct GridSearch {
    double cost = 0.0;
    std::vector<double> capacity;
};

GridSearch capacity_grid_search(const std::vector<double>& demand, const std::vector<Plant>& plants,
                                double max_capacity, int points);

}  // namespace oracle
