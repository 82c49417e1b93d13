#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace oracle {

namespace {

constexpr double kRetail2019 = 0.29;
constexpr double kEscalation = 1.04;
constexpr double kFitCapKwp = 5.0;
constexpr double kDailyCharge = 1.0;
constexpr double kDiscount = 0.05;
constexpr int kHorizon = 10;
constexpr int kPaybackLimit = 5;
constexpr double kRoundtrip = 0.92;
constexpr double kHoursOfStorage = 2.5;
constexpr int kPvLife = 25;
constexpr int kBatteryLife = 10;
constexpr double kPvEnd = 0.80;
constexpr double kBatteryEnd = 0.70;

double remaining(int age, int life, double end) {
    if (age < 0 || age >= life) return 0.0;
    return 1.0 - (1.0 - end) * age / life;
}

struct Sizes {
    double usable_pv = 0.0;
    double usable_battery = 0.0;
    double alive_pv = 0.0;
    double alive_battery = 0.0;
};

Sizes sizes(const std::vector<Vintage>& pv, const std::vector<Vintage>& battery, int year) {
    Sizes s;
    for (const auto& v : pv) {
        const double f = remaining(year - v.year, kPvLife, kPvEnd);
        s.usable_pv += f * v.size;
        if (f > 0.0) s.alive_pv += v.size;
    }
    for (const auto& v : battery) {
        const double f = remaining(year - v.year, kBatteryLife, kBatteryEnd);
        s.usable_battery += f * v.size;
        if (f > 0.0) s.alive_battery += v.size;
    }
    return s;
}

double horizon_bill(const Household& h, const std::vector<Vintage>& pv, const std::vector<Vintage>& battery,
                    double fit, int year) {
    const Sizes s = sizes(pv, battery, year);
    return bill(dispatch_year(h, s.usable_pv, s.usable_battery), s.alive_pv, fit, year);
}

}  // namespace

YearFlows dispatch_year(const Household& h, double pv_kwp, double battery_kwh) {
    const double eta = std::sqrt(kRoundtrip);
    const double max_ac_per_step = battery_kwh / kHoursOfStorage * 0.5;
    double stored = 0.0;
    YearFlows f;
    for (std::size_t t = 0; t < h.demand.size(); ++t) {
        const double gen = pv_kwp * h.pv_yield[t];
        const double net = gen - h.demand[t];
        if (net > 0.0) {
            double in = 0.0;
            if (battery_kwh > 0.0) in = std::min({net, max_ac_per_step, (battery_kwh - stored) / eta});
            in = std::max(in, 0.0);
            stored += in * eta;
            f.charge += in;
            f.exports += net - in;
        } else if (net < 0.0) {
            const double need = -net;
            double out = 0.0;
            if (stored > 0.0) out = std::min({need, max_ac_per_step, stored * eta});
            stored -= out / eta;
            if (stored < 0.0) stored = 0.0;
            f.discharge += out;
            f.imports += need - out;
        }
    }
    return f;
}

double bill(const YearFlows& f, double alive_pv_kwp, double fit_fraction, int year) {
    const double rate = kRetail2019 * std::pow(kEscalation, year - 2019);
    const double credit = alive_pv_kwp > kFitCapKwp + 1e-9 ? 0.0 : fit_fraction * rate;
    return rate * f.imports - credit * f.exports + 365.0 * kDailyCharge;
}

std::optional<Choice> best_addition(const Household& h, const Prices& prices, double fit_fraction, int year) {
    std::vector<double> before(kHorizon);
    for (int k = 0; k < kHorizon; ++k) before[k] = horizon_bill(h, h.pv, h.battery, fit_fraction, year + k);

    const Sizes now = sizes(h.pv, h.battery, year);
    std::optional<Choice> best;
    double best_capex = 0.0;
    bool some_pays_back = false;
    for (int i = 0; i <= 20; ++i) {
        for (int j = 0; j <= 18; ++j) {
            if (i == 0 && j == 0) continue;
            const double add_pv = 0.5 * i;
            const double add_bat = 1.0 * j;
            if (now.alive_pv + add_pv > 10.0 + 1e-9 || now.alive_battery + add_bat > 18.0 + 1e-9) continue;
            auto pv = h.pv;
            auto bat = h.battery;
            if (add_pv > 0.0) pv.push_back({year, add_pv});
            if (add_bat > 0.0) bat.push_back({year, add_bat});
            double capex = 0.0;
            if (add_pv > 0.0) capex += add_pv * prices.pv_per_kwp.at(year);
            if (add_bat > 0.0) capex += add_bat * prices.battery_per_kwh.at(year);

            double npv = -capex;
            double cumulative = 0.0;
            double best_early = -std::numeric_limits<double>::infinity();
            for (int k = 1; k <= kHorizon; ++k) {
                const double saving = before[k - 1] - horizon_bill(h, pv, bat, fit_fraction, year + k - 1);
                const double pv_saving = saving / std::pow(1.0 + kDiscount, k);
                npv += pv_saving;
                cumulative += pv_saving;
                if (k <= kPaybackLimit) best_early = std::max(best_early, cumulative);
            }
            if (best_early >= capex) some_pays_back = true;

            const bool wins = !best || npv > best->npv || (npv == best->npv && capex < best_capex) ||
                              (npv == best->npv && capex == best_capex && add_bat < best->battery);
            if (wins) {
                best = Choice{add_pv, add_bat, npv};
                best_capex = capex;
            }
        }
    }
    if (!best || !(best->npv > 0.0) || !some_pays_back) return std::nullopt;
    return best;
}

std::vector<std::pair<int, Choice>> replay(Household h, const Prices& prices, double fit_fraction, int first_year,
                                           int last_year) {
    std::vector<std::pair<int, Choice>> out;
    for (int year = first_year; year <= last_year; ++year) {
        if (auto c = best_addition(h, prices, fit_fraction, year)) {
            if (c->pv > 0.0) h.pv.push_back({year, c->pv});
            if (c->battery > 0.0) h.battery.push_back({year, c->battery});
            out.emplace_back(year, *c);
        }
    }
    return out;
}

GridSearch capacity_grid_search(const std::vector<double>& demand, const std::vector<Plant>& plants,
                                double max_capacity, int points) {
    const std::size_t n = plants.size();
    // Renewables before dispatchables, each group in order of energy cost.
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const bool ra = !plants[a].availability.empty();
        const bool rb = !plants[b].availability.empty();
        if (ra != rb) return ra;
        return plants[a].energy_cost < plants[b].energy_cost;
    });

    GridSearch best;
    best.cost = std::numeric_limits<double>::infinity();
    std::vector<int> idx(n, 0);
    std::vector<double> cap(n);
    const double step = max_capacity / (points - 1);
    while (true) {
        double cost = 0.0;
        for (std::size_t p = 0; p < n; ++p) {
            cap[p] = step * idx[p];
            cost += plants[p].capacity_cost * cap[p];
        }
        bool feasible = true;
        for (std::size_t t = 0; t < demand.size() && feasible && cost < best.cost; ++t) {
            double left = demand[t];
            for (std::size_t p : order) {
                if (left <= 0.0) break;
                const double avail = plants[p].availability.empty() ? 1.0 : plants[p].availability[t];
                const double used = std::min(left, avail * cap[p]);
                cost += used * plants[p].energy_cost;
                left -= used;
            }
            if (left > 1e-9) feasible = false;
        }
        if (feasible && cost < best.cost) {
            best.cost = cost;
            best.capacity = cap;
        }
        std::size_t d = 0;
        while (d < n && ++idx[d] == points) idx[d++] = 0;
        if (d == n) break;
    }
    return best;
}

}  // namespace oracle
