#include "prosumage/household.hpp"

#include "prosumage/csv.hpp"
#include "prosumage/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace prosumage {

namespace {

constexpr double kCapacityEps = 1e-9;

double step_hours(const ProfileSet& profile) { return profile.demand.step_minutes() / 60.0; }

void check_profile(const ProfileSet& profile) {
    if (profile.demand.step_minutes() != profile.pv_yield.step_minutes() ||
        profile.demand.size() != profile.pv_yield.size()) {
        throw ContractViolation("profile '" + profile.household_id + "': demand and PV grids differ");
    }
}

// Shared loop of simulate_dispatch and dispatch_totals; `record` sees every step.
template <class Record>
DispatchTotals run_dispatch(const ProfileSet& profile, const DegradedCapacity& capacity, const BatterySpec& battery,
                            double soc, Record&& record) {
    check_profile(profile);
    const auto demand = profile.demand.values();
    const auto yield = profile.pv_yield.values();
    const double pv_kwp = capacity.usable_pv_kwp;
    const double usable = capacity.usable_battery_kwh;
    const double limit = capacity.usable_battery_kw * step_hours(profile);
    const double eta = battery.one_way_efficiency();

    DispatchTotals totals;
    for (std::size_t t = 0; t < demand.size(); ++t) {
        const double pv = pv_kwp * yield[t];
        const DispatchStep s = dispatch_step(pv, demand[t], soc, usable, limit, eta);
        totals.demand += demand[t];
        totals.pv_generation += pv;
        totals.self_consumption += s.self_consumption;
        totals.grid_import += s.grid_import;
        totals.grid_export += s.grid_export;
        totals.battery_charge_ac += s.battery_charge_ac;
        totals.battery_discharge_ac += s.battery_discharge_ac;
        record(t, pv, s, soc);
    }
    return totals;
}

}  // namespace

void BatterySpec::validate() const {
    if (!(roundtrip_efficiency > 0.0 && roundtrip_efficiency <= 1.0)) {
        throw ValidationError("battery roundtrip efficiency must be in (0, 1]");
    }
    if (!(end_of_life_capacity_fraction > 0.0 && end_of_life_capacity_fraction <= 1.0)) {
        throw ValidationError("battery end-of-life fraction must be in (0, 1]");
    }
    if (!(energy_to_power_ratio > 0.0)) throw ValidationError("battery energy-to-power ratio must be positive");
    if (life_years <= 0) throw ValidationError("battery life must be positive");
}

double BatterySpec::one_way_efficiency() const { return std::sqrt(roundtrip_efficiency); }

void PVSpec::validate() const {
    if (!(end_of_life_capacity_fraction > 0.0 && end_of_life_capacity_fraction <= 1.0)) {
        throw ValidationError("PV end-of-life fraction must be in (0, 1]");
    }
    if (life_years <= 0) throw ValidationError("PV life must be positive");
}

void TariffSchedule::validate() const {
    if (base_volumetric_rate < 0.0 || fit_fraction < 0.0 || fit_eligibility_cap < 0.0 || fixed_daily_charge < 0.0) {
        throw ValidationError("tariff values must be non-negative");
    }
    if (annual_escalation <= -1.0) throw ValidationError("tariff escalation must exceed -100%");
}

double TariffSchedule::rate(int year) const {
    return base_volumetric_rate * std::pow(1.0 + annual_escalation, year - base_year);
}

double TariffSchedule::fit_rate(int year) const { return fit_fraction * rate(year); }

bool TariffSchedule::fit_eligible(double installed_pv_kwp) const {
    return installed_pv_kwp <= fit_eligibility_cap + kCapacityEps;
}

CostCurves CostCurves::from_raw(std::map<int, double> pv_raw, std::map<int, double> battery_raw, double pv_scale,
                                double battery_scale) {
    CostCurves curves;
    for (auto& [year, cost] : pv_raw) curves.pv_[year] = cost * pv_scale;
    for (auto& [year, cost] : battery_raw) curves.battery_[year] = cost * battery_scale;
    return curves;
}

CostCurves CostCurves::read_csv(const std::filesystem::path& path, double pv_scale, double battery_scale) {
    const auto table = csv::read(path);
    const auto year_col = table.column("year");
    const auto pv_col = table.column("pv_cost_aud_per_kwp");
    const auto bat_col = table.column("battery_cost_aud_per_kwh");
    std::map<int, double> pv, bat;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto line = table.line_numbers[r];
        const int year = static_cast<int>(csv::parse_integer(table.rows[r][year_col], path, line));
        pv[year] = csv::parse_double(table.rows[r][pv_col], path, line);
        bat[year] = csv::parse_double(table.rows[r][bat_col], path, line);
    }
    return from_raw(std::move(pv), std::move(bat), pv_scale, battery_scale);
}

double CostCurves::pv_cost(int year) const {
    auto it = pv_.find(year);
    if (it == pv_.end()) throw ContractViolation("no PV cost for year " + std::to_string(year));
    return it->second;
}

double CostCurves::battery_cost(int year) const {
    auto it = battery_.find(year);
    if (it == battery_.end()) throw ContractViolation("no battery cost for year " + std::to_string(year));
    return it->second;
}

CostCurves CostCurves::scaled(double pv_multiplier, double battery_multiplier) const {
    CostCurves out = *this;
    for (auto& [year, cost] : out.pv_) cost *= pv_multiplier;
    for (auto& [year, cost] : out.battery_) cost *= battery_multiplier;
    return out;
}

void CostCurves::validate(int first_year, int last_year) const {
    for (int y = first_year; y <= last_year; ++y) {
        auto pv = pv_.find(y);
        auto bat = battery_.find(y);
        if (pv == pv_.end() || bat == battery_.end()) {
            throw ValidationError("cost curves do not cover year " + std::to_string(y));
        }
        if (!(pv->second > 0.0) || !(bat->second > 0.0)) {
            throw ValidationError("cost curves must be strictly positive (year " + std::to_string(y) + ")");
        }
    }
}

double fade_factor(int age, int life_years, double end_of_life_fraction) {
    if (age < 0 || age >= life_years) return 0.0;
    return 1.0 - (1.0 - end_of_life_fraction) * static_cast<double>(age) / static_cast<double>(life_years);
}

HouseholdState HouseholdState::with_addition(int year, double pv_kwp, double battery_kwh) const {
    HouseholdState next = *this;
    if (pv_kwp > 0.0) next.pv.push_back({year, pv_kwp});
    if (battery_kwh > 0.0) next.battery.push_back({year, battery_kwh});
    return next;
}

DegradedCapacity degrade(const HouseholdState& state, int year, const HouseholdSpecs& specs) {
    DegradedCapacity out;
    for (const auto& v : state.pv) {
        const double f = fade_factor(year - v.install_year, specs.pv.life_years, specs.pv.end_of_life_capacity_fraction);
        if (f > 0.0) {
            out.usable_pv_kwp += f * v.capacity;
            out.nominal_pv_kwp += v.capacity;
        }
    }
    for (const auto& v : state.battery) {
        const double f = fade_factor(year - v.install_year, specs.battery.life_years,
                                     specs.battery.end_of_life_capacity_fraction);
        if (f > 0.0) {
            out.usable_battery_kwh += f * v.capacity;
            out.nominal_battery_kwh += v.capacity;
        }
    }
    out.usable_battery_kw = out.usable_battery_kwh / specs.battery.energy_to_power_ratio;
    return out;
}

void EvaluationGrid::validate() const {
    auto divides = [](double step, double max) {
        if (!(step > 0.0) || max < 0.0) return false;
        const double n = max / step;
        return std::abs(n - std::round(n)) < 1e-9;
    };
    if (!divides(pv_step, pv_max) || !divides(battery_step, battery_max)) {
        throw ValidationError("evaluation grid steps must be positive and divide the maxima");
    }
}

int EvaluationGrid::pv_points() const { return static_cast<int>(std::lround(pv_max / pv_step)) + 1; }

int EvaluationGrid::battery_points() const { return static_cast<int>(std::lround(battery_max / battery_step)) + 1; }

void EconomicContext::validate() const {
    if (!(discount_rate > 0.0)) throw ValidationError("discount rate must be positive");
    if (horizon_years <= 0) throw ValidationError("horizon must be positive");
    if (static_cast<double>(horizon_years) < dpp_threshold) {
        throw ValidationError("horizon must be at least the DPP threshold");
    }
    tariff.validate();
}

DispatchStep dispatch_step(double pv_generation, double demand, double& soc, double usable_kwh, double step_limit_kwh,
                           double one_way_efficiency) {
    DispatchStep s;
    s.self_consumption = std::min(pv_generation, demand);
    const double surplus = pv_generation - s.self_consumption;
    const double deficit = demand - s.self_consumption;
    if (surplus > 0.0 && usable_kwh > 0.0) {
        const double headroom_ac = std::max(0.0, usable_kwh - soc) / one_way_efficiency;
        s.battery_charge_ac = std::min({surplus, step_limit_kwh, headroom_ac});
        soc = std::min(usable_kwh, soc + s.battery_charge_ac * one_way_efficiency);
    }
    s.grid_export = surplus - s.battery_charge_ac;
    if (deficit > 0.0 && soc > 0.0) {
        const double available_ac = soc * one_way_efficiency;
        s.battery_discharge_ac = std::min({deficit, step_limit_kwh, available_ac});
        soc = std::max(0.0, soc - s.battery_discharge_ac / one_way_efficiency);
    }
    s.grid_import = deficit - s.battery_discharge_ac;
    return s;
}

DispatchResult simulate_dispatch(const ProfileSet& profile, const DegradedCapacity& capacity,
                                 const BatterySpec& battery, double initial_soc) {
    DispatchResult r;
    const auto n = profile.demand.size();
    for (auto* v : {&r.pv_generation, &r.self_consumption, &r.grid_import, &r.grid_export, &r.battery_charge_ac,
                    &r.battery_discharge_ac, &r.state_of_charge}) {
        v->resize(n);
    }
    r.totals = run_dispatch(profile, capacity, battery, initial_soc,
                            [&r](std::size_t t, double pv, const DispatchStep& s, double soc) {
                                r.pv_generation[t] = pv;
                                r.self_consumption[t] = s.self_consumption;
                                r.grid_import[t] = s.grid_import;
                                r.grid_export[t] = s.grid_export;
                                r.battery_charge_ac[t] = s.battery_charge_ac;
                                r.battery_discharge_ac[t] = s.battery_discharge_ac;
                                r.state_of_charge[t] = soc;
                            });
    return r;
}

DispatchTotals dispatch_totals(const ProfileSet& profile, const DegradedCapacity& capacity,
                               const BatterySpec& battery) {
    return run_dispatch(profile, capacity, battery, 0.0, [](std::size_t, double, const DispatchStep&, double) {});
}

double annual_bill(const DispatchTotals& totals, const TariffSchedule& tariff, double installed_pv_kwp, int year) {
    const double fixed = tariff.fixed_daily_charge * 365.0;
    const double export_credit =
        tariff.fit_eligible(installed_pv_kwp) ? tariff.fit_rate(year) * totals.grid_export : 0.0;
    return tariff.rate(year) * totals.grid_import - export_credit + fixed;
}

double net_present_value(const Cashflows& flows, double discount_rate) {
    double npv = -flows.capex;
    double discount = 1.0;
    for (double saving : flows.savings) {
        discount *= 1.0 + discount_rate;
        npv += saving / discount;
    }
    return npv;
}

std::optional<double> discounted_payback(const Cashflows& flows, double discount_rate) {
    if (flows.capex <= 0.0) return 0.0;
    double cumulative = 0.0;
    double discount = 1.0;
    for (std::size_t k = 0; k < flows.savings.size(); ++k) {
        discount *= 1.0 + discount_rate;
        const double discounted = flows.savings[k] / discount;
        if (discounted > 0.0 && cumulative + discounted >= flows.capex) {
            return static_cast<double>(k) + (flows.capex - cumulative) / discounted;
        }
        cumulative += discounted;
    }
    return std::nullopt;
}

namespace {

// Bill of `state` in each horizon year. The decision year is the first year
// of operation, so the horizon covers calendar years year .. year+H-1.
void horizon_bills(const ProfileSet& profile, const HouseholdState& state, const EconomicContext& econ,
                   const HouseholdSpecs& specs, int year, std::vector<double>& out) {
    out.resize(static_cast<std::size_t>(econ.horizon_years));
    for (int k = 0; k < econ.horizon_years; ++k) {
        const int y = year + k;
        const auto cap = degrade(state, y, specs);
        const auto totals = dispatch_totals(profile, cap, specs.battery);
        out[static_cast<std::size_t>(k)] = annual_bill(totals, econ.tariff, cap.nominal_pv_kwp, y);
    }
}

double candidate_capex(const Candidate& c, const EconomicContext& econ, int year) {
    double capex = 0.0;
    if (c.pv_kwp > 0.0) capex += econ.costs.pv_cost(year) * c.pv_kwp;
    if (c.battery_kwh > 0.0) capex += econ.costs.battery_cost(year) * c.battery_kwh;
    return capex;
}

}  // namespace

std::vector<double> baseline_bills(const ProfileSet& profile, const HouseholdState& state, const EconomicContext& econ,
                                   const HouseholdSpecs& specs, int year) {
    std::vector<double> bills;
    horizon_bills(profile, state, econ, specs, year, bills);
    return bills;
}

Cashflows configuration_cashflows(const ProfileSet& profile, const HouseholdState& state, const Candidate& candidate,
                                  const EconomicContext& econ, const HouseholdSpecs& specs, int year,
                                  std::span<const double> baseline) {
    if (baseline.size() != static_cast<std::size_t>(econ.horizon_years)) {
        throw ContractViolation("baseline bills must cover the horizon");
    }
    Cashflows flows;
    flows.capex = candidate_capex(candidate, econ, year);
    if (candidate.pv_kwp <= 0.0 && candidate.battery_kwh <= 0.0) {
        flows.savings.assign(baseline.size(), 0.0);
        return flows;
    }
    std::vector<double> bills;
    horizon_bills(profile, state.with_addition(year, candidate.pv_kwp, candidate.battery_kwh), econ, specs, year,
                  bills);
    flows.savings.resize(bills.size());
    for (std::size_t k = 0; k < bills.size(); ++k) flows.savings[k] = baseline[k] - bills[k];
    return flows;
}

double npv_of_configuration(const ProfileSet& profile, const HouseholdState& state, const Candidate& candidate,
                            const EconomicContext& econ, const HouseholdSpecs& specs, int year) {
    const auto base = baseline_bills(profile, state, econ, specs, year);
    return net_present_value(configuration_cashflows(profile, state, candidate, econ, specs, year, base),
                             econ.discount_rate);
}

std::optional<double> dpp_of_configuration(const ProfileSet& profile, const HouseholdState& state,
                                           const Candidate& candidate, const EconomicContext& econ,
                                           const HouseholdSpecs& specs, int year) {
    const auto base = baseline_bills(profile, state, econ, specs, year);
    return discounted_payback(configuration_cashflows(profile, state, candidate, econ, specs, year, base),
                              econ.discount_rate);
}

std::optional<InvestmentDecision> invest_decision(const ProfileSet& profile, const HouseholdState& state,
                                                  const EconomicContext& econ, const EvaluationGrid& grid,
                                                  const HouseholdSpecs& specs, int year) {
    const auto current = degrade(state, year, specs);
    const auto base = baseline_bills(profile, state, econ, specs, year);

    InvestmentDecision best;
    best.year = year;
    bool gate_open = false;
    for (int i = 0; i < grid.pv_points(); ++i) {
        const double pv = grid.pv_at(i);
        if (current.nominal_pv_kwp + pv > grid.pv_max + kCapacityEps) break;
        for (int j = 0; j < grid.battery_points(); ++j) {
            const double bat = grid.battery_at(j);
            if (current.nominal_battery_kwh + bat > grid.battery_max + kCapacityEps) break;
            if (i == 0 && j == 0) continue;  // zero addition: NPV 0, never the answer
            const Candidate c{pv, bat};
            const auto flows = configuration_cashflows(profile, state, c, econ, specs, year, base);
            const double npv = net_present_value(flows, econ.discount_rate);
            const auto dpp = discounted_payback(flows, econ.discount_rate);
            if (dpp && *dpp <= econ.dpp_threshold) gate_open = true;
            const bool better = npv > best.npv || (npv == best.npv && flows.capex < best.capex) ||
                                (npv == best.npv && flows.capex == best.capex && bat < best.added_battery);
            if (better) {
                best.added_pv = pv;
                best.added_battery = bat;
                best.npv = npv;
                best.dpp = dpp;
                best.capex = flows.capex;
            }
        }
    }
    if (!(best.npv > 0.0) || !gate_open) return std::nullopt;
    return best;
}

HouseholdRun run_household(const ProfileSet& profile, const EconomicContext& econ, const EvaluationGrid& grid,
                           const HouseholdSpecs& specs, int first_year, int last_year) {
    check_profile(profile);
    HouseholdRun run{profile.household_id, {}, {}, profile.demand, profile.demand, profile.demand, profile.demand};
    HouseholdState state;
    for (int year = first_year; year <= last_year; ++year) {
        // Drop vintages that have reached end of life; they contribute nothing from here on.
        std::erase_if(state.pv, [&](const Vintage& v) { return year - v.install_year >= specs.pv.life_years; });
        std::erase_if(state.battery,
                      [&](const Vintage& v) { return year - v.install_year >= specs.battery.life_years; });
        if (auto decision = invest_decision(profile, state, econ, grid, specs, year)) {
            state = state.with_addition(year, decision->added_pv, decision->added_battery);
            run.decisions.push_back(*decision);
        }
    }
    run.final_state = state;

    const auto dispatch = simulate_dispatch(profile, degrade(state, last_year, specs), specs.battery);
    std::vector<double> net(dispatch.grid_import.size());
    for (std::size_t t = 0; t < net.size(); ++t) net[t] = dispatch.grid_import[t] - dispatch.grid_export[t];
    run.net_grid = profile.demand.with_values(std::move(net), Unit::KWhPerStep);
    run.grid_import = profile.demand.with_values(dispatch.grid_import, Unit::KWhPerStep);
    run.pv_generation = profile.demand.with_values(dispatch.pv_generation, Unit::KWhPerStep);
    return run;
}

}  // namespace prosumage
