#include "prosumage/analytics.hpp"

#include "prosumage/csv.hpp"
#include "prosumage/errors.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>

namespace prosumage {

std::vector<double> rldc(std::span<const double> series) {
    std::vector<double> out(series.begin(), series.end());
    std::sort(out.begin(), out.end(), std::greater<>());
    return out;
}

namespace {

std::vector<double> net_of_renewables(const RldcInputs& in, bool pv_only, std::string_view pv_profile) {
    if (!in.solution) throw ContractViolation("rldc_decomposition: scenario has no solution");
    std::vector<double> load = in.residual_demand;
    for (std::size_t k = 0; k < in.technologies.size(); ++k) {
        const auto& t = in.technologies[k];
        if (t.kind != TechKind::VariableRenewable) continue;
        if (pv_only && t.availability_profile != pv_profile) continue;
        const double cap = in.solution->technologies.at(k).capacity;
        if (t.availability.size() != load.size()) {
            throw ValidationError("availability of '" + t.name + "' does not match the demand year");
        }
        for (std::size_t h = 0; h < load.size(); ++h) load[h] -= t.availability[h] * cap;
    }
    return load;
}

}  // namespace

std::vector<LabeledCurve> rldc_decomposition(const RldcInputs& scenario, const RldcInputs& reference,
                                             std::string_view utility_pv_profile) {
    if (scenario.residual_demand.size() != reference.residual_demand.size()) {
        throw ValidationError("rldc_decomposition: scenario and reference cover different years");
    }
    std::vector<LabeledCurve> curves;
    curves.push_back({"reference", rldc(net_of_renewables(reference, false, utility_pv_profile))});
    curves.push_back({"prosumage", rldc(net_of_renewables(scenario, false, utility_pv_profile))});

    auto pv_only = net_of_renewables(reference, true, utility_pv_profile);
    std::vector<double> counterfactual = pv_only;
    if (!scenario.household_pv_generation.empty()) {
        if (scenario.household_pv_generation.size() != counterfactual.size()) {
            throw ValidationError("rldc_decomposition: household PV length differs from demand");
        }
        for (std::size_t h = 0; h < counterfactual.size(); ++h) {
            counterfactual[h] -= scenario.household_pv_generation[h];
        }
    }
    curves.push_back({"reference_utility_pv_only", rldc(pv_only)});
    curves.push_back({"household_pv_as_utility_pv", rldc(counterfactual)});
    return curves;
}

double weighted_price(std::span<const double> prices, std::span<const double> profile) {
    if (prices.size() != profile.size()) {
        throw ValidationError("weighted_price: " + std::to_string(prices.size()) + " prices for " +
                              std::to_string(profile.size()) + " profile values");
    }
    double numerator = 0.0;
    double volume = 0.0;
    for (std::size_t h = 0; h < prices.size(); ++h) {
        numerator += prices[h] * profile[h];
        volume += profile[h];
    }
    if (!(volume > 0.0)) throw ValidationError("weighted_price: profile has no positive volume");
    return numerator / volume;
}

std::vector<CustomerSegment> customer_segments(const ResidualDemand& r, bool prosumage_imports_only) {
    const auto& pros_source = prosumage_imports_only ? r.household_import : r.household_net_grid;
    std::vector<double> pros(pros_source.values().begin(), pros_source.values().end());
    std::vector<double> non_pros(r.household_demand.values().begin(), r.household_demand.values().end());
    std::vector<double> ci(r.residual.size());
    for (std::size_t h = 0; h < ci.size(); ++h) ci[h] = r.residual[h] - pros[h] - non_pros[h];
    return {{"prosumage_households", std::move(pros)},
            {"non_prosumage_households", std::move(non_pros)},
            {"commercial_industrial", std::move(ci)}};
}

std::vector<SegmentPrice> segment_prices(const ResidualDemand& scenario_residual, std::span<const double> scenario_prices,
                                         const ResidualDemand& reference_residual,
                                         std::span<const double> reference_prices, bool prosumage_imports_only) {
    if (scenario_residual.residual.size() != reference_residual.residual.size()) {
        throw ValidationError("segment_prices: scenario and reference cover different years");
    }
    const auto scn = customer_segments(scenario_residual, prosumage_imports_only);
    // Without prosumage the same households draw their underlying demand.
    const auto& underlying = scenario_residual.household_demand.values();
    std::vector<std::vector<double>> ref_profiles(3);
    ref_profiles[0].assign(underlying.begin(), underlying.end());
    ref_profiles[1].assign(underlying.begin(), underlying.end());
    ref_profiles[2].resize(underlying.size());
    for (std::size_t h = 0; h < underlying.size(); ++h) {
        ref_profiles[2][h] = reference_residual.residual[h] - 2.0 * underlying[h];
    }

    auto try_price = [](std::span<const double> p, std::span<const double> q) -> std::optional<double> {
        double volume = 0.0;
        for (double v : q) volume += v;
        if (!(volume > 0.0)) return std::nullopt;
        return weighted_price(p, q);
    };

    std::vector<SegmentPrice> out;
    for (std::size_t s = 0; s < scn.size(); ++s) {
        SegmentPrice sp;
        sp.name = scn[s].name;
        sp.scenario_price = try_price(scenario_prices, scn[s].profile);
        sp.reference_price = try_price(reference_prices, ref_profiles[s]);
        sp.scenario_volume = annual_sum(scn[s].profile);
        sp.reference_volume = annual_sum(ref_profiles[s]);
        if (sp.scenario_price && sp.reference_price) {
            sp.price_effect = (*sp.scenario_price - *sp.reference_price) * sp.scenario_volume;
            sp.volume_effect = *sp.reference_price * (sp.scenario_volume - sp.reference_volume);
        }
        out.push_back(std::move(sp));
    }
    return out;
}

Co2Report co2_report(const SectorSolution& solution, std::span<const Technology> technologies,
                     double served_energy_mwh) {
    if (solution.technologies.size() != technologies.size()) {
        throw ContractViolation("co2_report: solution and technology list differ in length");
    }
    Co2Report report;
    for (std::size_t k = 0; k < technologies.size(); ++k) {
        const auto& t = technologies[k];
        if (t.kind != TechKind::Dispatchable) continue;
        const double tonnes = solution.technologies[k].annual_output / t.efficiency * t.emission_factor;
        report.by_technology.emplace_back(t.name, tonnes);
        report.total_t += tonnes;
    }
    // t/MWh and kg/kWh coincide.
    report.intensity_kg_per_kwh = served_energy_mwh > 0.0 ? report.total_t / served_energy_mwh : 0.0;
    return report;
}

HouseholdOutcome HouseholdOutcome::from_run(const HouseholdRun& run) {
    return {run.household_id, run.decisions};
}

HouseholdState HouseholdOutcome::state() const {
    HouseholdState s;
    for (const auto& d : decisions) s = s.with_addition(d.year, d.added_pv, d.added_battery);
    return s;
}

std::vector<FleetInvestment> fleet_investment_log(std::span<const HouseholdOutcome> runs, const CostCurves& costs,
                                                  long long n_households) {
    if (runs.empty()) return {};
    std::map<int, FleetInvestment> by_year;
    for (const auto& run : runs) {
        for (const auto& d : run.decisions) {
            auto& f = by_year[d.year];
            f.year = d.year;
            f.pv_kwp += d.added_pv;
            f.battery_kwh += d.added_battery;
            f.pv_capex += d.added_pv * costs.pv_cost(d.year);
            f.battery_capex += d.added_battery * costs.battery_cost(d.year);
        }
    }
    const double scale = static_cast<double>(n_households) / static_cast<double>(runs.size());
    std::vector<FleetInvestment> log;
    for (auto& [year, f] : by_year) {
        f.pv_kwp *= scale;
        f.battery_kwh *= scale;
        f.pv_capex *= scale;
        f.battery_capex *= scale;
        log.push_back(f);
    }
    return log;
}

SystemCost system_cost(const SectorSolution& solution, std::span<const FleetInvestment> log,
                       const SystemCostParams& params) {
    SystemCost cost;
    cost.utility = solution.objective;
    for (const auto& inv : log) {
        const double age = params.year - inv.year;
        if (age < 0) continue;
        if (age < params.pv_lifetime && inv.pv_capex != 0.0) {
            cost.prosumage_pv += annuitize(inv.pv_capex, params.pv_lifetime, params.interest_rate);
        }
        if (age < params.battery_lifetime && inv.battery_capex != 0.0) {
            cost.prosumage_battery += annuitize(inv.battery_capex, params.battery_lifetime, params.interest_rate);
        }
    }
    cost.total = cost.utility + cost.prosumage_pv + cost.prosumage_battery;
    return cost;
}

FleetCapacity fleet_capacity(std::span<const HouseholdOutcome> runs, const HouseholdSpecs& specs, int year,
                             long long n_households) {
    FleetCapacity cap;
    if (runs.empty()) return cap;
    for (const auto& run : runs) {
        const auto c = degrade(run.state(), year, specs);
        cap.pv_mw += c.nominal_pv_kwp;
        cap.battery_mwh += c.nominal_battery_kwh;
    }
    const double scale = static_cast<double>(n_households) / static_cast<double>(runs.size()) / 1000.0;
    cap.pv_mw *= scale;
    cap.battery_mwh *= scale;
    cap.battery_mw = cap.battery_mwh / specs.battery.energy_to_power_ratio;
    return cap;
}

ScenarioDelta delta_report(const ScenarioOutcome& s, const ScenarioOutcome& r) {
    const bool same_share = s.res_share.has_value() == r.res_share.has_value() &&
                            (!s.res_share || std::abs(*s.res_share - *r.res_share) <= 1e-12);
    if (!same_share) {
        throw ValidationError("delta_report: '" + s.name + "' and '" + r.name + "' have different RES shares");
    }
    ScenarioDelta d;
    d.scenario = s.name;
    d.reference = r.name;
    auto ratio = [](double delta, double household) -> std::optional<double> {
        if (household <= 0.0) return std::nullopt;
        return -delta / household;
    };
    for (const auto& ts : s.solution.technologies) {
        const auto* tr = r.solution.find(ts.name);
        if (!tr) throw ValidationError("delta_report: technology '" + ts.name + "' missing from the reference");
        TechnologyDelta td;
        td.name = ts.name;
        td.capacity_mw = ts.capacity - tr->capacity;
        td.energy_capacity_mwh = ts.energy_capacity - tr->energy_capacity;
        td.generation_gwh = (ts.annual_output - tr->annual_output) / 1000.0;
        td.per_household_pv = ratio(td.capacity_mw, s.household.pv_mw);
        td.per_household_battery_mw = ratio(td.capacity_mw, s.household.battery_mw);
        td.per_household_battery_mwh = ratio(td.energy_capacity_mwh, s.household.battery_mwh);
        d.technologies.push_back(td);
    }
    const auto co2_s = co2_report(s.solution, s.technologies, s.served_energy_mwh);
    const auto co2_r = co2_report(r.solution, r.technologies, r.served_energy_mwh);
    d.co2_t = co2_s.total_t - co2_r.total_t;
    d.co2_intensity_kg_per_kwh = co2_s.intensity_kg_per_kwh - co2_r.intensity_kg_per_kwh;
    d.system_cost = s.cost.total - r.cost.total;
    d.system_cost_pct = r.cost.total != 0.0 ? 100.0 * d.system_cost / r.cost.total : 0.0;
    return d;
}

namespace {

std::string opt(const std::optional<double>& v) { return v ? csv::format_double(*v) : std::string(); }

}  // namespace

void write_delta_csv(const std::filesystem::path& path, const ScenarioDelta& d) {
    csv::Writer out({"item", "delta_capacity_mw", "delta_energy_capacity_mwh", "delta_generation_gwh",
                     "per_household_pv_mw", "per_household_battery_mw", "per_household_battery_mwh"});
    for (const auto& t : d.technologies) {
        out.add_row({t.name, csv::format_double(t.capacity_mw), csv::format_double(t.energy_capacity_mwh),
                     csv::format_double(t.generation_gwh), opt(t.per_household_pv), opt(t.per_household_battery_mw),
                     opt(t.per_household_battery_mwh)});
    }
    out.add_row({"co2_t", csv::format_double(d.co2_t), "", "", "", "", ""});
    out.add_row({"co2_intensity_kg_per_kwh", csv::format_double(d.co2_intensity_kg_per_kwh), "", "", "", "", ""});
    out.add_row({"system_cost_aud", csv::format_double(d.system_cost), "", "", "", "", ""});
    out.add_row({"system_cost_pct", csv::format_double(d.system_cost_pct), "", "", "", "", ""});
    out.commit(path);
}

void write_segments_csv(const std::filesystem::path& path, std::span<const SegmentPrice> segments) {
    csv::Writer out({"segment", "scenario_price_aud_per_mwh", "reference_price_aud_per_mwh", "scenario_volume_mwh",
                     "reference_volume_mwh", "price_effect_aud", "volume_effect_aud"});
    for (const auto& s : segments) {
        out.add_row({s.name, opt(s.scenario_price), opt(s.reference_price), csv::format_double(s.scenario_volume),
                     csv::format_double(s.reference_volume), csv::format_double(s.price_effect),
                     csv::format_double(s.volume_effect)});
    }
    out.commit(path);
}

void write_curves_csv(const std::filesystem::path& path, std::span<const LabeledCurve> curves) {
    std::vector<std::string> header{"rank"};
    std::size_t n = 0;
    for (const auto& c : curves) {
        header.push_back(c.label + "_mwh");
        n = std::max(n, c.values.size());
    }
    csv::Writer out(header);
    std::vector<std::string> row;
    for (std::size_t i = 0; i < n; ++i) {
        row.assign(1, std::to_string(i));
        for (const auto& c : curves) row.push_back(i < c.values.size() ? csv::format_double(c.values[i]) : "");
        out.add_row(row);
    }
    out.commit(path);
}

void write_outcome_csv(const std::filesystem::path& path, const ScenarioOutcome& o, const Co2Report& co2) {
    csv::Writer out({"metric", "value"});
    auto add = [&](const std::string& k, double v) { out.add_row({k, csv::format_double(v)}); };
    out.add_row({"scenario", o.name});
    out.add_row({"res_share", o.res_share ? csv::format_double(*o.res_share) : "endogenous"});
    add("realized_res_share", o.solution.realized_res_share);
    add("lp_objective_aud", o.solution.objective);
    add("system_cost_utility_aud", o.cost.utility);
    add("system_cost_prosumage_pv_aud", o.cost.prosumage_pv);
    add("system_cost_prosumage_battery_aud", o.cost.prosumage_battery);
    add("system_cost_total_aud", o.cost.total);
    add("household_pv_mw", o.household.pv_mw);
    add("household_battery_mw", o.household.battery_mw);
    add("household_battery_mwh", o.household.battery_mwh);
    add("served_energy_mwh", o.served_energy_mwh);
    add("co2_t", co2.total_t);
    add("co2_intensity_kg_per_kwh", co2.intensity_kg_per_kwh);
    for (const auto& [name, t] : co2.by_technology) add("co2_t_" + name, t);
    for (const auto& t : o.solution.technologies) {
        add("capacity_mw_" + t.name, t.capacity);
        if (t.kind == TechKind::Storage) add("energy_capacity_mwh_" + t.name, t.energy_capacity);
        add("generation_mwh_" + t.name, t.annual_output);
    }
    out.commit(path);
}

}  // namespace prosumage
