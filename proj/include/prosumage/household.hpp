#pragma once

#include "prosumage/timeseries.hpp"

#include <map>
#include <optional>
#include <span>
#include <vector>

namespace prosumage {

struct BatterySpec {
    double energy_to_power_ratio = 2.5;  // h
    double roundtrip_efficiency = 0.92;
    int life_years = 10;
    double end_of_life_capacity_fraction = 0.70;

    void validate() const;
    /// sqrt(roundtrip): applied once on charge and once on discharge.
    double one_way_efficiency() const;
};

struct PVSpec {
    int life_years = 25;
    double end_of_life_capacity_fraction = 0.80;

    void validate() const;
};

struct HouseholdSpecs {
    BatterySpec battery;
    PVSpec pv;
};

/// Flat volumetric tariff escalating yearly, plus a feed-in tariff that is a
/// fixed fraction of the volumetric rate and is forfeited entirely above the
/// eligibility cap.
struct TariffSchedule {
    int base_year = 2019;
    double base_volumetric_rate = 0.29;  // AUD/kWh
    double annual_escalation = 0.04;
    double fit_fraction = 0.0;
    double fit_eligibility_cap = 5.0;  // kWp
    double fixed_daily_charge = 1.0;   // AUD/day, cancels in savings

    void validate() const;
    double rate(int year) const;
    double fit_rate(int year) const;
    bool fit_eligible(double installed_pv_kwp) const;
};

/// Installed-cost trajectories. Values are stored already scaled to local prices.
class CostCurves {
public:
    CostCurves() = default;

    /// Applies the local scale factors once: stored = raw * scale.
    static CostCurves from_raw(std::map<int, double> pv_raw, std::map<int, double> battery_raw,
                               double pv_scale = 0.78, double battery_scale = 0.73);
    static CostCurves read_csv(const std::filesystem::path& path, double pv_scale = 0.78,
                               double battery_scale = 0.73);

    double pv_cost(int year) const;       // AUD/kWp
    double battery_cost(int year) const;  // AUD/kWh

    CostCurves scaled(double pv_multiplier, double battery_multiplier) const;
    void validate(int first_year, int last_year) const;

    const std::map<int, double>& pv() const { return pv_; }
    const std::map<int, double>& battery() const { return battery_; }

private:
    std::map<int, double> pv_;
    std::map<int, double> battery_;
};

struct Vintage {
    int install_year;
    double capacity;  // kWp for PV, nominal kWh for batteries
};

/// Linear fade from 1 at age 0 to the end-of-life fraction at `life_years`,
/// zero from `life_years` on (retired). Negative ages are not yet installed.
double fade_factor(int age, int life_years, double end_of_life_fraction);

/// Capacities of a household in one calendar year after fade and retirement.
struct DegradedCapacity {
    double usable_pv_kwp = 0.0;
    double usable_battery_kwh = 0.0;
    double usable_battery_kw = 0.0;
    double nominal_pv_kwp = 0.0;       // alive vintages, undegraded
    double nominal_battery_kwh = 0.0;  // alive vintages, undegraded
};

struct HouseholdState {
    std::vector<Vintage> pv;
    std::vector<Vintage> battery;

    HouseholdState with_addition(int year, double pv_kwp, double battery_kwh) const;
};

DegradedCapacity degrade(const HouseholdState& state, int year, const HouseholdSpecs& specs);

struct EvaluationGrid {
    double pv_step = 0.5;
    double pv_max = 10.0;
    double battery_step = 1.0;
    double battery_max = 18.0;

    void validate() const;
    int pv_points() const;       // including zero
    int battery_points() const;  // including zero
    double pv_at(int i) const { return pv_step * i; }
    double battery_at(int j) const { return battery_step * j; }
};

struct EconomicContext {
    double discount_rate = 0.05;
    int horizon_years = 10;
    double dpp_threshold = 5.0;
    TariffSchedule tariff;
    CostCurves costs;

    void validate() const;
};

struct DispatchTotals {
    double demand = 0.0;
    double pv_generation = 0.0;
    double self_consumption = 0.0;
    double grid_import = 0.0;
    double grid_export = 0.0;
    double battery_charge_ac = 0.0;
    double battery_discharge_ac = 0.0;
};

struct DispatchResult {
    std::vector<double> pv_generation;
    std::vector<double> self_consumption;
    std::vector<double> grid_import;
    std::vector<double> grid_export;
    std::vector<double> battery_charge_ac;
    std::vector<double> battery_discharge_ac;
    std::vector<double> state_of_charge;  // kWh stored at the end of each step
    DispatchTotals totals;
};

/// Flows of one dispatch step, all kWh.
struct DispatchStep {
    double self_consumption = 0.0;
    double battery_charge_ac = 0.0;
    double battery_discharge_ac = 0.0;
    double grid_export = 0.0;
    double grid_import = 0.0;
};

/// One greedy step. `soc` is updated in place; `step_limit_kwh` is the AC
/// energy the inverter can move in one step (power x step length).
DispatchStep dispatch_step(double pv_generation, double demand, double& soc, double usable_kwh,
                           double step_limit_kwh, double one_way_efficiency);

/// Greedy self-consumption dispatch over one year, SoC starting at zero.
/// PV serves load first, surplus charges the battery then exports, deficit
/// discharges the battery then imports.
DispatchResult simulate_dispatch(const ProfileSet& profile, const DegradedCapacity& capacity,
                                 const BatterySpec& battery, double initial_soc = 0.0);

/// Same dispatch as simulate_dispatch, annual totals only.
DispatchTotals dispatch_totals(const ProfileSet& profile, const DegradedCapacity& capacity,
                               const BatterySpec& battery);

/// Annual bill in AUD. `installed_pv_kwp` is the alive nominal PV used for the
/// FiT eligibility test.
double annual_bill(const DispatchTotals& totals, const TariffSchedule& tariff, double installed_pv_kwp, int year);

/// Undiscounted cashflow of one candidate: capex now, then one saving per horizon year.
struct Cashflows {
    double capex = 0.0;
    std::vector<double> savings;
};

double net_present_value(const Cashflows& flows, double discount_rate);

/// Years until cumulative discounted savings cover capex, interpolated within
/// the crossing year; nullopt when the horizon ends first.
std::optional<double> discounted_payback(const Cashflows& flows, double discount_rate);

struct Candidate {
    double pv_kwp = 0.0;
    double battery_kwh = 0.0;
};

/// Bills of the unchanged household for each horizon year; shared by all
/// candidates evaluated in the same decision year.
std::vector<double> baseline_bills(const ProfileSet& profile, const HouseholdState& state, const EconomicContext& econ,
                                   const HouseholdSpecs& specs, int year);

Cashflows configuration_cashflows(const ProfileSet& profile, const HouseholdState& state, const Candidate& candidate,
                                  const EconomicContext& econ, const HouseholdSpecs& specs, int year,
                                  std::span<const double> baseline);

double npv_of_configuration(const ProfileSet& profile, const HouseholdState& state, const Candidate& candidate,
                            const EconomicContext& econ, const HouseholdSpecs& specs, int year);

std::optional<double> dpp_of_configuration(const ProfileSet& profile, const HouseholdState& state,
                                           const Candidate& candidate, const EconomicContext& econ,
                                           const HouseholdSpecs& specs, int year);

struct InvestmentDecision {
    int year = 0;
    double added_pv = 0.0;       // kWp
    double added_battery = 0.0;  // kWh
    double npv = 0.0;
    std::optional<double> dpp;
    double capex = 0.0;
};

/// Exhaustive NPV search over the grid additions that keep cumulative capacity
/// within the grid maxima. Returns the best candidate only if its NPV is
/// positive and some non-zero candidate pays back within the DPP threshold.
std::optional<InvestmentDecision> invest_decision(const ProfileSet& profile, const HouseholdState& state,
                                                  const EconomicContext& econ, const EvaluationGrid& grid,
                                                  const HouseholdSpecs& specs, int year);

struct HouseholdRun {
    std::string household_id;
    HouseholdState final_state;
    std::vector<InvestmentDecision> decisions;
    // Final-year series at the profile resolution, kWh per step.
    TimeSeries net_grid;  // import - export
    TimeSeries grid_import;
    TimeSeries demand;
    TimeSeries pv_generation;
};

HouseholdRun run_household(const ProfileSet& profile, const EconomicContext& econ, const EvaluationGrid& grid,
                           const HouseholdSpecs& specs, int first_year = 2019, int last_year = 2030);

}  // namespace prosumage
