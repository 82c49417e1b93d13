#pragma once

#include "prosumage/fleet.hpp"
#include "prosumage/household.hpp"
#include "prosumage/sector.hpp"

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace prosumage {

/// Load duration curve: values sorted descending.
std::vector<double> rldc(std::span<const double> series);

struct LabeledCurve {
    std::string label;
    std::vector<double> values;
};

/// Inputs of one solved scenario needed for RLDCs: residual demand, the
/// utility renewables as modelled and their solved capacities.
struct RldcInputs {
    std::vector<double> residual_demand;          // MWh per hour
    std::vector<double> household_pv_generation;  // MWh per hour, fleet total
    std::vector<Technology> technologies;
    const SectorSolution* solution = nullptr;
};

/// Four descending curves: reference residual load net of utility VRE,
/// prosumage residual load net of utility VRE, reference load net of utility
/// PV only, and that curve with household PV fed in as if it were utility PV.
std::vector<LabeledCurve> rldc_decomposition(const RldcInputs& scenario, const RldcInputs& reference,
                                             std::string_view utility_pv_profile = "pv");

/// sum(price * q) / sum(q). Throws ValidationError on length mismatch or sum(q) <= 0.
double weighted_price(std::span<const double> prices, std::span<const double> profile);

struct CustomerSegment {
    std::string name;
    std::vector<double> profile;  // MWh per hour
};

/// Prosumage households (net or imports-only grid use), non-prosumage
/// households (same count, underlying demand) and C&I as the remainder of
/// the residual demand.
std::vector<CustomerSegment> customer_segments(const ResidualDemand& residual, bool prosumage_imports_only = false);

struct SegmentPrice {
    std::string name;
    std::optional<double> scenario_price;   // AUD/MWh
    std::optional<double> reference_price;  // AUD/MWh, same consumers without prosumage
    double scenario_volume = 0.0;           // MWh
    double reference_volume = 0.0;          // MWh
    double price_effect = 0.0;              // (p_s - p_r) * q_s, AUD
    double volume_effect = 0.0;             // p_r * (q_s - q_r), AUD
};

/// Segment-weighted wholesale prices in the scenario and in its reference.
/// In the reference, the prosumage households consume their underlying demand.
std::vector<SegmentPrice> segment_prices(const ResidualDemand& scenario_residual, std::span<const double> scenario_prices,
                                         const ResidualDemand& reference_residual,
                                         std::span<const double> reference_prices, bool prosumage_imports_only = false);

struct Co2Report {
    std::vector<std::pair<std::string, double>> by_technology;  // tCO2
    double total_t = 0.0;
    double intensity_kg_per_kwh = 0.0;
};

/// Fuel burn = output / efficiency; emissions = burn * factor. Intensity is
/// total emissions over `served_energy_mwh`.
Co2Report co2_report(const SectorSolution& solution, std::span<const Technology> technologies,
                     double served_energy_mwh);

/// Investment history of one simulated household.
struct HouseholdOutcome {
    std::string household_id;
    std::vector<InvestmentDecision> decisions;

    static HouseholdOutcome from_run(const HouseholdRun& run);
    /// Vintages implied by the decisions, retired ones included.
    HouseholdState state() const;
};

/// One year of fleet-wide household investment.
struct FleetInvestment {
    int year = 0;
    double pv_kwp = 0.0;
    double battery_kwh = 0.0;
    double pv_capex = 0.0;       // AUD
    double battery_capex = 0.0;  // AUD
};

/// Cohort-mean investments per year scaled to `n_households`.
std::vector<FleetInvestment> fleet_investment_log(std::span<const HouseholdOutcome> households, const CostCurves& costs,
                                                  long long n_households);

struct SystemCostParams {
    int year = 2030;
    double interest_rate = 0.04;
    double pv_lifetime = 25.0;
    double battery_lifetime = 10.0;
};

struct SystemCost {
    double utility = 0.0;
    double prosumage_pv = 0.0;
    double prosumage_battery = 0.0;
    double total = 0.0;
};

/// LP objective plus the annuities of every fleet vintage still alive in `params.year`.
SystemCost system_cost(const SectorSolution& solution, std::span<const FleetInvestment> log,
                       const SystemCostParams& params = {});

/// Household fleet capacity alive in the final year, MW / MWh.
struct FleetCapacity {
    double pv_mw = 0.0;
    double battery_mw = 0.0;
    double battery_mwh = 0.0;
};

FleetCapacity fleet_capacity(std::span<const HouseholdOutcome> households, const HouseholdSpecs& specs, int year,
                             long long n_households);

struct ScenarioOutcome {
    std::string name;
    std::optional<double> res_share;  // nullopt: endogenous
    SectorSolution solution;
    std::vector<Technology> technologies;
    double served_energy_mwh = 0.0;
    SystemCost cost;
    FleetCapacity household;
};

struct TechnologyDelta {
    std::string name;
    double capacity_mw = 0.0;
    double energy_capacity_mwh = 0.0;
    double generation_gwh = 0.0;
    // -delta capacity per unit of household capacity; nullopt without household capacity.
    std::optional<double> per_household_pv;
    std::optional<double> per_household_battery_mw;
    std::optional<double> per_household_battery_mwh;
};

struct ScenarioDelta {
    std::string scenario;
    std::string reference;
    std::vector<TechnologyDelta> technologies;
    double co2_t = 0.0;
    double co2_intensity_kg_per_kwh = 0.0;
    double system_cost = 0.0;
    double system_cost_pct = 0.0;
};

/// scenario - reference. Throws ValidationError if the RES shares differ.
ScenarioDelta delta_report(const ScenarioOutcome& scenario, const ScenarioOutcome& reference);

void write_delta_csv(const std::filesystem::path& path, const ScenarioDelta& delta);
void write_segments_csv(const std::filesystem::path& path, std::span<const SegmentPrice> segments);
void write_curves_csv(const std::filesystem::path& path, std::span<const LabeledCurve> curves);
void write_outcome_csv(const std::filesystem::path& path, const ScenarioOutcome& outcome, const Co2Report& co2);

}  // namespace prosumage
