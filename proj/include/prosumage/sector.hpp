#pragma once

#include "prosumage/lp.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace prosumage {

enum class TechKind { Dispatchable, VariableRenewable, Storage };

std::string_view to_string(TechKind kind);
TechKind tech_kind_from_string(std::string_view text);

struct Technology {
    std::string name;
    TechKind kind = TechKind::Dispatchable;
    double overnight_cost_power = 0.0;   // AUD/MW
    double overnight_cost_energy = 0.0;  // AUD/MWh, storage only
    double fixed_om = 0.0;               // AUD/MW/yr, per MW of power for storage
    double variable_om = 0.0;            // AUD/MWh
    double fuel_cost = 0.0;              // AUD/MWh thermal
    double efficiency = 1.0;             // thermal, or roundtrip for storage
    double lifetime = 25.0;              // years
    double capacity_lower_bound = 0.0;   // MW
    double emission_factor = 0.0;        // tCO2/MWh thermal
    bool renewable = false;
    std::string availability_profile;    // key into the availability map, renewables only
    std::vector<double> availability;    // hourly in [0,1], renewables only

    /// Variable cost per MWh of output.
    double marginal_cost() const { return variable_om + fuel_cost / efficiency; }
    void validate() const;
};

/// Table of technologies with the CSV layout
/// `name,kind,overnight_cost_power,overnight_cost_energy,fixed_om,variable_om,fuel_cost,efficiency,lifetime,capacity_lower_bound,emission_factor,renewable,availability_profile`.
struct TechnologyCatalog {
    std::vector<Technology> technologies;

    void validate() const;
    const Technology* find(std::string_view name) const;
    Technology* find(std::string_view name);

    /// Attaches availability series by profile key; every renewable must resolve.
    void attach_availability(const std::map<std::string, std::vector<double>>& profiles);

    /// Multiplies overnight costs of every technology named in `names`.
    void scale_overnight_costs(const std::vector<std::string>& names, double multiplier);
};

/// The 2030 catalog with the default emission factors (coal 0.34, gas 0.20, bioenergy 0).
TechnologyCatalog default_catalog();
TechnologyCatalog read_catalog_csv(const std::filesystem::path& path);
void write_catalog_csv(const std::filesystem::path& path, const TechnologyCatalog& catalog);

/// Capital recovery: overnight * r / (1 - (1+r)^-lifetime); overnight/lifetime at r = 0.
double annuitize(double overnight, double lifetime, double rate);

enum class GrossDemandBasis { ResidualPlusHouseholdPv, ResidualOnly };

struct SectorScenario {
    std::vector<double> residual_demand;          // MWh per hour
    std::vector<double> household_pv_generation;  // MWh per hour, counts toward the RES share
    std::optional<double> res_share;              // nullopt: endogenous
    std::vector<Technology> technologies;
    double interest_rate = 0.04;
    /// Multiplies annualised capacity costs; 1 for a full year, hours/8760 for short test horizons.
    double capacity_cost_weight = 1.0;
    GrossDemandBasis gross_demand_basis = GrossDemandBasis::ResidualPlusHouseholdPv;

    std::size_t hours() const { return residual_demand.size(); }
    double gross_demand() const;
    void validate() const;
};

/// LP plus the index maps needed to read a solution back.
struct SectorModel {
    LinearProgram lp;
    std::size_t hours = 0;
    std::vector<int> capacity_col;         // per technology
    std::vector<int> energy_capacity_col;  // per technology, -1 unless storage
    std::vector<int> output_col;           // first hourly generation / discharge column, per technology
    std::vector<int> charge_col;           // first hourly charge column, -1 unless storage
    std::vector<int> level_col;            // first hourly level column, -1 unless storage
    std::vector<int> balance_row;          // per hour
    std::vector<int> spill_col;            // per hour, -1 unless residual demand is negative
    int res_row = -1;

    int output(std::size_t tech, std::size_t hour) const { return output_col[tech] + static_cast<int>(hour); }
    int charge(std::size_t tech, std::size_t hour) const { return charge_col[tech] + static_cast<int>(hour); }
    int level(std::size_t tech, std::size_t hour) const { return level_col[tech] + static_cast<int>(hour); }
};

SectorModel build_lp(const SectorScenario& scenario);

struct TechnologyResult {
    std::string name;
    TechKind kind = TechKind::Dispatchable;
    double capacity = 0.0;         // MW
    double energy_capacity = 0.0;  // MWh, storage only
    std::vector<double> output;    // MWh per hour: generation, or discharge for storage
    std::vector<double> charge;    // storage only
    std::vector<double> level;     // storage only, end of hour
    std::vector<double> curtailment;  // renewables only: available - dispatched
    double annual_output = 0.0;
};

struct SectorSolution {
    LpStatus status = LpStatus::Error;
    std::vector<TechnologyResult> technologies;
    std::vector<double> prices;  // balance-row duals, AUD/MWh
    double objective = 0.0;      // AUD per modelled period
    double res_dual = 0.0;
    double realized_res_share = 0.0;
    LpSolution raw;

    const TechnologyResult* find(std::string_view name) const;
};

/// Solves and unpacks. Throws SolveError naming the row class for
/// infeasible or unbounded problems.
SectorSolution solve(const SectorModel& model, const SectorScenario& scenario, const LpBackend& backend,
                     const SolverOptions& options = {});

/// Same LP without the renewable-share row; the realised share is reported.
SectorSolution run_endogenous(const SectorScenario& scenario, const LpBackend& backend,
                              const SolverOptions& options = {});

/// Renewable share of gross demand implied by a solution.
double realized_res_share(const SectorSolution& solution, const SectorScenario& scenario);

struct Violation {
    std::size_t row = 0;
    std::string name;
    double residual = 0.0;
    double scale = 1.0;
};

struct ValidationReport {
    std::vector<Violation> violations;
    std::vector<std::string> bound_violations;
    double primal_objective = 0.0;
    double dual_objective = 0.0;
    double relative_gap = 0.0;
    double max_dual_infeasibility = 0.0;

    bool ok(double gap_tolerance = 1e-6) const {
        return violations.empty() && bound_violations.empty() && relative_gap <= gap_tolerance;
    }
};

/// Recomputes every row residual against its bounds and the primal/dual objective gap.
/// A row is violated when its residual exceeds tolerance * max(1, |bound|, max |a_ij x_j|).
ValidationReport validate_solution(const LpSolution& solution, const LinearProgram& lp, double tolerance = 1e-6);

void write_solution_csv(const std::filesystem::path& directory, const SectorSolution& solution, int year);
SectorSolution read_solution_csv(const std::filesystem::path& directory);

}  // namespace prosumage
