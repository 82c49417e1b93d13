#pragma once

#include "prosumage/analytics.hpp"
#include "prosumage/fleet.hpp"
#include "prosumage/household.hpp"
#include "prosumage/sector.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace prosumage {

/// Batch configuration, read from `key = value` lines. `#` starts a comment;
/// list values are comma separated; relative paths resolve against the
/// directory of the config file.
///
///   profiles                  household CSV (timestamp, <id>_demand, <id>_pv)
///   network_demand            hourly network demand CSV
///   network_demand_column     column name, default demand_mwh
///   wind_availability         hourly availability CSV
///   wind_availability_column  column name, default wind
///   catalog                   technology CSV; built-in 2030 catalog if absent
///   cost_curves               household cost curves CSV (raw, unscaled)
///   fleet_size                prosumage households, default 500000
///   fit                       FiT fractions of the retail rate
///   res                       RES shares and/or `endogenous`
///   pv_cost_multipliers       one-at-a-time PV cost sensitivities
///   battery_cost_multipliers  one-at-a-time battery cost sensitivities
///   fleet_sensitivities       alternative fleet sizes
///   pv_cost_technologies      utility technologies scaled with the PV multiplier, default pv
///   battery_cost_technologies utility technologies scaled with the battery multiplier, default li-ion
///   max_households            use the first N ingested households, 0 = all
///   first_year, last_year     household simulation years, default 2019..2030
///   interest_rate             sector annuity rate, default 0.04
///   gross_demand_basis        residual+household_pv (default) or residual
///   backend                   dense, highs, highs-ipm or highs-ipx
///   solver_tolerance          default 1e-9
///   jobs                      worker threads, default 1
///   out                       output directory
struct RunConfig {
    std::filesystem::path profiles;
    std::filesystem::path network_demand;
    std::string network_demand_column = "demand_mwh";
    std::filesystem::path wind_availability;
    std::string wind_availability_column = "wind";
    std::filesystem::path catalog;
    std::filesystem::path cost_curves;
    long long fleet_size = 500'000;
    std::vector<double> fit{0.0, 0.25, 0.50};
    std::vector<std::optional<double>> res{0.39, 0.49, 0.59};
    std::vector<double> pv_cost_multipliers{1.0};
    std::vector<double> battery_cost_multipliers{1.0};
    std::vector<long long> fleet_sensitivities;
    std::vector<std::string> pv_cost_technologies{"pv"};
    std::vector<std::string> battery_cost_technologies{"li-ion"};
    std::size_t max_households = 0;
    int first_year = 2019;
    int last_year = 2030;
    double interest_rate = 0.04;
    GrossDemandBasis gross_demand_basis = GrossDemandBasis::ResidualPlusHouseholdPv;
    std::string backend = "highs";
    double solver_tolerance = 1e-9;
    int jobs = 1;
    std::filesystem::path out = "results";

    /// Checks value ranges and that every referenced file exists.
    void validate() const;
};

RunConfig parse_config(std::string_view text, const std::filesystem::path& base_dir = ".",
                       const std::filesystem::path& source = "<config>");
RunConfig read_config(const std::filesystem::path& path);

/// Hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);
std::string sha256_hex(std::string_view bytes);

/// Everything loaded from disk once per run, already validated.
struct Inputs {
    std::vector<ProfileSet> profiles;
    std::vector<std::string> rejected_households;
    TimeSeries network_demand;  // hourly MWh
    std::vector<double> wind_availability;
    std::vector<double> utility_pv_availability;  // hourly mean of household PV yields
    TechnologyCatalog catalog;                    // availability attached
    CostCurves costs;                             // scaled to local prices
    std::vector<std::pair<std::string, std::string>> digests;  // label, sha256
};

Inputs load_inputs(const RunConfig& cfg);

/// Household stage key: results depend only on these.
struct HouseholdKey {
    double fit = 0.0;
    double pv_multiplier = 1.0;
    double battery_multiplier = 1.0;

    std::string label() const;
    bool operator==(const HouseholdKey&) const = default;
};

struct HouseholdStage {
    HouseholdKey key;
    std::vector<HouseholdOutcome> households;
    RepresentativeHousehold representative;
    bool from_cache = false;
};

/// Runs (or loads from `cache_dir` when its fingerprint matches) the
/// household simulation for every profile.
HouseholdStage run_household_stage(const Inputs& inputs, const RunConfig& cfg, const HouseholdKey& key,
                                   const std::filesystem::path& cache_dir, int jobs);

void write_household_stage(const std::filesystem::path& dir, const HouseholdStage& stage,
                           const std::string& fingerprint);
std::optional<HouseholdStage> read_household_stage(const std::filesystem::path& dir, const std::string& fingerprint);

/// One sector solve: a prosumage cell or a reference (no fit).
struct CellSpec {
    std::optional<double> fit;       // nullopt: reference
    std::optional<double> res;       // nullopt: endogenous
    double pv_multiplier = 1.0;
    double battery_multiplier = 1.0;
    long long fleet_size = 0;
    std::string sensitivity;         // "base", "pv_cost_0.8", ...

    bool is_reference() const { return !fit.has_value(); }
    std::string name() const;
    std::string reference_name() const;
};

/// Base cells, the one-at-a-time sensitivity cells and one reference per
/// (RES share, cost multipliers). Order is deterministic.
std::vector<CellSpec> expand_matrix(const RunConfig& cfg);

struct CellResult {
    CellSpec spec;
    bool ok = false;
    bool solve_failure = false;
    std::string error;
    std::optional<ResidualDemand> residual;
    std::optional<ScenarioOutcome> outcome;
    std::optional<ScenarioDelta> delta;
    std::vector<SegmentPrice> segments;
};

struct MatrixResult {
    std::vector<HouseholdStage> households;
    std::vector<CellResult> cells;
    int household_runs = 0;
    int sector_solves = 0;

    const CellResult* find(const std::string& name) const;
    /// 0 success, 1 validation failure, 2 solve failure.
    int exit_code() const;
};

enum class Stage { Households, Residual, Sector, Analyze };

struct RunOptions {
    Stage until = Stage::Analyze;
    /// Reuse household and sector results found in the output directory.
    bool reuse = true;
    /// Fail instead of solving when a sector solution is missing.
    bool require_existing_solutions = false;
    /// Restrict to cells whose name matches (plus their references).
    std::vector<std::string> only_cells;
};

MatrixResult run_matrix(const RunConfig& cfg, const RunOptions& options = {});

struct Check {
    std::string name;
    bool passed = false;
    std::string detail;
    bool skipped = false;
};

/// Property and oracle suite over the configured dataset.
std::vector<Check> verify(const RunConfig& cfg);

/// Quantitative claims checked against a full-scale matrix run.
std::vector<Check> reproduction_checks(const MatrixResult& result, const RunConfig& cfg);

}  // namespace prosumage
