#pragma once

#include "prosumage/household.hpp"
#include "prosumage/timeseries.hpp"

#include <filesystem>
#include <span>
#include <vector>

namespace prosumage {

/// Final-year grid interaction of one household, kWh per step.
struct HouseholdSeries {
    TimeSeries net_grid;
    TimeSeries grid_import;
    TimeSeries demand;
    TimeSeries pv_generation;

    static HouseholdSeries from_run(const HouseholdRun& run);
};

/// Cohort mean of each series: the average prosumage household.
using RepresentativeHousehold = HouseholdSeries;

RepresentativeHousehold representative_profile(std::span<const HouseholdSeries> cohort);

struct FleetSpec {
    long long n_households = 500'000;

    void validate() const;
};

/// Hourly series in MWh per hour. residual = network - n * (demand - net_grid).
struct ResidualDemand {
    TimeSeries network_demand;
    TimeSeries residual;
    TimeSeries reduction;
    TimeSeries household_pv_generation;  // fleet total
    TimeSeries household_net_grid;       // fleet total
    TimeSeries household_import;         // fleet total
    TimeSeries household_demand;         // fleet total, underlying
};

/// Builds the residual demand the sector model must serve. Household series at
/// 30 minutes are summed to hours first; year alignment is by index.
ResidualDemand build_residual(const TimeSeries& network_demand, const RepresentativeHousehold& representative,
                              const FleetSpec& fleet);

/// Residual demand with no prosumage: residual = network, household terms zero.
ResidualDemand reference_residual(const TimeSeries& network_demand);

/// `timestamp,residual_mwh,network_mwh,reduction_mwh,household_pv_mwh,household_net_mwh,household_import_mwh,household_demand_mwh`
void write_residual_csv(const std::filesystem::path& path, const ResidualDemand& residual);
ResidualDemand read_residual_csv(const std::filesystem::path& path);

}  // namespace prosumage
