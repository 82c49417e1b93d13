#include "prosumage/fleet.hpp"

#include "prosumage/csv.hpp"
#include "prosumage/errors.hpp"

#include <array>
#include <string>

namespace prosumage {

namespace {

constexpr double kMWhPerKWh = 1e-3;

TimeSeries to_hourly(const TimeSeries& s) { return s.step_minutes() == 60 ? s : resample_to_hourly(s); }

TimeSeries mean_of(std::span<const HouseholdSeries> cohort, const TimeSeries HouseholdSeries::*member) {
    const auto& first = cohort.front().*member;
    std::vector<double> sum(first.size(), 0.0);
    for (const auto& h : cohort) {
        const auto& s = h.*member;
        if (s.size() != first.size() || s.step_minutes() != first.step_minutes()) {
            throw ContractViolation("representative_profile: households use different resolutions");
        }
        for (std::size_t t = 0; t < sum.size(); ++t) sum[t] += s[t];
    }
    const double n = static_cast<double>(cohort.size());
    for (double& v : sum) v /= n;
    return first.with_values(std::move(sum));
}

TimeSeries scaled_mwh(const TimeSeries& kwh_hourly, double n_households, const TimeSeries& grid) {
    std::vector<double> out(kwh_hourly.size());
    for (std::size_t t = 0; t < out.size(); ++t) out[t] = n_households * kwh_hourly[t] * kMWhPerKWh;
    return grid.with_values(std::move(out), Unit::MWhPerStep);
}

}  // namespace

HouseholdSeries HouseholdSeries::from_run(const HouseholdRun& run) {
    return HouseholdSeries{run.net_grid, run.grid_import, run.demand, run.pv_generation};
}

RepresentativeHousehold representative_profile(std::span<const HouseholdSeries> cohort) {
    if (cohort.empty()) throw ContractViolation("representative_profile: empty cohort");
    return RepresentativeHousehold{mean_of(cohort, &HouseholdSeries::net_grid),
                                   mean_of(cohort, &HouseholdSeries::grid_import),
                                   mean_of(cohort, &HouseholdSeries::demand),
                                   mean_of(cohort, &HouseholdSeries::pv_generation)};
}

void FleetSpec::validate() const {
    if (n_households <= 0) throw ValidationError("fleet size must be positive");
}

ResidualDemand build_residual(const TimeSeries& network_demand, const RepresentativeHousehold& representative,
                              const FleetSpec& fleet) {
    fleet.validate();
    if (network_demand.step_minutes() != 60 || network_demand.unit() != Unit::MWhPerStep) {
        throw ContractViolation("network demand must be hourly MWh");
    }
    for (const auto* s : {&representative.net_grid, &representative.grid_import, &representative.demand,
                          &representative.pv_generation}) {
        if (s->unit() != Unit::KWhPerStep) throw ContractViolation("household series must be kWh per step");
    }
    const double n = static_cast<double>(fleet.n_households);
    const auto net = scaled_mwh(to_hourly(representative.net_grid), n, network_demand);
    const auto imports = scaled_mwh(to_hourly(representative.grid_import), n, network_demand);
    const auto demand = scaled_mwh(to_hourly(representative.demand), n, network_demand);
    const auto pv = scaled_mwh(to_hourly(representative.pv_generation), n, network_demand);

    std::vector<double> reduction(network_demand.size()), residual(network_demand.size());
    for (std::size_t t = 0; t < residual.size(); ++t) {
        reduction[t] = demand[t] - net[t];
        residual[t] = network_demand[t] - reduction[t];
    }
    return ResidualDemand{network_demand,
                          network_demand.with_values(std::move(residual)),
                          network_demand.with_values(std::move(reduction)),
                          pv,
                          net,
                          imports,
                          demand};
}

ResidualDemand reference_residual(const TimeSeries& network_demand) {
    if (network_demand.step_minutes() != 60 || network_demand.unit() != Unit::MWhPerStep) {
        throw ContractViolation("network demand must be hourly MWh");
    }
    const auto zero = network_demand.with_values(std::vector<double>(network_demand.size(), 0.0));
    return ResidualDemand{network_demand, network_demand, zero, zero, zero, zero, zero};
}

void write_residual_csv(const std::filesystem::path& path, const ResidualDemand& r) {
    const std::array<std::string, 7> names{"residual_mwh",     "network_mwh",       "reduction_mwh",
                                           "household_pv_mwh", "household_net_mwh", "household_import_mwh",
                                           "household_demand_mwh"};
    const std::array<const TimeSeries*, 7> series{&r.residual,          &r.network_demand,     &r.reduction,
                                                  &r.household_pv_generation, &r.household_net_grid,
                                                  &r.household_import,  &r.household_demand};
    write_series_csv(path, names, series);
}

ResidualDemand read_residual_csv(const std::filesystem::path& path) {
    auto col = [&](std::string_view name) { return read_series_csv(path, name, 60, Unit::MWhPerStep); };
    return ResidualDemand{col("network_mwh"),          col("residual_mwh"),      col("reduction_mwh"),
                          col("household_pv_mwh"),     col("household_net_mwh"), col("household_import_mwh"),
                          col("household_demand_mwh")};
}

}  // namespace prosumage
