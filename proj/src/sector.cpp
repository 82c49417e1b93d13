#include "prosumage/sector.hpp"

#include "prosumage/csv.hpp"
#include "prosumage/errors.hpp"
#include "prosumage/timeseries.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace prosumage {

std::string_view to_string(TechKind kind) {
    switch (kind) {
        case TechKind::Dispatchable: return "dispatchable";
        case TechKind::VariableRenewable: return "variable-renewable";
        case TechKind::Storage: return "storage";
    }
    return "?";
}

TechKind tech_kind_from_string(std::string_view text) {
    for (auto k : {TechKind::Dispatchable, TechKind::VariableRenewable, TechKind::Storage}) {
        if (to_string(k) == text) return k;
    }
    throw ValidationError("unknown technology kind '" + std::string(text) + "'");
}

void Technology::validate() const {
    const auto fail = [&](const std::string& what) { throw ValidationError("technology '" + name + "': " + what); };
    if (name.empty()) fail("empty name");
    for (double v : {overnight_cost_power, overnight_cost_energy, fixed_om, variable_om, fuel_cost}) {
        if (!(v >= 0.0) || !std::isfinite(v)) fail("costs must be finite and non-negative");
    }
    if (!(efficiency > 0.0 && efficiency <= 1.0)) fail("efficiency must be in (0, 1]");
    if (!(lifetime > 0.0)) fail("lifetime must be positive");
    if (!(capacity_lower_bound >= 0.0)) fail("lower bound must be non-negative");
    if (!(emission_factor >= 0.0)) fail("emission factor must be non-negative");
    if (kind == TechKind::VariableRenewable) {
        for (double a : availability) {
            if (!(a >= 0.0 && a <= 1.0)) fail("availability outside [0, 1]");
        }
    }
}

void TechnologyCatalog::validate() const {
    if (technologies.empty()) throw ValidationError("empty technology catalog");
    for (std::size_t i = 0; i < technologies.size(); ++i) {
        technologies[i].validate();
        for (std::size_t k = 0; k < i; ++k) {
            if (technologies[k].name == technologies[i].name) {
                throw ValidationError("duplicate technology '" + technologies[i].name + "'");
            }
        }
    }
}

const Technology* TechnologyCatalog::find(std::string_view name) const {
    for (const auto& t : technologies) {
        if (t.name == name) return &t;
    }
    return nullptr;
}

Technology* TechnologyCatalog::find(std::string_view name) {
    for (auto& t : technologies) {
        if (t.name == name) return &t;
    }
    return nullptr;
}

void TechnologyCatalog::attach_availability(const std::map<std::string, std::vector<double>>& profiles) {
    for (auto& t : technologies) {
        if (t.kind != TechKind::VariableRenewable) continue;
        auto it = profiles.find(t.availability_profile);
        if (it == profiles.end()) {
            throw ValidationError("technology '" + t.name + "' needs availability profile '" +
                                  t.availability_profile + "'");
        }
        t.availability = it->second;
    }
}

void TechnologyCatalog::scale_overnight_costs(const std::vector<std::string>& names, double multiplier) {
    for (const auto& name : names) {
        auto* t = find(name);
        if (!t) throw ValidationError("cannot scale unknown technology '" + name + "'");
        t->overnight_cost_power *= multiplier;
        t->overnight_cost_energy *= multiplier;
    }
}

TechnologyCatalog default_catalog() {
    auto dispatchable = [](std::string name, double capex, double fom, double vom, double eff, double fuel,
                           double ef, bool renewable) {
        Technology t;
        t.name = std::move(name);
        t.kind = TechKind::Dispatchable;
        t.overnight_cost_power = capex;
        t.fixed_om = fom;
        t.variable_om = vom;
        t.efficiency = eff;
        t.fuel_cost = fuel;
        t.lifetime = 25.0;
        t.emission_factor = ef;
        t.renewable = renewable;
        return t;
    };
    auto vre = [](std::string name, double capex, double fom, double vom, double lower, std::string profile) {
        Technology t;
        t.name = std::move(name);
        t.kind = TechKind::VariableRenewable;
        t.overnight_cost_power = capex;
        t.fixed_om = fom;
        t.variable_om = vom;
        t.lifetime = 25.0;
        t.capacity_lower_bound = lower;
        t.renewable = true;
        t.availability_profile = std::move(profile);
        return t;
    };
    auto storage = [](std::string name, double capex_power, double capex_energy, double fom, double vom, double eff,
                      double life) {
        Technology t;
        t.name = std::move(name);
        t.kind = TechKind::Storage;
        t.overnight_cost_power = capex_power;
        t.overnight_cost_energy = capex_energy;
        t.fixed_om = fom;
        t.variable_om = vom;
        t.efficiency = eff;
        t.lifetime = life;
        return t;
    };
    TechnologyCatalog c;
    c.technologies = {
        dispatchable("coal", 3'195'000, 53'200, 4.2, 0.40, 12.06, 0.34, false),
        dispatchable("ccgt", 1'254'000, 10'500, 7.4, 0.48, 31.68, 0.20, false),
        dispatchable("ocgt", 877'000, 4'200, 10.5, 0.31, 31.68, 0.20, false),
        dispatchable("bioenergy", 12'432'000, 131'600, 8.4, 0.23, 4.5, 0.0, true),
        vre("wind", 1'874'000, 36'000, 2.7, 419, "wind"),
        vre("pv", 817'000, 14'400, 0.0, 202, "pv"),
        storage("li-ion", 115'848, 173'773, 2'027, 0.5, 0.92, 15),
        storage("hydrogen", 2'384'615, 308, 16'694, 0.5, 0.419, 22.5),
    };
    return c;
}

namespace {

const std::vector<std::string> kCatalogHeader{
    "name",     "kind",        "overnight_cost_power", "overnight_cost_energy", "fixed_om",
    "variable_om", "fuel_cost", "efficiency",          "lifetime",              "capacity_lower_bound",
    "emission_factor", "renewable", "availability_profile"};

bool parse_bool(std::string_view s, const std::filesystem::path& path, std::size_t line) {
    if (s == "1" || s == "true" || s == "yes") return true;
    if (s == "0" || s == "false" || s == "no" || s.empty()) return false;
    throw ParseError(path.string(), line, "not a boolean: '" + std::string(s) + "'");
}

}  // namespace

TechnologyCatalog read_catalog_csv(const std::filesystem::path& path) {
    const auto table = csv::read(path);
    std::vector<std::size_t> idx;
    for (const auto& h : kCatalogHeader) idx.push_back(table.column(h));
    TechnologyCatalog catalog;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        const auto line = table.line_numbers[r];
        auto num = [&](std::size_t k) {
            const auto& f = row[idx[k]];
            return f.empty() ? 0.0 : csv::parse_double(f, path, line);
        };
        Technology t;
        t.name = row[idx[0]];
        try {
            t.kind = tech_kind_from_string(row[idx[1]]);
        } catch (const ValidationError& e) {
            throw ParseError(path.string(), line, e.what());
        }
        t.overnight_cost_power = num(2);
        t.overnight_cost_energy = num(3);
        t.fixed_om = num(4);
        t.variable_om = num(5);
        t.fuel_cost = num(6);
        t.efficiency = row[idx[7]].empty() ? 1.0 : num(7);
        t.lifetime = num(8);
        t.capacity_lower_bound = num(9);
        t.emission_factor = num(10);
        t.renewable = parse_bool(row[idx[11]], path, line);
        t.availability_profile = row[idx[12]];
        catalog.technologies.push_back(std::move(t));
    }
    return catalog;
}

void write_catalog_csv(const std::filesystem::path& path, const TechnologyCatalog& catalog) {
    csv::Writer out(kCatalogHeader);
    for (const auto& t : catalog.technologies) {
        out.add_row({t.name, std::string(to_string(t.kind)), csv::format_double(t.overnight_cost_power),
                     csv::format_double(t.overnight_cost_energy), csv::format_double(t.fixed_om),
                     csv::format_double(t.variable_om), csv::format_double(t.fuel_cost),
                     csv::format_double(t.efficiency), csv::format_double(t.lifetime),
                     csv::format_double(t.capacity_lower_bound), csv::format_double(t.emission_factor),
                     t.renewable ? "true" : "false", t.availability_profile});
    }
    out.commit(path);
}

double annuitize(double overnight, double lifetime, double rate) {
    if (!(lifetime > 0.0)) throw ContractViolation("annuitize: lifetime must be positive");
    if (rate < 0.0) throw ContractViolation("annuitize: rate must be non-negative");
    if (rate == 0.0) return overnight / lifetime;
    // 1 - (1+r)^-L without cancellation for tiny r.
    const double denominator = -std::expm1(-lifetime * std::log1p(rate));
    return overnight * rate / denominator;
}

double SectorScenario::gross_demand() const {
    double total = 0.0;
    for (double d : residual_demand) total += d;
    if (gross_demand_basis == GrossDemandBasis::ResidualPlusHouseholdPv) {
        for (double p : household_pv_generation) total += p;
    }
    return total;
}

void SectorScenario::validate() const {
    if (residual_demand.empty()) throw ValidationError("scenario has no hours");
    if (!household_pv_generation.empty() && household_pv_generation.size() != residual_demand.size()) {
        throw ValidationError("household PV series length differs from residual demand");
    }
    if (res_share && !(*res_share > 0.0 && *res_share <= 1.0)) {
        throw ValidationError("RES share must be in (0, 1]");
    }
    if (!(interest_rate >= 0.0)) throw ValidationError("interest rate must be non-negative");
    if (!(capacity_cost_weight > 0.0)) throw ValidationError("capacity cost weight must be positive");
    if (technologies.empty()) throw ValidationError("scenario has no technologies");
    for (const auto& t : technologies) {
        t.validate();
        if (t.kind == TechKind::VariableRenewable && t.availability.size() != residual_demand.size()) {
            throw ValidationError("technology '" + t.name + "' availability does not cover the horizon");
        }
    }
    for (double d : residual_demand) {
        if (!std::isfinite(d)) throw ValidationError("residual demand contains a non-finite value");
    }
}

SectorModel build_lp(const SectorScenario& s) {
    s.validate();
    const std::size_t H = s.hours();
    const std::size_t T = s.technologies.size();
    SectorModel m;
    m.hours = H;
    m.capacity_col.assign(T, -1);
    m.energy_capacity_col.assign(T, -1);
    m.output_col.assign(T, -1);
    m.charge_col.assign(T, -1);
    m.level_col.assign(T, -1);
    auto& lp = m.lp;

    for (std::size_t k = 0; k < T; ++k) {
        const auto& t = s.technologies[k];
        const double cap_cost =
            (annuitize(t.overnight_cost_power, t.lifetime, s.interest_rate) + t.fixed_om) * s.capacity_cost_weight;
        m.capacity_col[k] = lp.add_column("cap_" + t.name, cap_cost, t.capacity_lower_bound);
        if (t.kind == TechKind::Storage) {
            m.energy_capacity_col[k] = lp.add_column(
                "ecap_" + t.name,
                annuitize(t.overnight_cost_energy, t.lifetime, s.interest_rate) * s.capacity_cost_weight);
        }
    }
    for (std::size_t k = 0; k < T; ++k) {
        const auto& t = s.technologies[k];
        const double out_cost = t.kind == TechKind::Storage ? t.variable_om : t.marginal_cost();
        const std::string prefix = t.kind == TechKind::Storage ? "dis_" : "gen_";
        for (std::size_t h = 0; h < H; ++h) {
            const int c = lp.add_column(prefix + t.name + "_" + std::to_string(h), out_cost);
            if (h == 0) m.output_col[k] = c;
        }
        if (t.kind != TechKind::Storage) continue;
        for (std::size_t h = 0; h < H; ++h) {
            const int c = lp.add_column("chg_" + t.name + "_" + std::to_string(h), 0.0);
            if (h == 0) m.charge_col[k] = c;
        }
        for (std::size_t h = 0; h < H; ++h) {
            const int c = lp.add_column("lvl_" + t.name + "_" + std::to_string(h), 0.0);
            if (h == 0) m.level_col[k] = c;
        }
    }
    m.spill_col.assign(H, -1);
    for (std::size_t h = 0; h < H; ++h) {
        if (s.residual_demand[h] < 0.0) {
            m.spill_col[h] = lp.add_column("spill_" + std::to_string(h), 0.0, 0.0, -s.residual_demand[h]);
        }
    }

    // Hourly energy balance.
    m.balance_row.resize(H);
    std::vector<Term> terms;
    for (std::size_t h = 0; h < H; ++h) {
        terms.clear();
        for (std::size_t k = 0; k < T; ++k) {
            terms.push_back({m.output(k, h), 1.0});
            if (s.technologies[k].kind == TechKind::Storage) terms.push_back({m.charge(k, h), -1.0});
        }
        if (m.spill_col[h] >= 0) terms.push_back({m.spill_col[h], -1.0});
        const double d = s.residual_demand[h];
        m.balance_row[h] = lp.add_row({RowClass::Balance, -1, static_cast<int>(h)}, d, d, terms);
    }

    for (std::size_t k = 0; k < T; ++k) {
        const auto& t = s.technologies[k];
        const int tech = static_cast<int>(k);
        const int cap = m.capacity_col[k];
        for (std::size_t h = 0; h < H; ++h) {
            const int hour = static_cast<int>(h);
            switch (t.kind) {
                case TechKind::Dispatchable:
                    lp.add_row({RowClass::DispatchCap, tech, hour}, -kInfinity, 0.0,
                               {{m.output(k, h), 1.0}, {cap, -1.0}});
                    break;
                case TechKind::VariableRenewable:
                    lp.add_row({RowClass::RenewableCap, tech, hour}, -kInfinity, 0.0,
                               {{m.output(k, h), 1.0}, {cap, -t.availability[h]}});
                    break;
                case TechKind::Storage: {
                    const double eta = std::sqrt(t.efficiency);
                    const std::size_t prev = h == 0 ? H - 1 : h - 1;  // cyclic boundary
                    if (H == 1) {
                        lp.add_row({RowClass::StorageLevel, tech, hour}, 0.0, 0.0,
                                   {{m.charge(k, h), -eta}, {m.output(k, h), 1.0 / eta}});
                    } else {
                        lp.add_row({RowClass::StorageLevel, tech, hour}, 0.0, 0.0,
                                   {{m.level(k, h), 1.0},
                                    {m.level(k, prev), -1.0},
                                    {m.charge(k, h), -eta},
                                    {m.output(k, h), 1.0 / eta}});
                    }
                    lp.add_row({RowClass::StorageEnergyCap, tech, hour}, -kInfinity, 0.0,
                               {{m.level(k, h), 1.0}, {m.energy_capacity_col[k], -1.0}});
                    lp.add_row({RowClass::StorageChargeCap, tech, hour}, -kInfinity, 0.0,
                               {{m.charge(k, h), 1.0}, {cap, -1.0}});
                    lp.add_row({RowClass::StorageDischargeCap, tech, hour}, -kInfinity, 0.0,
                               {{m.output(k, h), 1.0}, {cap, -1.0}});
                    break;
                }
            }
        }
    }

    if (s.res_share) {
        terms.clear();
        for (std::size_t k = 0; k < T; ++k) {
            const auto& t = s.technologies[k];
            if (!t.renewable || t.kind == TechKind::Storage) continue;
            for (std::size_t h = 0; h < H; ++h) terms.push_back({m.output(k, h), 1.0});
        }
        double household_pv = 0.0;
        for (double p : s.household_pv_generation) household_pv += p;
        const double rhs = *s.res_share * s.gross_demand() - household_pv;
        if (terms.empty() && rhs > 0.0) {
            throw ValidationError("RES share requested but the catalog has no renewable generator");
        }
        m.res_row = lp.add_row({RowClass::ResShare, -1, -1}, rhs, kInfinity, terms);
    }
    return m;
}

const TechnologyResult* SectorSolution::find(std::string_view name) const {
    for (const auto& t : technologies) {
        if (t.name == name) return &t;
    }
    return nullptr;
}

double realized_res_share(const SectorSolution& solution, const SectorScenario& scenario) {
    double renewable = 0.0;
    for (std::size_t k = 0; k < scenario.technologies.size(); ++k) {
        const auto& t = scenario.technologies[k];
        if (t.renewable && t.kind != TechKind::Storage) renewable += solution.technologies[k].annual_output;
    }
    for (double p : scenario.household_pv_generation) renewable += p;
    const double gross = scenario.gross_demand();
    return gross > 0.0 ? renewable / gross : 0.0;
}

namespace {

std::string diagnose_failure(const SectorModel& model, const SectorScenario& scenario, const LpBackend& backend,
                             const SolverOptions& options, LpStatus status) {
    if (status == LpStatus::Unbounded) {
        std::string cols;
        for (std::size_t j = 0; j < model.lp.num_columns(); ++j) {
            if (model.lp.cost()[j] < 0.0) cols += (cols.empty() ? "" : ", ") + model.lp.column_name(j);
        }
        return "objective unbounded" + (cols.empty() ? std::string() : " (negative-cost columns: " + cols + ")");
    }
    if (status == LpStatus::Infeasible && model.res_row >= 0) {
        auto relaxed = scenario;
        relaxed.res_share.reset();
        const auto probe = backend.solve(build_lp(relaxed).lp, options);
        if (probe.status == LpStatus::Optimal) return "infeasible: res_share row cannot be met";
    }
    if (status == LpStatus::Infeasible) return "infeasible: balance rows cannot be met";
    return std::string("solver status ") + std::string(to_string(status));
}

}  // namespace

SectorSolution solve(const SectorModel& model, const SectorScenario& scenario, const LpBackend& backend,
                     const SolverOptions& options) {
    SectorSolution sol;
    sol.raw = backend.solve(model.lp, options);
    sol.status = sol.raw.status;
    if (sol.status != LpStatus::Optimal) {
        throw SolveError(std::string(backend.name()) + ": " +
                         diagnose_failure(model, scenario, backend, options, sol.status) +
                         (sol.raw.message.empty() ? "" : " [" + sol.raw.message + "]"));
    }
    const auto& x = sol.raw.column_values;
    const std::size_t H = model.hours;
    auto series = [&](int first) {
        return std::vector<double>(x.begin() + first, x.begin() + first + static_cast<long>(H));
    };
    for (std::size_t k = 0; k < scenario.technologies.size(); ++k) {
        const auto& t = scenario.technologies[k];
        TechnologyResult r;
        r.name = t.name;
        r.kind = t.kind;
        r.capacity = x[static_cast<std::size_t>(model.capacity_col[k])];
        r.output = series(model.output_col[k]);
        if (t.kind == TechKind::Storage) {
            r.energy_capacity = x[static_cast<std::size_t>(model.energy_capacity_col[k])];
            r.charge = series(model.charge_col[k]);
            r.level = series(model.level_col[k]);
        }
        if (t.kind == TechKind::VariableRenewable) {
            r.curtailment.resize(H);
            for (std::size_t h = 0; h < H; ++h) {
                r.curtailment[h] = std::max(0.0, t.availability[h] * r.capacity - r.output[h]);
            }
        }
        for (double v : r.output) r.annual_output += v;
        sol.technologies.push_back(std::move(r));
    }
    sol.prices.resize(H);
    for (std::size_t h = 0; h < H; ++h) {
        sol.prices[h] = sol.raw.row_duals[static_cast<std::size_t>(model.balance_row[h])];
    }
    if (model.res_row >= 0) sol.res_dual = sol.raw.row_duals[static_cast<std::size_t>(model.res_row)];
    sol.objective = sol.raw.objective;
    sol.realized_res_share = realized_res_share(sol, scenario);
    return sol;
}

SectorSolution run_endogenous(const SectorScenario& scenario, const LpBackend& backend,
                              const SolverOptions& options) {
    auto open = scenario;
    open.res_share.reset();
    return solve(build_lp(open), open, backend, options);
}

ValidationReport validate_solution(const LpSolution& solution, const LinearProgram& lp, double tolerance) {
    ValidationReport report;
    const auto& x = solution.column_values;
    const auto& y = solution.row_duals;
    if (x.size() != lp.num_columns() || y.size() != lp.num_rows()) {
        throw ContractViolation("validate_solution: solution does not match the LP dimensions");
    }
    const auto start = lp.row_start();
    const auto cols = lp.row_columns();
    const auto vals = lp.row_values();
    for (std::size_t i = 0; i < lp.num_rows(); ++i) {
        double activity = 0.0;
        double scale = 1.0;
        for (std::size_t k = start[i]; k < start[i + 1]; ++k) {
            const double term = vals[k] * x[static_cast<std::size_t>(cols[k])];
            activity += term;
            scale = std::max(scale, std::abs(term));
        }
        const double lo = lp.row_lower()[i];
        const double hi = lp.row_upper()[i];
        if (std::isfinite(lo)) scale = std::max(scale, std::abs(lo));
        if (std::isfinite(hi)) scale = std::max(scale, std::abs(hi));
        const double residual = std::max({0.0, lo - activity, activity - hi});
        if (residual > tolerance * scale) report.violations.push_back({i, lp.row_name(i), residual, scale});
    }
    for (std::size_t j = 0; j < lp.num_columns(); ++j) {
        const double lo = lp.column_lower()[j];
        const double hi = lp.column_upper()[j];
        const double scale = std::max({1.0, std::isfinite(lo) ? std::abs(lo) : 0.0, std::isfinite(hi) ? std::abs(hi) : 0.0});
        if (x[j] < lo - tolerance * scale || x[j] > hi + tolerance * scale) {
            report.bound_violations.push_back(lp.column_name(j));
        }
    }

    // Lagrangian dual bound: sum_i y_i * (active row bound) + sum_j d_j * (active column bound).
    double dual = 0.0;
    for (std::size_t i = 0; i < lp.num_rows(); ++i) {
        if (y[i] == 0.0) continue;
        const double bound = y[i] > 0.0 ? lp.row_lower()[i] : lp.row_upper()[i];
        if (std::isfinite(bound)) {
            dual += y[i] * bound;
        } else {
            report.max_dual_infeasibility = std::max(report.max_dual_infeasibility, std::abs(y[i]));
        }
    }
    const auto d = lp.reduced_costs(y);
    for (std::size_t j = 0; j < lp.num_columns(); ++j) {
        if (d[j] == 0.0) continue;
        const double bound = d[j] > 0.0 ? lp.column_lower()[j] : lp.column_upper()[j];
        if (std::isfinite(bound)) {
            dual += d[j] * bound;
        } else {
            report.max_dual_infeasibility = std::max(report.max_dual_infeasibility, std::abs(d[j]));
        }
    }
    report.primal_objective = lp.objective(x);
    report.dual_objective = dual;
    report.relative_gap = std::abs(report.primal_objective - dual) / std::max(1.0, std::abs(report.primal_objective));
    return report;
}

void write_solution_csv(const std::filesystem::path& dir, const SectorSolution& sol, int year) {
    std::filesystem::create_directories(dir);
    {
        csv::Writer out({"technology", "kind", "capacity_mw", "energy_capacity_mwh", "annual_output_mwh"});
        for (const auto& t : sol.technologies) {
            out.add_row({t.name, std::string(to_string(t.kind)), csv::format_double(t.capacity),
                         csv::format_double(t.energy_capacity), csv::format_double(t.annual_output)});
        }
        out.commit(dir / "capacities.csv");
    }
    const std::size_t H = sol.prices.size();
    auto stamp = [&](std::size_t h) { return h < kHoursPerYear ? model_timestamp(year, 60, h) : std::to_string(h); };
    {
        std::vector<std::string> header{"hour", "timestamp"};
        for (const auto& t : sol.technologies) {
            header.push_back(t.name + ":output");
            if (t.kind == TechKind::Storage) {
                header.push_back(t.name + ":charge");
                header.push_back(t.name + ":level");
            }
            if (t.kind == TechKind::VariableRenewable) header.push_back(t.name + ":curtailment");
        }
        csv::Writer out(header);
        std::vector<std::string> row;
        for (std::size_t h = 0; h < H; ++h) {
            row.clear();
            row.push_back(std::to_string(h));
            row.push_back(stamp(h));
            for (const auto& t : sol.technologies) {
                row.push_back(csv::format_double(t.output[h]));
                if (t.kind == TechKind::Storage) {
                    row.push_back(csv::format_double(t.charge[h]));
                    row.push_back(csv::format_double(t.level[h]));
                }
                if (t.kind == TechKind::VariableRenewable) row.push_back(csv::format_double(t.curtailment[h]));
            }
            out.add_row(row);
        }
        out.commit(dir / "dispatch.csv");
    }
    {
        csv::Writer out({"hour", "timestamp", "price_aud_per_mwh"});
        for (std::size_t h = 0; h < H; ++h) out.add_row({std::to_string(h), stamp(h), csv::format_double(sol.prices[h])});
        out.commit(dir / "prices.csv");
    }
    nlohmann::ordered_json j;
    j["status"] = std::string(to_string(sol.status));
    j["objective_aud"] = sol.objective;
    j["res_dual"] = sol.res_dual;
    j["realized_res_share"] = sol.realized_res_share;
    j["hours"] = H;
    csv::write_file_atomic(dir / "solution.json", j.dump(2) + "\n");
}

SectorSolution read_solution_csv(const std::filesystem::path& dir) {
    SectorSolution sol;
    {
        std::ifstream in(dir / "solution.json");
        if (!in) throw ParseError((dir / "solution.json").string(), 0, "cannot open file");
        const auto j = nlohmann::json::parse(in);
        sol.status = j.at("status").get<std::string>() == "optimal" ? LpStatus::Optimal : LpStatus::Error;
        sol.objective = j.at("objective_aud").get<double>();
        sol.res_dual = j.at("res_dual").get<double>();
        sol.realized_res_share = j.at("realized_res_share").get<double>();
    }
    const auto caps = csv::read(dir / "capacities.csv");
    for (std::size_t r = 0; r < caps.rows.size(); ++r) {
        const auto& row = caps.rows[r];
        const auto line = caps.line_numbers[r];
        TechnologyResult t;
        t.name = row[caps.column("technology")];
        t.kind = tech_kind_from_string(row[caps.column("kind")]);
        t.capacity = csv::parse_double(row[caps.column("capacity_mw")], caps.source, line);
        t.energy_capacity = csv::parse_double(row[caps.column("energy_capacity_mwh")], caps.source, line);
        t.annual_output = csv::parse_double(row[caps.column("annual_output_mwh")], caps.source, line);
        sol.technologies.push_back(std::move(t));
    }
    const auto dispatch = csv::read(dir / "dispatch.csv");
    for (auto& t : sol.technologies) {
        auto load = [&](const std::string& suffix, std::vector<double>& dest) {
            const auto c = dispatch.column(t.name + ":" + suffix);
            dest.resize(dispatch.rows.size());
            for (std::size_t r = 0; r < dispatch.rows.size(); ++r) {
                dest[r] = csv::parse_double(dispatch.rows[r][c], dispatch.source, dispatch.line_numbers[r]);
            }
        };
        load("output", t.output);
        if (t.kind == TechKind::Storage) {
            load("charge", t.charge);
            load("level", t.level);
        }
        if (t.kind == TechKind::VariableRenewable) load("curtailment", t.curtailment);
    }
    const auto prices = csv::read(dir / "prices.csv");
    const auto pc = prices.column("price_aud_per_mwh");
    for (std::size_t r = 0; r < prices.rows.size(); ++r) {
        sol.prices.push_back(csv::parse_double(prices.rows[r][pc], prices.source, prices.line_numbers[r]));
    }
    return sol;
}

}  // namespace prosumage
