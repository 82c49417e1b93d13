#include "prosumage/runner.hpp"

#include "prosumage/csv.hpp"
#include "prosumage/errors.hpp"

#include "json.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <mutex>
#include <random>
#include <set>
#include <sstream>
#include <thread>

namespace prosumage {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Configuration

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(std::string_view s) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (pos <= s.size()) {
        const auto comma = s.find(',', pos);
        const auto item = trim(s.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos));
        if (!item.empty()) out.push_back(item);
        if (comma == std::string_view::npos) break;
        pos = comma + 1;
    }
    return out;
}

std::string number_label(double v) { return csv::format_double(v); }

}  // namespace

RunConfig parse_config(std::string_view text, const fs::path& base_dir, const fs::path& source) {
    RunConfig cfg;
    std::set<std::string> seen;
    std::istringstream in{std::string(text)};
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const auto hash = raw.find('#');
        const auto line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ParseError(source.string(), line_no, "expected 'key = value'");
        const auto key = trim(std::string_view(line).substr(0, eq));
        const auto value = trim(std::string_view(line).substr(eq + 1));
        if (!seen.insert(key).second) throw ParseError(source.string(), line_no, "duplicate key '" + key + "'");

        auto path = [&] {
            fs::path p(value);
            return (p.is_absolute() ? p : base_dir / p).lexically_normal();
        };
        auto number = [&](std::string_view v) { return csv::parse_double(v, source, line_no); };
        auto integer = [&](std::string_view v) { return csv::parse_integer(v, source, line_no); };
        auto numbers = [&] {
            std::vector<double> out;
            for (const auto& item : split_list(value)) out.push_back(number(item));
            return out;
        };

        if (key == "profiles") cfg.profiles = path();
        else if (key == "network_demand") cfg.network_demand = path();
        else if (key == "network_demand_column") cfg.network_demand_column = value;
        else if (key == "wind_availability") cfg.wind_availability = path();
        else if (key == "wind_availability_column") cfg.wind_availability_column = value;
        else if (key == "catalog") cfg.catalog = value.empty() ? fs::path() : path();
        else if (key == "cost_curves") cfg.cost_curves = path();
        else if (key == "fleet_size") cfg.fleet_size = integer(value);
        else if (key == "fit") cfg.fit = numbers();
        else if (key == "res") {
            cfg.res.clear();
            for (const auto& item : split_list(value)) {
                if (item == "endogenous") cfg.res.emplace_back(std::nullopt);
                else cfg.res.emplace_back(number(item));
            }
        }
        else if (key == "pv_cost_multipliers") cfg.pv_cost_multipliers = numbers();
        else if (key == "battery_cost_multipliers") cfg.battery_cost_multipliers = numbers();
        else if (key == "fleet_sensitivities") {
            cfg.fleet_sensitivities.clear();
            for (const auto& item : split_list(value)) cfg.fleet_sensitivities.push_back(integer(item));
        }
        else if (key == "pv_cost_technologies") cfg.pv_cost_technologies = split_list(value);
        else if (key == "battery_cost_technologies") cfg.battery_cost_technologies = split_list(value);
        else if (key == "max_households") {
            const auto n = integer(value);
            if (n < 0) throw ParseError(source.string(), line_no, "max_households must be >= 0");
            cfg.max_households = static_cast<std::size_t>(n);
        }
        else if (key == "first_year") cfg.first_year = static_cast<int>(integer(value));
        else if (key == "last_year") cfg.last_year = static_cast<int>(integer(value));
        else if (key == "interest_rate") cfg.interest_rate = number(value);
        else if (key == "gross_demand_basis") {
            if (value == "residual+household_pv") cfg.gross_demand_basis = GrossDemandBasis::ResidualPlusHouseholdPv;
            else if (value == "residual") cfg.gross_demand_basis = GrossDemandBasis::ResidualOnly;
            else throw ParseError(source.string(), line_no, "gross_demand_basis must be residual+household_pv or residual");
        }
        else if (key == "backend") cfg.backend = value;
        else if (key == "solver_tolerance") cfg.solver_tolerance = number(value);
        else if (key == "jobs") cfg.jobs = static_cast<int>(integer(value));
        else if (key == "out") cfg.out = path();
        else throw ParseError(source.string(), line_no, "unknown key '" + key + "'");
    }
    return cfg;
}

RunConfig read_config(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError(path.string(), 0, "cannot open file");
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str(), path.parent_path().empty() ? fs::path(".") : path.parent_path(), path);
}

void RunConfig::validate() const {
    auto need_file = [](const fs::path& p, const char* key) {
        if (p.empty()) throw ValidationError(std::string("config: '") + key + "' is required");
        if (!fs::is_regular_file(p)) throw ValidationError(std::string("config: ") + key + " file not found: " + p.string());
    };
    need_file(profiles, "profiles");
    need_file(network_demand, "network_demand");
    need_file(wind_availability, "wind_availability");
    need_file(cost_curves, "cost_curves");
    if (!catalog.empty()) need_file(catalog, "catalog");
    if (fleet_size <= 0) throw ValidationError("config: fleet_size must be positive");
    if (fit.empty()) throw ValidationError("config: fit list is empty");
    for (double f : fit) {
        if (!(f >= 0.0 && f <= 1.0)) throw ValidationError("config: fit values must be in [0, 1]");
    }
    if (res.empty()) throw ValidationError("config: res list is empty");
    for (const auto& r : res) {
        if (r && !(*r > 0.0 && *r <= 1.0)) throw ValidationError("config: res shares must be in (0, 1]");
    }
    for (const auto* list : {&pv_cost_multipliers, &battery_cost_multipliers}) {
        if (list->empty()) throw ValidationError("config: cost multiplier lists must not be empty");
        for (double m : *list) {
            if (!(m > 0.0)) throw ValidationError("config: cost multipliers must be positive");
        }
    }
    for (long long n : fleet_sensitivities) {
        if (n <= 0) throw ValidationError("config: fleet_sensitivities must be positive");
    }
    if (first_year > last_year) throw ValidationError("config: first_year after last_year");
    if (!(interest_rate >= 0.0)) throw ValidationError("config: interest_rate must be non-negative");
    if (!(solver_tolerance > 0.0)) throw ValidationError("config: solver_tolerance must be positive");
    if (jobs < 1) throw ValidationError("config: jobs must be >= 1");
    const auto backends = available_backends();
    if (std::find(backends.begin(), backends.end(), backend) == backends.end()) {
        throw ValidationError("config: backend '" + backend + "' is not available in this build");
    }
}

// ---------------------------------------------------------------------------
// Digests

std::string sha256_hex(std::string_view bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int length = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
        throw std::runtime_error("SHA-256 digest failed");
    }
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < length; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 0xF];
    }
    return out;
}

std::string sha256_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError(path.string(), 0, "cannot open file");
    std::stringstream buffer;
    buffer << in.rdbuf();
    return sha256_hex(buffer.str());
}

// ---------------------------------------------------------------------------
// Inputs

Inputs load_inputs(const RunConfig& cfg) {
    cfg.validate();
    auto ingest = ingest_profiles(cfg.profiles);
    std::vector<std::string> rejected;
    for (const auto& r : ingest.rejected) rejected.push_back(r.household_id);
    auto profiles = std::move(ingest.profiles);
    if (cfg.max_households > 0 && profiles.size() > cfg.max_households) profiles.erase(profiles.begin() + static_cast<std::ptrdiff_t>(cfg.max_households), profiles.end());
    if (profiles.empty()) throw ValidationError("no usable household profiles in " + cfg.profiles.string());

    auto network = read_series_csv(cfg.network_demand, cfg.network_demand_column, 60, Unit::MWhPerStep);
    const auto wind_series =
        read_series_csv(cfg.wind_availability, cfg.wind_availability_column, 60, Unit::Availability);
    std::vector<double> wind(wind_series.values().begin(), wind_series.values().end());

    std::vector<double> pv(kHoursPerYear, 0.0);
    for (const auto& p : profiles) {
        const auto hourly = p.pv_yield.step_minutes() == 60 ? p.pv_yield : resample_to_hourly(p.pv_yield);
        for (std::size_t h = 0; h < pv.size(); ++h) pv[h] += hourly[h];
    }
    for (double& v : pv) v = std::clamp(v / static_cast<double>(profiles.size()), 0.0, 1.0);

    auto catalog = cfg.catalog.empty() ? default_catalog() : read_catalog_csv(cfg.catalog);
    catalog.attach_availability({{"wind", wind}, {"pv", pv}});
    catalog.validate();
    for (const auto& name : cfg.pv_cost_technologies) {
        if (!catalog.find(name)) throw ValidationError("config: pv_cost_technologies names unknown '" + name + "'");
    }
    for (const auto& name : cfg.battery_cost_technologies) {
        if (!catalog.find(name)) throw ValidationError("config: battery_cost_technologies names unknown '" + name + "'");
    }

    auto costs = CostCurves::read_csv(cfg.cost_curves);
    costs.validate(cfg.first_year, cfg.last_year);

    std::vector<std::pair<std::string, std::string>> digests{
        {"profiles", sha256_file(cfg.profiles)},
        {"network_demand", sha256_file(cfg.network_demand)},
        {"wind_availability", sha256_file(cfg.wind_availability)},
        {"cost_curves", sha256_file(cfg.cost_curves)},
    };
    if (!cfg.catalog.empty()) digests.emplace_back("catalog", sha256_file(cfg.catalog));

    return Inputs{std::move(profiles), std::move(rejected), std::move(network), std::move(wind),
                  std::move(pv),       std::move(catalog),  std::move(costs),   std::move(digests)};
}

// ---------------------------------------------------------------------------
// Worker pool

namespace {

/// Runs fn(i) for i in [0, n) on at most `jobs` threads. Exceptions are
/// captured per index and the first one (by index) is rethrown.
template <class Fn>
void parallel_for(std::size_t n, int jobs, Fn&& fn) {
    std::vector<std::exception_ptr> errors(n);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                fn(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const auto threads = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, jobs)));
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    }
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

std::string digest_of(const Inputs& in, std::string_view label) {
    for (const auto& [k, v] : in.digests) {
        if (k == label) return v;
    }
    return "builtin";
}

std::string household_fingerprint(const Inputs& in, const RunConfig& cfg, const HouseholdKey& key) {
    std::ostringstream s;
    s << "household-stage-v1|" << digest_of(in, "profiles") << '|' << digest_of(in, "cost_curves") << '|'
      << key.label() << '|' << cfg.max_households << '|' << cfg.first_year << '|' << cfg.last_year;
    return sha256_hex(s.str());
}

EconomicContext economics_for(const Inputs& in, const HouseholdKey& key) {
    EconomicContext econ;
    econ.tariff.fit_fraction = key.fit;
    econ.costs = in.costs.scaled(key.pv_multiplier, key.battery_multiplier);
    econ.validate();
    return econ;
}

std::string read_text(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

}  // namespace

// ---------------------------------------------------------------------------
// Household stage

std::string HouseholdKey::label() const {
    return "fit" + number_label(fit) + "_pv" + number_label(pv_multiplier) + "_bat" + number_label(battery_multiplier);
}

void write_household_stage(const fs::path& dir, const HouseholdStage& stage, const std::string& fingerprint) {
    fs::create_directories(dir);
    csv::Writer decisions({"household_id", "year", "added_pv_kwp", "added_battery_kwh", "npv_aud", "dpp_years",
                           "capex_aud"});
    csv::Writer households({"household_id", "decisions"});
    for (const auto& h : stage.households) {
        households.add_row({h.household_id, std::to_string(h.decisions.size())});
        for (const auto& d : h.decisions) {
            decisions.add_row({h.household_id, std::to_string(d.year), csv::format_double(d.added_pv),
                               csv::format_double(d.added_battery), csv::format_double(d.npv),
                               d.dpp ? csv::format_double(*d.dpp) : "", csv::format_double(d.capex)});
        }
    }
    decisions.commit(dir / "decisions.csv");
    households.commit(dir / "households.csv");
    const auto& r = stage.representative;
    const std::vector<std::string> names{"net_grid_kwh", "import_kwh", "demand_kwh", "pv_kwh"};
    const std::vector<const TimeSeries*> series{&r.net_grid, &r.grid_import, &r.demand, &r.pv_generation};
    write_series_csv(dir / "representative.csv", names, series);
    // Written last: its presence marks a complete cache entry.
    csv::write_file_atomic(dir / "fingerprint.txt", fingerprint + "\n");
}

std::optional<HouseholdStage> read_household_stage(const fs::path& dir, const std::string& fingerprint) {
    if (!fs::is_regular_file(dir / "fingerprint.txt")) return std::nullopt;
    if (trim(read_text(dir / "fingerprint.txt")) != fingerprint) return std::nullopt;

    const auto households = csv::read(dir / "households.csv");
    std::vector<HouseholdOutcome> outcomes;
    for (const auto& row : households.rows) outcomes.push_back({row[households.column("household_id")], {}});
    const auto decisions = csv::read(dir / "decisions.csv");
    for (std::size_t r = 0; r < decisions.rows.size(); ++r) {
        const auto& row = decisions.rows[r];
        const auto line = decisions.line_numbers[r];
        const auto& id = row[decisions.column("household_id")];
        auto it = std::find_if(outcomes.begin(), outcomes.end(), [&](const auto& o) { return o.household_id == id; });
        if (it == outcomes.end()) throw ParseError(decisions.source.string(), line, "unknown household '" + id + "'");
        InvestmentDecision d;
        d.year = static_cast<int>(csv::parse_integer(row[decisions.column("year")], decisions.source, line));
        d.added_pv = csv::parse_double(row[decisions.column("added_pv_kwp")], decisions.source, line);
        d.added_battery = csv::parse_double(row[decisions.column("added_battery_kwh")], decisions.source, line);
        d.npv = csv::parse_double(row[decisions.column("npv_aud")], decisions.source, line);
        const auto& dpp = row[decisions.column("dpp_years")];
        if (!dpp.empty()) d.dpp = csv::parse_double(dpp, decisions.source, line);
        d.capex = csv::parse_double(row[decisions.column("capex_aud")], decisions.source, line);
        it->decisions.push_back(d);
    }
    const auto rep = dir / "representative.csv";
    // The step is inferred from the row count.
    const int step = csv::read(rep).rows.size() == steps_per_year(30) ? 30 : 60;
    auto load = [&](const char* column) { return read_series_csv(rep, column, step, Unit::KWhPerStep); };
    HouseholdStage stage{HouseholdKey{}, std::move(outcomes),
                         RepresentativeHousehold{load("net_grid_kwh"), load("import_kwh"), load("demand_kwh"),
                                                 load("pv_kwh")},
                         true};
    return stage;
}

HouseholdStage run_household_stage(const Inputs& inputs, const RunConfig& cfg, const HouseholdKey& key,
                                   const fs::path& cache_dir, int jobs) {
    const auto fingerprint = household_fingerprint(inputs, cfg, key);
    if (!cache_dir.empty()) {
        if (auto cached = read_household_stage(cache_dir, fingerprint)) {
            cached->key = key;
            return std::move(*cached);
        }
    }
    const auto econ = economics_for(inputs, key);
    const EvaluationGrid grid;
    const HouseholdSpecs specs;
    const auto n = inputs.profiles.size();
    std::vector<std::optional<HouseholdSeries>> series(n);
    std::vector<HouseholdOutcome> outcomes(n);
    parallel_for(n, jobs, [&](std::size_t i) {
        const auto run = run_household(inputs.profiles[i], econ, grid, specs, cfg.first_year, cfg.last_year);
        outcomes[i] = HouseholdOutcome::from_run(run);
        series[i] = HouseholdSeries::from_run(run);
    });
    std::vector<HouseholdSeries> cohort;
    cohort.reserve(n);
    for (auto& s : series) cohort.push_back(std::move(*s));
    HouseholdStage stage{key, std::move(outcomes), representative_profile(cohort), false};
    if (!cache_dir.empty()) write_household_stage(cache_dir, stage, fingerprint);
    return stage;
}

// ---------------------------------------------------------------------------
// Matrix

std::string CellSpec::name() const {
    std::string res_label = res ? "res" + number_label(*res) : "resendogenous";
    std::string base = fit ? "fit" + number_label(*fit) + "_" + res_label : "reference_" + res_label;
    if (sensitivity != "base" && !(is_reference() && sensitivity.rfind("fleet_", 0) == 0)) base += "_" + sensitivity;
    return base;
}

std::string CellSpec::reference_name() const {
    CellSpec ref = *this;
    ref.fit.reset();
    if (ref.sensitivity.rfind("fleet_", 0) == 0) ref.sensitivity = "base";
    return ref.name();
}

std::vector<CellSpec> expand_matrix(const RunConfig& cfg) {
    struct Sensitivity {
        std::string label;
        double pv, bat;
        long long fleet;
    };
    std::vector<Sensitivity> sens{{"base", 1.0, 1.0, cfg.fleet_size}};
    for (double m : cfg.pv_cost_multipliers) {
        if (m != 1.0) sens.push_back({"pv_cost_" + number_label(m), m, 1.0, cfg.fleet_size});
    }
    for (double m : cfg.battery_cost_multipliers) {
        if (m != 1.0) sens.push_back({"battery_cost_" + number_label(m), 1.0, m, cfg.fleet_size});
    }
    for (long long n : cfg.fleet_sensitivities) {
        if (n != cfg.fleet_size) sens.push_back({"fleet_" + std::to_string(n), 1.0, 1.0, n});
    }
    std::vector<CellSpec> references, scenarios;
    std::set<std::string> reference_names;
    for (const auto& s : sens) {
        for (const auto& r : cfg.res) {
            CellSpec ref{std::nullopt, r, s.pv, s.bat, 0, s.label.rfind("fleet_", 0) == 0 ? "base" : s.label};
            if (reference_names.insert(ref.name()).second) references.push_back(ref);
            for (double f : cfg.fit) scenarios.push_back({f, r, s.pv, s.bat, s.fleet, s.label});
        }
    }
    references.insert(references.end(), scenarios.begin(), scenarios.end());
    return references;
}

const CellResult* MatrixResult::find(const std::string& name) const {
    for (const auto& c : cells) {
        if (c.spec.name() == name) return &c;
    }
    return nullptr;
}

int MatrixResult::exit_code() const {
    int code = 0;
    for (const auto& c : cells) {
        if (c.ok) continue;
        if (c.solve_failure) return 2;
        code = 1;
    }
    return code;
}

namespace {

SectorScenario make_scenario(const Inputs& in, const RunConfig& cfg, const CellSpec& spec,
                             const ResidualDemand& residual) {
    auto catalog = in.catalog;
    catalog.scale_overnight_costs(cfg.pv_cost_technologies, spec.pv_multiplier);
    catalog.scale_overnight_costs(cfg.battery_cost_technologies, spec.battery_multiplier);
    SectorScenario s;
    s.residual_demand.assign(residual.residual.values().begin(), residual.residual.values().end());
    s.household_pv_generation.assign(residual.household_pv_generation.values().begin(),
                                     residual.household_pv_generation.values().end());
    s.res_share = spec.res;
    s.technologies = std::move(catalog.technologies);
    s.interest_rate = cfg.interest_rate;
    s.gross_demand_basis = cfg.gross_demand_basis;
    return s;
}

std::string sector_fingerprint(const Inputs& in, const RunConfig& cfg, const CellSpec& spec,
                               const std::string& household_fp) {
    std::ostringstream s;
    s << "sector-v1|" << spec.name() << '|' << household_fp << '|' << spec.fleet_size << '|'
      << digest_of(in, "network_demand") << '|' << digest_of(in, "wind_availability") << '|'
      << digest_of(in, "catalog") << '|' << digest_of(in, "profiles") << '|' << cfg.max_households << '|'
      << cfg.backend << '|' << number_label(cfg.solver_tolerance) << '|' << number_label(cfg.interest_rate) << '|'
      << (cfg.gross_demand_basis == GrossDemandBasis::ResidualOnly ? "residual" : "residual+household_pv");
    for (const auto& t : cfg.pv_cost_technologies) s << "|pv:" << t;
    for (const auto& t : cfg.battery_cost_technologies) s << "|bat:" << t;
    return sha256_hex(s.str());
}

void write_summary(const fs::path& path, const MatrixResult& result, const TechnologyCatalog& catalog) {
    std::vector<std::string> header{"cell",       "fit",        "res",        "sensitivity",
                                    "fleet_size", "status",     "error",      "realized_res_share",
                                    "residual_twh", "lp_objective_aud", "system_cost_aud", "delta_system_cost_pct",
                                    "co2_t",      "co2_intensity_kg_per_kwh", "household_pv_mw",
                                    "household_battery_mwh"};
    for (const auto& t : catalog.technologies) header.push_back("capacity_mw_" + t.name);
    csv::Writer out(header);
    for (const auto& c : result.cells) {
        std::vector<std::string> row{c.spec.name(),
                                     c.spec.fit ? number_label(*c.spec.fit) : "",
                                     c.spec.res ? number_label(*c.spec.res) : "endogenous",
                                     c.spec.sensitivity,
                                     std::to_string(c.spec.fleet_size),
                                     c.ok ? "ok" : "failed",
                                     c.error};
        if (c.outcome) {
            const auto& o = *c.outcome;
            const auto co2 = co2_report(o.solution, o.technologies, o.served_energy_mwh);
            row.push_back(number_label(o.solution.realized_res_share));
            row.push_back(c.residual ? number_label(annual_sum(c.residual->residual) / 1e6) : "");
            row.push_back(number_label(o.solution.objective));
            row.push_back(number_label(o.cost.total));
            row.push_back(c.delta ? number_label(c.delta->system_cost_pct) : "");
            row.push_back(number_label(co2.total_t));
            row.push_back(number_label(co2.intensity_kg_per_kwh));
            row.push_back(number_label(o.household.pv_mw));
            row.push_back(number_label(o.household.battery_mwh));
            for (const auto& t : catalog.technologies) {
                const auto* r = o.solution.find(t.name);
                row.push_back(r ? number_label(r->capacity) : "");
            }
        } else {
            row.resize(header.size());
            if (c.residual) row[8] = number_label(annual_sum(c.residual->residual) / 1e6);
        }
        out.add_row(row);
    }
    out.commit(path);
}

void write_manifest(const fs::path& path, const RunConfig& cfg, const Inputs& in, const MatrixResult& result) {
    nlohmann::ordered_json j;
    j["tool"] = "prosumage";
    j["format"] = 1;
    for (const auto& [label, digest] : in.digests) j["inputs"][label] = {{"sha256", digest}};
    j["inputs"]["paths"] = {{"profiles", cfg.profiles.generic_string()},
                            {"network_demand", cfg.network_demand.generic_string()},
                            {"wind_availability", cfg.wind_availability.generic_string()},
                            {"cost_curves", cfg.cost_curves.generic_string()},
                            {"catalog", cfg.catalog.empty() ? "builtin" : cfg.catalog.generic_string()}};
    auto& p = j["parameters"];
    p["fleet_size"] = cfg.fleet_size;
    p["fit"] = cfg.fit;
    p["res"] = nlohmann::json::array();
    for (const auto& r : cfg.res) {
        if (r) p["res"].push_back(*r);
        else p["res"].push_back("endogenous");
    }
    p["pv_cost_multipliers"] = cfg.pv_cost_multipliers;
    p["battery_cost_multipliers"] = cfg.battery_cost_multipliers;
    p["fleet_sensitivities"] = cfg.fleet_sensitivities;
    p["max_households"] = cfg.max_households;
    p["households_used"] = in.profiles.size();
    p["households_rejected"] = in.rejected_households;
    p["first_year"] = cfg.first_year;
    p["last_year"] = cfg.last_year;
    p["interest_rate"] = cfg.interest_rate;
    p["gross_demand_basis"] =
        cfg.gross_demand_basis == GrossDemandBasis::ResidualOnly ? "residual" : "residual+household_pv";
    p["backend"] = cfg.backend;
    p["solver_tolerance"] = cfg.solver_tolerance;
    j["household_runs"] = result.household_runs;
    j["sector_solves"] = result.sector_solves;
    j["household_stages"] = nlohmann::json::array();
    for (const auto& h : result.households) {
        j["household_stages"].push_back({{"key", h.key.label()}, {"households", h.households.size()}});
    }
    j["cells"] = nlohmann::json::array();
    for (const auto& c : result.cells) {
        nlohmann::ordered_json cell;
        cell["name"] = c.spec.name();
        cell["kind"] = c.spec.is_reference() ? "reference" : "scenario";
        if (!c.spec.is_reference()) cell["reference"] = c.spec.reference_name();
        cell["status"] = c.ok ? "ok" : "failed";
        if (!c.ok) cell["error"] = c.error;
        j["cells"].push_back(cell);
    }
    csv::write_file_atomic(path, j.dump(2) + "\n");
}

}  // namespace

MatrixResult run_matrix(const RunConfig& cfg, const RunOptions& options) {
    const auto inputs = load_inputs(cfg);
    auto cells = expand_matrix(cfg);
    if (!options.only_cells.empty()) {
        std::set<std::string> keep(options.only_cells.begin(), options.only_cells.end());
        for (const auto& c : cells) {
            if (keep.count(c.name()) && !c.is_reference()) keep.insert(c.reference_name());
        }
        std::erase_if(cells, [&](const CellSpec& c) { return !keep.count(c.name()); });
        if (cells.empty()) throw ValidationError("no matrix cell matches the requested selection");
    }
    fs::create_directories(cfg.out);

    MatrixResult result;
    std::vector<HouseholdKey> keys;
    for (const auto& c : cells) {
        if (c.is_reference()) continue;
        const HouseholdKey k{*c.fit, c.pv_multiplier, c.battery_multiplier};
        if (std::find(keys.begin(), keys.end(), k) == keys.end()) keys.push_back(k);
    }
    std::vector<std::string> household_fps;
    for (const auto& k : keys) {
        const auto dir = cfg.out / "households" / k.label();
        if (!options.reuse) fs::remove(dir / "fingerprint.txt");
        result.households.push_back(run_household_stage(inputs, cfg, k, dir, cfg.jobs));
        household_fps.push_back(household_fingerprint(inputs, cfg, k));
    }
    result.household_runs = static_cast<int>(keys.size());

    auto stage_for = [&](const CellSpec& c) -> std::pair<const HouseholdStage*, std::string> {
        if (c.is_reference()) return {nullptr, "none"};
        const HouseholdKey k{*c.fit, c.pv_multiplier, c.battery_multiplier};
        const auto i = static_cast<std::size_t>(std::find(keys.begin(), keys.end(), k) - keys.begin());
        return {&result.households[i], household_fps[i]};
    };

    result.cells.resize(cells.size());
    for (std::size_t i = 0; i < cells.size(); ++i) result.cells[i].spec = cells[i];
    if (options.until == Stage::Households) {
        write_manifest(cfg.out / "manifest.json", cfg, inputs, result);
        for (auto& c : result.cells) c.ok = true;
        return result;
    }

    const HouseholdSpecs specs;
    auto process = [&](std::size_t i) {
        auto& cell = result.cells[i];
        const auto& spec = cell.spec;
        const auto dir = cfg.out / "cells" / spec.name();
        try {
            fs::create_directories(dir);
            const auto [stage, household_fp] = stage_for(spec);
            cell.residual = stage ? build_residual(inputs.network_demand, stage->representative,
                                                   FleetSpec{spec.fleet_size})
                                  : reference_residual(inputs.network_demand);
            write_residual_csv(dir / "residual.csv", *cell.residual);
            if (options.until == Stage::Residual) {
                cell.ok = true;
                return;
            }

            const auto scenario = make_scenario(inputs, cfg, spec, *cell.residual);
            const auto fingerprint = sector_fingerprint(inputs, cfg, spec, household_fp);
            const auto sector_dir = dir / "sector";
            SectorSolution solution;
            const bool cached = options.reuse && fs::is_regular_file(sector_dir / "fingerprint.txt") &&
                                trim(read_text(sector_dir / "fingerprint.txt")) == fingerprint;
            if (cached) {
                solution = read_solution_csv(sector_dir);
            } else {
                if (options.require_existing_solutions) {
                    throw ValidationError("no up-to-date sector solution in " + sector_dir.string());
                }
                fs::remove(sector_dir / "fingerprint.txt");
                const auto backend = make_backend(cfg.backend);
                SolverOptions solver;
                solver.tolerance = cfg.solver_tolerance;
                solution = solve(build_lp(scenario), scenario, *backend, solver);
                write_solution_csv(sector_dir, solution, inputs.network_demand.start_year());
                csv::write_file_atomic(sector_dir / "fingerprint.txt", fingerprint + "\n");
            }

            ScenarioOutcome outcome;
            outcome.name = spec.name();
            outcome.res_share = spec.res;
            outcome.solution = std::move(solution);
            outcome.technologies = scenario.technologies;
            outcome.served_energy_mwh = annual_sum(inputs.network_demand);
            if (stage) {
                const auto econ = economics_for(inputs, stage->key);
                const auto log = fleet_investment_log(stage->households, econ.costs, spec.fleet_size);
                outcome.cost = system_cost(outcome.solution, log, {.year = cfg.last_year});
                outcome.household = fleet_capacity(stage->households, specs, cfg.last_year, spec.fleet_size);
            } else {
                outcome.cost = system_cost(outcome.solution, {}, {.year = cfg.last_year});
            }
            cell.outcome = std::move(outcome);
            if (options.until == Stage::Sector) {
                cell.ok = true;
                return;
            }

            const auto co2 = co2_report(cell.outcome->solution, cell.outcome->technologies,
                                        cell.outcome->served_energy_mwh);
            write_outcome_csv(dir / "outcome.csv", *cell.outcome, co2);
            if (!spec.is_reference()) {
                const auto* ref = result.find(spec.reference_name());
                if (!ref || !ref->ok || !ref->outcome) {
                    throw ValidationError("reference '" + spec.reference_name() + "' is unavailable");
                }
                cell.delta = delta_report(*cell.outcome, *ref->outcome);
                write_delta_csv(dir / "delta.csv", *cell.delta);
                cell.segments = segment_prices(*cell.residual, cell.outcome->solution.prices, *ref->residual,
                                               ref->outcome->solution.prices);
                write_segments_csv(dir / "segments.csv", cell.segments);
                RldcInputs scn{std::vector<double>(cell.residual->residual.values().begin(),
                                                   cell.residual->residual.values().end()),
                               std::vector<double>(cell.residual->household_pv_generation.values().begin(),
                                                   cell.residual->household_pv_generation.values().end()),
                               cell.outcome->technologies, &cell.outcome->solution};
                RldcInputs rf{std::vector<double>(ref->residual->residual.values().begin(),
                                                  ref->residual->residual.values().end()),
                              {}, ref->outcome->technologies, &ref->outcome->solution};
                write_curves_csv(dir / "rldc.csv", rldc_decomposition(scn, rf));
            }
            cell.ok = true;
        } catch (const SolveError& e) {
            cell.solve_failure = true;
            cell.error = e.what();
        } catch (const std::exception& e) {
            cell.error = e.what();
        }
    };

    std::vector<std::size_t> reference_idx, scenario_idx;
    for (std::size_t i = 0; i < cells.size(); ++i) (cells[i].is_reference() ? reference_idx : scenario_idx).push_back(i);
    parallel_for(reference_idx.size(), cfg.jobs, [&](std::size_t k) { process(reference_idx[k]); });
    parallel_for(scenario_idx.size(), cfg.jobs, [&](std::size_t k) { process(scenario_idx[k]); });

    for (const auto& c : result.cells) {
        if (c.outcome) ++result.sector_solves;
    }
    if (options.until != Stage::Residual) write_summary(cfg.out / "summary.csv", result, inputs.catalog);
    write_manifest(cfg.out / "manifest.json", cfg, inputs, result);
    return result;
}

// ---------------------------------------------------------------------------
// Verification suite

namespace {

Check make_check(std::string name, bool passed, std::string detail) {
    return Check{std::move(name), passed, std::move(detail), false};
}

std::string fmt_num(double v) {
    std::ostringstream s;
    s.precision(6);
    s << v;
    return s.str();
}

}  // namespace

std::vector<Check> verify(const RunConfig& cfg) {
    std::vector<Check> checks;
    auto guarded = [&](const std::string& name, auto&& body) {
        try {
            checks.push_back(body());
        } catch (const std::exception& e) {
            checks.push_back(make_check(name, false, std::string("exception: ") + e.what()));
        }
    };

    const auto inputs = load_inputs(cfg);
    const HouseholdSpecs specs;
    const double eta = specs.battery.one_way_efficiency();

    guarded("dispatch_balance", [&] {
        std::mt19937_64 rng(20190101);
        std::uniform_real_distribution<double> u(0.0, 3.0);
        double worst = 0.0;
        double soc = 0.0;
        const double usable = 10.0, limit = 2.0;
        for (int i = 0; i < 10'000; ++i) {
            const double pv = u(rng), load = u(rng);
            const double before = soc;
            const auto s = dispatch_step(pv, load, soc, usable, limit, eta);
            worst = std::max({worst, std::abs(pv - s.self_consumption - s.battery_charge_ac - s.grid_export),
                              std::abs(load - s.self_consumption - s.battery_discharge_ac - s.grid_import),
                              std::abs(soc - (before + eta * s.battery_charge_ac - s.battery_discharge_ac / eta))});
            if (soc < -1e-12 || soc > usable + 1e-12) worst = std::max(worst, 1.0);
        }
        return make_check("dispatch_balance", worst <= 1e-9, "max residual " + fmt_num(worst) + " kWh");
    });

    guarded("battery_roundtrip", [&] {
        const auto& profile = inputs.profiles.front();
        DegradedCapacity cap;
        cap.usable_pv_kwp = cap.nominal_pv_kwp = 5.0;
        cap.usable_battery_kwh = cap.nominal_battery_kwh = 10.0;
        cap.usable_battery_kw = 4.0;
        const auto r = simulate_dispatch(profile, cap, specs.battery);
        const double end = r.state_of_charge.back();
        const double expected = eta * eta * r.totals.battery_charge_ac - eta * end;
        const double rel = std::abs(r.totals.battery_discharge_ac - expected) / std::max(1.0, expected);
        return make_check("battery_roundtrip", rel <= 1e-6, "relative error " + fmt_num(rel));
    });

    guarded("npv_dpp_oracle", [&] {
        const Cashflows a{5000.0, std::vector<double>(10, 1000.0)};
        const Cashflows b{3000.0, std::vector<double>(10, 1000.0)};
        const double npv = net_present_value(a, 0.05);
        const auto dpp = discounted_payback(b, 0.05);
        const bool ok = std::abs(npv - 2721.73) <= 1e-2 && dpp && std::abs(*dpp - 3.336) <= 1e-2;
        return make_check("npv_dpp_oracle", ok,
                          "npv " + fmt_num(npv) + ", dpp " + (dpp ? fmt_num(*dpp) : std::string("never")));
    });

    guarded("invest_decision_enumeration", [&] {
        EconomicContext econ;
        econ.tariff.fit_fraction = cfg.fit.front();
        econ.costs = inputs.costs;
        const EvaluationGrid grid;
        const auto& profile = inputs.profiles.front();
        const HouseholdState state;
        const auto decision = invest_decision(profile, state, econ, grid, specs, cfg.first_year);
        std::optional<Candidate> best;
        double best_npv = 0.0, best_capex = 0.0;
        bool gate = false;
        for (int i = 0; i < grid.pv_points(); ++i) {
            for (int j = 0; j < grid.battery_points(); ++j) {
                const Candidate c{grid.pv_at(i), grid.battery_at(j)};
                const double capex = c.pv_kwp * econ.costs.pv_cost(cfg.first_year) +
                                     c.battery_kwh * econ.costs.battery_cost(cfg.first_year);
                const double npv = npv_of_configuration(profile, state, c, econ, specs, cfg.first_year);
                if (i + j > 0) {
                    const auto dpp = dpp_of_configuration(profile, state, c, econ, specs, cfg.first_year);
                    gate = gate || (dpp && *dpp <= econ.dpp_threshold);
                }
                const bool better = !best || npv > best_npv ||
                                    (npv == best_npv && (capex < best_capex ||
                                                         (capex == best_capex && c.battery_kwh < best->battery_kwh)));
                if (better) {
                    best = c;
                    best_npv = npv;
                    best_capex = capex;
                }
            }
        }
        const bool expect_invest = best_npv > 0.0 && gate;
        bool ok = expect_invest == decision.has_value();
        if (ok && decision) ok = decision->added_pv == best->pv_kwp && decision->added_battery == best->battery_kwh;
        return make_check("invest_decision_enumeration", ok,
                          expect_invest ? "best (" + fmt_num(best->pv_kwp) + " kWp, " + fmt_num(best->battery_kwh) +
                                              " kWh), npv " + fmt_num(best_npv)
                                        : std::string("no investment"));
    });

    guarded("lp_toy", [&] {
        SectorScenario s;
        s.residual_demand = {1.0, 2.0};
        Technology t;
        t.name = "unit";
        t.fixed_om = 10.0;
        t.variable_om = 5.0;
        s.technologies = {t};
        const auto model = build_lp(s);
        const DenseSimplexBackend dense;
        const auto sol = solve(model, s, dense);
        const auto report = validate_solution(sol.raw, model.lp);
        const bool ok = std::abs(sol.objective - 35.0) <= 1e-9 && std::abs(sol.prices[0] - 5.0) <= 1e-9 &&
                        std::abs(sol.prices[1] - 15.0) <= 1e-9 && report.relative_gap <= 1e-9;
        return make_check("lp_toy", ok,
                          "objective " + fmt_num(sol.objective) + ", duals [" + fmt_num(sol.prices[0]) + ", " +
                              fmt_num(sol.prices[1]) + "]");
    });

    // Full-year reference solve with the configured backend and tolerance.
    std::optional<SectorSolution> full_year;
    std::optional<SectorScenario> full_scenario;
    guarded("full_year_feasibility", [&] {
        const auto residual = reference_residual(inputs.network_demand);
        CellSpec spec{std::nullopt, 0.39, 1.0, 1.0, 0, "base"};
        for (const auto& r : cfg.res) {
            if (r) {
                spec.res = r;
                break;
            }
        }
        full_scenario = make_scenario(inputs, cfg, spec, residual);
        const auto model = build_lp(*full_scenario);
        const auto backend = make_backend(cfg.backend);
        SolverOptions options;
        options.tolerance = cfg.solver_tolerance;
        full_year = solve(model, *full_scenario, *backend, options);
        const auto report = validate_solution(full_year->raw, model.lp, 1e-6);
        double min_dual = 0.0;
        for (double p : full_year->prices) min_dual = std::min(min_dual, p);
        checks.push_back(make_check("full_year_constraint_residuals",
                                    report.violations.empty() && report.bound_violations.empty(),
                                    std::to_string(report.violations.size()) + " violated rows"));
        checks.push_back(make_check("full_year_balance_duals", min_dual >= -1e-6, "min dual " + fmt_num(min_dual)));
        return make_check("full_year_duality_gap", report.relative_gap <= 1e-6,
                          "relative gap " + fmt_num(report.relative_gap));
    });

    guarded("reference_identities", [&] {
        const auto residual = reference_residual(inputs.network_demand);
        bool same = residual.residual.size() == inputs.network_demand.size();
        for (std::size_t h = 0; same && h < residual.residual.size(); ++h) {
            same = residual.residual[h] == inputs.network_demand[h];
        }
        bool cost_ok = true, delta_ok = true;
        if (full_year) {
            const auto cost = system_cost(*full_year, {});
            cost_ok = cost.total == full_year->objective;
            ScenarioOutcome o{"reference", full_scenario->res_share, *full_year, full_scenario->technologies,
                              annual_sum(inputs.network_demand), cost, {}};
            const auto d = delta_report(o, o);
            delta_ok = d.co2_t == 0.0 && d.system_cost == 0.0 && d.system_cost_pct == 0.0;
            for (const auto& t : d.technologies) {
                delta_ok = delta_ok && t.capacity_mw == 0.0 && t.energy_capacity_mwh == 0.0 && t.generation_gwh == 0.0;
            }
        }
        return make_check("reference_identities", same && cost_ok && delta_ok,
                          std::string(same ? "" : "residual != network; ") + (cost_ok ? "" : "cost != objective; ") +
                              (delta_ok ? "" : "self delta non-zero"));
    });

    guarded("catalog_rejects_negative_cost", [&] {
        auto bad = inputs.catalog;
        bad.technologies.front().overnight_cost_power = -1.0;
        bool rejected = false;
        try {
            bad.validate();
        } catch (const ValidationError&) {
            rejected = true;
        }
        return make_check("catalog_rejects_negative_cost", rejected, rejected ? "rejected" : "accepted");
    });

    guarded("household_cache_roundtrip", [&] {
        auto small_cfg = cfg;
        small_cfg.max_households = 1;
        auto small = inputs;
        small.profiles.erase(small.profiles.begin() + 1, small.profiles.end());
        const HouseholdKey key{cfg.fit.front(), 1.0, 1.0};
        const auto dir = cfg.out / "verify" / "household_cache";
        fs::remove_all(dir);
        const auto fresh = run_household_stage(small, small_cfg, key, dir, 1);
        const auto cached = run_household_stage(small, small_cfg, key, dir, 1);
        bool equal = cached.from_cache && cached.households.size() == fresh.households.size();
        for (std::size_t i = 0; equal && i < fresh.households.size(); ++i) {
            const auto& a = fresh.households[i].decisions;
            const auto& b = cached.households[i].decisions;
            equal = a.size() == b.size();
            for (std::size_t k = 0; equal && k < a.size(); ++k) {
                equal = a[k].year == b[k].year && a[k].added_pv == b[k].added_pv &&
                        a[k].added_battery == b[k].added_battery && a[k].npv == b[k].npv && a[k].dpp == b[k].dpp &&
                        a[k].capex == b[k].capex;
            }
        }
        const auto same_series = [](const TimeSeries& x, const TimeSeries& y) {
            return std::equal(x.values().begin(), x.values().end(), y.values().begin(), y.values().end());
        };
        equal = equal && same_series(fresh.representative.net_grid, cached.representative.net_grid) &&
                same_series(fresh.representative.grid_import, cached.representative.grid_import) &&
                same_series(fresh.representative.demand, cached.representative.demand) &&
                same_series(fresh.representative.pv_generation, cached.representative.pv_generation);
        return make_check("household_cache_roundtrip", equal, equal ? "identical" : "cached result differs");
    });

    return checks;
}

// ---------------------------------------------------------------------------
// Reproduction checks

std::vector<Check> reproduction_checks(const MatrixResult& result, const RunConfig& cfg) {
    std::vector<Check> checks;
    auto skipped = [&](std::string name, std::string why) { checks.push_back({std::move(name), false, std::move(why), true}); };
    auto within = [](double v, double target, double tol) { return std::abs(v - target) <= tol; };

    auto base_stage = [&](double fit) -> const HouseholdStage* {
        for (const auto& h : result.households) {
            if (h.key == HouseholdKey{fit, 1.0, 1.0}) return &h;
        }
        return nullptr;
    };
    auto mean_capacity = [&](const HouseholdStage& stage) {
        const HouseholdSpecs specs;
        double pv = 0.0, bat = 0.0;
        for (const auto& h : stage.households) {
            const auto c = degrade(h.state(), cfg.last_year, specs);
            pv += c.nominal_pv_kwp;
            bat += c.nominal_battery_kwh;
        }
        const auto n = static_cast<double>(stage.households.size());
        return std::pair{pv / n, bat / n};
    };
    auto cell = [&](const std::string& name) -> const CellResult* {
        const auto* c = result.find(name);
        return c && c->ok && c->outcome ? c : nullptr;
    };
    auto capacity = [](const CellResult& c, const std::string& tech) {
        const auto* t = c.outcome->solution.find(tech);
        return t ? std::pair{t->capacity, t->energy_capacity} : std::pair{0.0, 0.0};
    };

    if (const auto* s = base_stage(0.5)) {
        bool all = true;
        const HouseholdSpecs specs;
        for (const auto& h : s->households) {
            const auto c = degrade(h.state(), cfg.last_year, specs);
            all = all && c.nominal_pv_kwp == 5.0 && c.nominal_battery_kwh == 0.0;
        }
        const auto [pv, bat] = mean_capacity(*s);
        checks.push_back(make_check("fit50_endpoint_5kwp_no_battery", all,
                                    "mean " + fmt_num(pv) + " kWp / " + fmt_num(bat) + " kWh"));
    } else {
        skipped("fit50_endpoint_5kwp_no_battery", "FiT 0.5 base stage not in this run");
    }

    for (const auto& [fit, pv_t, bat_t] : {std::tuple{0.25, 5.3, 5.9}, std::tuple{0.0, 4.7, 8.7}}) {
        const auto name = "fit" + number_label(fit) + "_mean_capacity";
        if (const auto* s = base_stage(fit)) {
            const auto [pv, bat] = mean_capacity(*s);
            checks.push_back(make_check(name, within(pv, pv_t, 0.5) && within(bat, bat_t, 1.5),
                                        fmt_num(pv) + " kWp / " + fmt_num(bat) + " kWh"));
        } else {
            skipped(name, "stage not in this run");
        }
    }

    std::string first_res;
    for (const auto& r : cfg.res) {
        if (r) {
            first_res = number_label(*r);
            break;
        }
    }
    const auto* ref = cell("reference_res" + first_res);
    if (ref) {
        const double twh = annual_sum(ref->residual->residual) / 1e6;
        checks.push_back(make_check("reference_residual_18_1_twh", within(twh, 18.1, 0.362), fmt_num(twh) + " TWh"));
        const auto* f25 = cell("fit0.25_res" + first_res);
        const auto* f50 = cell("fit0.5_res" + first_res);
        const auto* f0 = cell("fit0_res" + first_res);
        if (f25 && f50 && f0) {
            const double a = annual_sum(f25->residual->residual), b = annual_sum(f50->residual->residual),
                         c = annual_sum(f0->residual->residual), d = annual_sum(ref->residual->residual);
            checks.push_back(make_check("residual_ranking", a < b && b < c && c < d,
                                        fmt_num(a / 1e6) + " < " + fmt_num(b / 1e6) + " < " + fmt_num(c / 1e6) +
                                            " < " + fmt_num(d / 1e6) + " TWh"));
        } else {
            skipped("residual_ranking", "prosumage cells missing");
        }
    } else {
        skipped("reference_residual_18_1_twh", "reference cell missing");
        skipped("residual_ranking", "reference cell missing");
    }

    if (const auto* r39 = cell("reference_res0.39")) {
        const double pv = capacity(*r39, "pv").first, wind = capacity(*r39, "wind").first;
        const auto [li_mw, li_mwh] = capacity(*r39, "li-ion");
        const bool ok = within(pv, 1160, 116) && within(wind, 1610, 161) && within(li_mw, 210, 21) &&
                        within(li_mwh, 620, 62);
        checks.push_back(make_check("reference_39_capacities", ok,
                                    "pv " + fmt_num(pv) + " MW, wind " + fmt_num(wind) + " MW, li-ion " +
                                        fmt_num(li_mw) + " MW / " + fmt_num(li_mwh) + " MWh"));
    } else {
        skipped("reference_39_capacities", "reference at 39% missing");
    }

    for (const auto& [res, pv_t, wind_t] : {std::tuple{0.39, 0.38, 0.20}, std::tuple{0.59, 0.70, 0.08}}) {
        const auto name = "substitution_fit50_res" + number_label(res);
        const auto* c = cell("fit0.5_res" + number_label(res));
        if (!c || !c->delta) {
            skipped(name, "cell missing");
            continue;
        }
        double pv = NAN, wind = NAN;
        for (const auto& t : c->delta->technologies) {
            if (t.name == "pv" && t.per_household_pv) pv = *t.per_household_pv;
            if (t.name == "wind" && t.per_household_pv) wind = *t.per_household_pv;
        }
        checks.push_back(make_check(name, within(pv, pv_t, 0.1) && within(wind, wind_t, 0.1),
                                    "pv " + fmt_num(pv) + ", wind " + fmt_num(wind)));
    }

    {
        bool any = false, ok = true;
        std::string detail;
        for (const auto& c : result.cells) {
            if (c.spec.is_reference() || c.spec.sensitivity != "base" || !c.ok || !c.delta || !c.spec.res) continue;
            any = true;
            double dpv = 0.0, dcoal = 0.0;
            for (const auto& t : c.delta->technologies) {
                if (t.name == "pv") dpv = t.capacity_mw;
                if (t.name == "coal") dcoal = t.generation_gwh;
            }
            const bool with_battery = c.outcome->household.battery_mwh > 0.0;
            const bool cell_ok = dpv < 0.0 && c.delta->system_cost > 0.0 && (!with_battery || dcoal >= -1e-6);
            if (!cell_ok) detail += c.spec.name() + " ";
            ok = ok && cell_ok;
        }
        if (any) checks.push_back(make_check("directional_claims", ok, ok ? "all cells" : "fails: " + detail));
        else skipped("directional_claims", "no prosumage cells");
        const CellResult* endo = nullptr;
        for (const auto& c : result.cells) {
            if (c.spec.is_reference() && !c.spec.res && c.spec.sensitivity == "base" && c.ok && c.outcome) endo = &c;
        }
        if (endo) {
            const double share = endo->outcome->solution.realized_res_share;
            checks.push_back(make_check("endogenous_share_just_below_59", share <= 0.59 && share >= 0.56,
                                        fmt_num(100 * share) + " %"));
        } else {
            skipped("endogenous_share_just_below_59", "no endogenous reference");
        }
    }

    for (const auto& [fit, lo, hi] : {std::tuple{0.0, 18.0, 28.0}, std::tuple{0.5, 1.0, 12.0}}) {
        const auto name = "system_cost_increase_fit" + number_label(fit);
        const auto* c = cell("fit" + number_label(fit) + "_res" + first_res);
        if (!c || !c->delta) {
            skipped(name, "cell missing");
            continue;
        }
        const double pct = c->delta->system_cost_pct;
        checks.push_back(make_check(name, pct >= lo && pct <= hi, fmt_num(pct) + " %"));
    }
    return checks;
}

}  // namespace prosumage
