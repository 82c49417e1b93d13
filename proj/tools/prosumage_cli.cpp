#include "prosumage/csv.hpp"
#include "prosumage/errors.hpp"
#include "prosumage/runner.hpp"

#include <CLI11.hpp>
#include <fmt/core.h>

#include <cstdio>
#include <optional>
#include <string>

namespace {

using namespace prosumage;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitSolve = 2;

struct CommonFlags {
    std::string config;
    std::string out;
    int jobs = 0;
    std::string backend;
    bool reproduction_mode = false;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--config", flags.config, "Run configuration file")->required()->check(CLI::ExistingFile);
    cmd->add_option("--out", flags.out, "Output directory (overrides the config)");
    cmd->add_option("--jobs", flags.jobs, "Worker threads (overrides the config)")->check(CLI::PositiveNumber);
    cmd->add_option("--backend", flags.backend, "LP backend: dense, highs, highs-ipm or highs-ipx");
    cmd->add_flag("--reproduction-mode", flags.reproduction_mode,
                  "Check the full-scale quantitative claims after the run");
}

RunConfig load(const CommonFlags& flags) {
    auto cfg = read_config(flags.config);
    if (!flags.out.empty()) cfg.out = flags.out;
    if (flags.jobs > 0) cfg.jobs = flags.jobs;
    if (!flags.backend.empty()) cfg.backend = flags.backend;
    return cfg;
}

int print_checks(const std::vector<Check>& checks) {
    int failed = 0;
    for (const auto& c : checks) {
        const char* tag = c.skipped ? "SKIP" : (c.passed ? "PASS" : "FAIL");
        fmt::print("{:<4}  {:<36}  {}\n", tag, c.name, c.detail);
        if (!c.skipped && !c.passed) ++failed;
    }
    return failed;
}

int report(const MatrixResult& result, const RunConfig& cfg, bool reproduction_mode) {
    int ok = 0;
    for (const auto& c : result.cells) {
        if (c.ok) {
            ++ok;
        } else {
            fmt::print(stderr, "cell {} failed: {}\n", c.spec.name(), c.error);
        }
    }
    fmt::print("{} household stage(s), {} sector solve(s), {}/{} cells ok -> {}\n", result.household_runs,
               result.sector_solves, ok, result.cells.size(), cfg.out.string());
    int code = result.exit_code();
    if (reproduction_mode) {
        if (print_checks(reproduction_checks(result, cfg)) > 0 && code == kExitOk) code = kExitValidation;
    }
    return code;
}

std::optional<double> parse_res(const std::string& text) {
    if (text == "endogenous") return std::nullopt;
    return csv::parse_double(text, "--res", 0);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Prosumage household investment and power sector model"};
    app.require_subcommand(1);

    CommonFlags households_flags, residual_flags, sector_flags, analyze_flags, matrix_flags, verify_flags;
    auto* households = app.add_subcommand("households", "Simulate household investment for every FiT level");
    add_common(households, households_flags);

    auto* residual = app.add_subcommand("residual", "Build residual demand for every cell");
    add_common(residual, residual_flags);

    auto* sector = app.add_subcommand("sector", "Solve one scenario and its reference");
    add_common(sector, sector_flags);
    std::string fit_arg, res_arg;
    bool reference_only = false;
    sector->add_option("--fit", fit_arg, "FiT fraction of the cell (default: first configured)");
    sector->add_option("--res", res_arg, "RES share or 'endogenous' (default: first configured)");
    sector->add_flag("--reference", reference_only, "Solve only the reference scenario");

    auto* analyze = app.add_subcommand("analyze", "Recompute reports from solved cells");
    add_common(analyze, analyze_flags);

    auto* matrix = app.add_subcommand("matrix", "Run the full scenario matrix");
    add_common(matrix, matrix_flags);
    bool fresh = false;
    matrix->add_flag("--fresh", fresh, "Ignore cached household and sector results");

    auto* verify_cmd = app.add_subcommand("verify", "Run the property and oracle suite");
    add_common(verify_cmd, verify_flags);

    CLI11_PARSE(app, argc, argv);

    try {
        if (households->parsed()) {
            const auto cfg = load(households_flags);
            RunOptions opt;
            opt.until = Stage::Households;
            return report(run_matrix(cfg, opt), cfg, false);
        }
        if (residual->parsed()) {
            const auto cfg = load(residual_flags);
            RunOptions opt;
            opt.until = Stage::Residual;
            return report(run_matrix(cfg, opt), cfg, false);
        }
        if (sector->parsed()) {
            const auto cfg = load(sector_flags);
            CellSpec spec;
            spec.sensitivity = "base";
            spec.fleet_size = cfg.fleet_size;
            spec.res = res_arg.empty() ? cfg.res.front() : parse_res(res_arg);
            if (!reference_only) spec.fit = fit_arg.empty() ? cfg.fit.front() : csv::parse_double(fit_arg, "--fit", 0);
            RunOptions opt;
            opt.until = Stage::Analyze;
            opt.only_cells = {spec.name()};
            return report(run_matrix(cfg, opt), cfg, false);
        }
        if (analyze->parsed()) {
            const auto cfg = load(analyze_flags);
            RunOptions opt;
            opt.require_existing_solutions = true;
            return report(run_matrix(cfg, opt), cfg, analyze_flags.reproduction_mode);
        }
        if (matrix->parsed()) {
            const auto cfg = load(matrix_flags);
            RunOptions opt;
            opt.reuse = !fresh;
            return report(run_matrix(cfg, opt), cfg, matrix_flags.reproduction_mode);
        }
        if (verify_cmd->parsed()) {
            const auto cfg = load(verify_flags);
            const int failed = print_checks(verify(cfg));
            fmt::print("{}\n", failed == 0 ? "all properties pass" : fmt::format("{} propert(ies) failed", failed));
            return failed == 0 ? kExitOk : kExitValidation;
        }
    } catch (const SolveError& e) {
        fmt::print(stderr, "solve failure: {}\n", e.what());
        return kExitSolve;
    } catch (const std::exception& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return kExitValidation;
    }
    return kExitOk;
}
