#include "doctest.h"
#include "temp_dir.hpp"

#include "prosumage/errors.hpp"
#include "prosumage/runner.hpp"

#include <fstream>
#include <set>

using namespace prosumage;
namespace fs = std::filesystem;

#ifndef PROSUMAGE_SYNTHETIC_DIR
#error "PROSUMAGE_SYNTHETIC_DIR must point at the bundled synthetic dataset"
#endif

namespace {

const fs::path kData = PROSUMAGE_SYNTHETIC_DIR;

RunConfig small_config(const fs::path& out) {
    auto cfg = read_config(kData / "config.txt");
    cfg.max_households = 2;
    cfg.first_year = 2029;
    cfg.last_year = 2030;
    cfg.out = out;
    return cfg;
}

}  // namespace

TEST_CASE("config parsing") {
    const auto cfg = parse_config(R"(
# comment
profiles = p.csv
network_demand = /abs/n.csv   # trailing comment
fit = 0, 0.5
res = 0.39, endogenous
fleet_size = 1000
backend = dense
)",
                                  "/base");
    CHECK(cfg.profiles == fs::path("/base/p.csv"));
    CHECK(cfg.network_demand == fs::path("/abs/n.csv"));
    CHECK(cfg.fit == std::vector<double>{0.0, 0.5});
    REQUIRE(cfg.res.size() == 2);
    CHECK(*cfg.res[0] == 0.39);
    CHECK_FALSE(cfg.res[1].has_value());
    CHECK(cfg.fleet_size == 1000);
    CHECK(cfg.backend == "dense");
    CHECK(cfg.jobs == 1);

    CHECK_THROWS_AS(parse_config("colour = blue"), ParseError);
    CHECK_THROWS_AS(parse_config("fit = 0\nfit = 0.5"), ParseError);
    CHECK_THROWS_AS(parse_config("fit 0"), ParseError);
    CHECK_THROWS_AS(parse_config("fleet_size = lots"), ParseError);
    try {
        parse_config("jobs = 1\n\nbogus = 2", ".", "x.conf");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 3);
    }
}

TEST_CASE("config validation") {
    auto cfg = read_config(kData / "config.txt");
    CHECK_NOTHROW(cfg.validate());
    auto bad = cfg;
    bad.fit = {1.5};
    CHECK_THROWS_AS(bad.validate(), ValidationError);
    bad = cfg;
    bad.res = {0.0};
    CHECK_THROWS_AS(bad.validate(), ValidationError);
    bad = cfg;
    bad.backend = "cplex";
    CHECK_THROWS_AS(bad.validate(), ValidationError);
    bad = cfg;
    bad.profiles = kData / "missing.csv";
    CHECK_THROWS_AS(bad.validate(), ValidationError);
}

TEST_CASE("sha256") {
    CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    TempDir dir("sha");
    std::ofstream(dir / "f.txt", std::ios::binary) << "abc";
    CHECK(sha256_file(dir / "f.txt") == sha256_hex("abc"));
}

TEST_CASE("matrix expansion") {
    RunConfig cfg;
    auto cells = expand_matrix(cfg);
    CHECK(cells.size() == 12);
    std::set<std::string> names;
    for (const auto& c : cells) names.insert(c.name());
    CHECK(names.size() == cells.size());
    CHECK(names.count("reference_res0.39"));
    CHECK(names.count("fit0.5_res0.59"));
    for (const auto& c : cells) {
        if (!c.is_reference()) CHECK(names.count(c.reference_name()));
    }
    // References come first.
    for (std::size_t i = 0; i < 3; ++i) CHECK(cells[i].is_reference());

    cfg.res.push_back(std::nullopt);
    cfg.pv_cost_multipliers = {0.8, 1.0};
    cfg.fleet_sensitivities = {250'000};
    cells = expand_matrix(cfg);
    // 4 shares x 3 sensitivities x 3 FiT, references for base and pv_cost only.
    std::size_t refs = 0;
    for (const auto& c : cells) refs += c.is_reference();
    CHECK(cells.size() - refs == 36);
    CHECK(refs == 8);
    names.clear();
    for (const auto& c : cells) names.insert(c.name());
    CHECK(names.count("fit0_resendogenous_pv_cost_0.8"));
    CHECK(names.count("reference_resendogenous_pv_cost_0.8"));
    CHECK(names.count("fit0.25_res0.49_fleet_250000"));
    for (const auto& c : cells) {
        if (!c.is_reference()) CHECK(names.count(c.reference_name()));
    }
    CHECK(expand_matrix(cfg).size() == cells.size());
}

TEST_CASE("household key labels") {
    CHECK(HouseholdKey{0.25, 1.0, 1.0}.label() == "fit0.25_pv1_bat1");
    CHECK(HouseholdKey{0.0, 0.8, 1.2}.label() == "fit0_pv0.8_bat1.2");
}

TEST_CASE("household stage cache round trip") {
    TempDir dir("stage");
    const auto cfg = small_config(dir.path());
    const auto inputs = load_inputs(cfg);
    REQUIRE(inputs.profiles.size() == 2);
    const HouseholdKey key{0.25, 1.0, 1.0};
    const auto fresh = run_household_stage(inputs, cfg, key, dir / "cache", 1);
    CHECK_FALSE(fresh.from_cache);
    REQUIRE(fs::exists(dir / "cache" / "fingerprint.txt"));

    const auto cached = run_household_stage(inputs, cfg, key, dir / "cache", 1);
    CHECK(cached.from_cache);
    REQUIRE(cached.households.size() == fresh.households.size());
    for (std::size_t i = 0; i < fresh.households.size(); ++i) {
        const auto& a = fresh.households[i];
        const auto& b = cached.households[i];
        CHECK(a.household_id == b.household_id);
        REQUIRE(a.decisions.size() == b.decisions.size());
        for (std::size_t k = 0; k < a.decisions.size(); ++k) {
            CHECK(a.decisions[k].year == b.decisions[k].year);
            CHECK(a.decisions[k].added_pv == b.decisions[k].added_pv);
            CHECK(a.decisions[k].added_battery == b.decisions[k].added_battery);
            CHECK(a.decisions[k].npv == b.decisions[k].npv);
            CHECK(a.decisions[k].dpp == b.decisions[k].dpp);
        }
    }
    for (std::size_t t = 0; t < fresh.representative.net_grid.size(); t += 97) {
        REQUIRE(cached.representative.net_grid[t] == fresh.representative.net_grid[t]);
        REQUIRE(cached.representative.pv_generation[t] == fresh.representative.pv_generation[t]);
    }

    // A different key misses the cache.
    CHECK_FALSE(read_household_stage(dir / "cache", "not-the-fingerprint").has_value());
    auto other = cfg;
    other.last_year = 2029;
    CHECK_FALSE(run_household_stage(inputs, other, key, dir / "cache", 1).from_cache);
}

TEST_CASE("load_inputs records digests and truncates households") {
    TempDir dir("inputs");
    const auto cfg = small_config(dir.path());
    const auto inputs = load_inputs(cfg);
    CHECK(inputs.profiles[0].household_id == "H01");
    CHECK(inputs.network_demand.size() == 8760);
    CHECK(inputs.wind_availability.size() == 8760);
    CHECK(inputs.utility_pv_availability.size() == 8760);
    bool has_profiles = false;
    for (const auto& [label, digest] : inputs.digests) {
        if (label == "profiles") {
            has_profiles = true;
            CHECK(digest == sha256_file(cfg.profiles));
        }
    }
    CHECK(has_profiles);
}

TEST_CASE("invalid catalog is a validation failure before any solve") {
    TempDir dir("badcat");
    auto cfg = small_config(dir.path());
    {
        std::ifstream in(kData / "catalog.csv");
        std::ofstream out(dir / "catalog.csv");
        std::string line;
        bool header = true;
        while (std::getline(in, line)) {
            if (!header && line.rfind("coal,", 0) == 0) {
                // Negative overnight cost in the third field.
                const auto second = line.find(',', 5);
                const auto third = line.find(',', second + 1);
                line = line.substr(0, second + 1) + "-1" + line.substr(third);
            }
            out << line << '\n';
            header = false;
        }
    }
    cfg.catalog = dir / "catalog.csv";
    CHECK_THROWS_AS(load_inputs(cfg), ValidationError);
}
