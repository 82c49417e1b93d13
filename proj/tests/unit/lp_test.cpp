#include "doctest.h"

#include "prosumage/errors.hpp"
#include "prosumage/lp.hpp"
#include "prosumage/sector.hpp"

#include <random>
#include <sstream>

using namespace prosumage;

namespace {

// min 10 cap + 5 g1 + 5 g2  s.t.  g1 = 1, g2 = 2, g_h <= cap.
LinearProgram toy() {
    LinearProgram lp;
    const int cap = lp.add_column("cap", 10.0);
    const int g1 = lp.add_column("g1", 5.0);
    const int g2 = lp.add_column("g2", 5.0);
    lp.add_row({RowClass::Balance, 0, 0}, 1.0, 1.0, {{g1, 1.0}});
    lp.add_row({RowClass::Balance, 0, 1}, 2.0, 2.0, {{g2, 1.0}});
    lp.add_row({RowClass::DispatchCap, 0, 0}, -kInfinity, 0.0, {{g1, 1.0}, {cap, -1.0}});
    lp.add_row({RowClass::DispatchCap, 0, 1}, -kInfinity, 0.0, {{g2, 1.0}, {cap, -1.0}});
    return lp;
}

std::vector<std::string> backends_to_test() {
    std::vector<std::string> out{"dense"};
    for (const auto& b : available_backends()) {
        if (b == "highs") out.push_back(b);
    }
    return out;
}

}  // namespace

TEST_CASE("toy LP: objective, primal and duals") {
    const auto lp = toy();
    for (const auto& name : backends_to_test()) {
        CAPTURE(name);
        const auto backend = make_backend(name);
        const auto sol = backend->solve(lp, {});
        REQUIRE(sol.status == LpStatus::Optimal);
        CHECK(sol.objective == doctest::Approx(35.0));
        CHECK(sol.column_values[0] == doctest::Approx(2.0));
        CHECK(sol.row_duals[0] == doctest::Approx(5.0));
        CHECK(sol.row_duals[1] == doctest::Approx(15.0));
        const auto report = validate_solution(sol, lp);
        CHECK(report.ok());
        CHECK(report.dual_objective == doctest::Approx(35.0));
        CHECK(report.relative_gap <= 1e-12);
    }
}

TEST_CASE("LP statuses: infeasible and unbounded") {
    LinearProgram infeasible;
    const int x = infeasible.add_column("x", 1.0, 0.0, 1.0);
    infeasible.add_row({}, 2.0, kInfinity, {{x, 1.0}});
    LinearProgram unbounded;
    const int y = unbounded.add_column("y", -1.0);
    unbounded.add_row({}, 0.0, kInfinity, {{y, 1.0}});
    for (const auto& name : backends_to_test()) {
        CAPTURE(name);
        const auto backend = make_backend(name);
        CHECK(backend->solve(infeasible, {}).status == LpStatus::Infeasible);
        CHECK(backend->solve(unbounded, {}).status == LpStatus::Unbounded);
    }
}

TEST_CASE("dense simplex handles bounds, ranges and free columns") {
    // min -x - 2y + z  s.t.  1 <= x + y <= 4,  y - z = 1,  x <= 3, y in [0.5, 2], z free
    LinearProgram lp;
    const int x = lp.add_column("x", -1.0, 0.0, 3.0);
    const int y = lp.add_column("y", -2.0, 0.5, 2.0);
    const int z = lp.add_column("z", 1.0, -kInfinity, kInfinity);
    lp.add_row({}, 1.0, 4.0, {{x, 1.0}, {y, 1.0}});
    lp.add_row({}, 1.0, 1.0, {{y, 1.0}, {z, -1.0}});
    const auto sol = DenseSimplexBackend{}.solve(lp, {});
    REQUIRE(sol.status == LpStatus::Optimal);
    // y = 2 (z = 1), x = 2: objective -2 - 4 + 1 = -5
    CHECK(sol.objective == doctest::Approx(-5.0));
    CHECK(validate_solution(sol, lp).ok());
}

TEST_CASE("dense simplex and HiGHS agree on random feasible LPs") {
    bool have_highs = false;
    for (const auto& b : available_backends()) have_highs = have_highs || b == "highs";
    if (!have_highs) return;
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const auto highs = make_backend("highs");
    const DenseSimplexBackend dense;
    for (int trial = 0; trial < 40; ++trial) {
        CAPTURE(trial);
        const int n = 4 + static_cast<int>(u(rng) * 12);
        const int m = 3 + static_cast<int>(u(rng) * 10);
        LinearProgram lp;
        std::vector<double> x0(n);
        for (int j = 0; j < n; ++j) {
            x0[j] = 2.0 * u(rng);
            lp.add_column("x" + std::to_string(j), u(rng) * 4.0 - 1.0, 0.0, 5.0);
        }
        for (int i = 0; i < m; ++i) {
            std::vector<Term> terms;
            double activity = 0.0;
            for (int j = 0; j < n; ++j) {
                if (u(rng) < 0.5) continue;
                const double a = u(rng) * 4.0 - 2.0;
                terms.push_back({j, a});
                activity += a * x0[j];
            }
            if (terms.empty()) continue;
            // x0 is feasible by construction; equality, upper and lower rows mixed.
            const double r = u(rng);
            if (r < 0.3) {
                lp.add_row({}, activity, activity, terms);
            } else if (r < 0.65) {
                lp.add_row({}, -kInfinity, activity + u(rng), terms);
            } else {
                lp.add_row({}, activity - u(rng), kInfinity, terms);
            }
        }
        const auto a = dense.solve(lp, {});
        const auto b = highs->solve(lp, {});
        REQUIRE(a.status == LpStatus::Optimal);
        REQUIRE(b.status == LpStatus::Optimal);
        CHECK(a.objective == doctest::Approx(b.objective).epsilon(1e-7));
        CHECK(validate_solution(a, lp).ok());
        CHECK(validate_solution(b, lp).ok());
    }
}

TEST_CASE("row duals are derivatives of the objective with respect to the row bound") {
    const auto lp = toy();
    const auto sol = DenseSimplexBackend{}.solve(lp, {});
    LinearProgram bumped;
    const int cap = bumped.add_column("cap", 10.0);
    const int g1 = bumped.add_column("g1", 5.0);
    const int g2 = bumped.add_column("g2", 5.0);
    bumped.add_row({RowClass::Balance, 0, 0}, 1.0, 1.0, {{g1, 1.0}});
    bumped.add_row({RowClass::Balance, 0, 1}, 2.001, 2.001, {{g2, 1.0}});
    bumped.add_row({RowClass::DispatchCap, 0, 0}, -kInfinity, 0.0, {{g1, 1.0}, {cap, -1.0}});
    bumped.add_row({RowClass::DispatchCap, 0, 1}, -kInfinity, 0.0, {{g2, 1.0}, {cap, -1.0}});
    const auto after = DenseSimplexBackend{}.solve(bumped, {});
    CHECK((after.objective - sol.objective) / 0.001 == doctest::Approx(sol.row_duals[1]).epsilon(1e-6));
}

TEST_CASE("validate_solution flags perturbed rows and bounds") {
    const auto lp = toy();
    auto sol = DenseSimplexBackend{}.solve(lp, {});
    REQUIRE(validate_solution(sol, lp).violations.empty());
    sol.column_values[1] += 1.0;  // g1
    const auto report = validate_solution(sol, lp);
    std::vector<std::size_t> balance;
    for (const auto& v : report.violations) {
        if (lp.row_label(v.row).cls == RowClass::Balance) balance.push_back(v.row);
    }
    REQUIRE(balance.size() == 1);
    CHECK(balance[0] == 0);
    CHECK_FALSE(report.ok());

    auto negative = DenseSimplexBackend{}.solve(lp, {});
    negative.column_values[0] = -1.0;
    CHECK_FALSE(validate_solution(negative, lp).bound_violations.empty());
}

TEST_CASE("LP text export names rows and columns") {
    const auto lp = toy();
    std::ostringstream out;
    lp.write_lp_format(out);
    const auto text = out.str();
    CHECK(text.find("Minimize") != std::string::npos);
    CHECK(text.find("cap") != std::string::npos);
    CHECK(text.find("Subject To") != std::string::npos);
    CHECK(text.find("End") != std::string::npos);
}

TEST_CASE("backend factory") {
    CHECK(make_backend("dense")->name() == "dense");
    CHECK_THROWS_AS(make_backend("cplex"), ValidationError);
}
