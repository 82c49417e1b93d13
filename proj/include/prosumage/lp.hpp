#pragma once

#include <cstddef>
#include <limits>
#include <memory>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace prosumage {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

enum class RowClass {
    Balance,
    DispatchCap,
    RenewableCap,
    StorageLevel,
    StorageEnergyCap,
    StorageChargeCap,
    StorageDischargeCap,
    ResShare,
    Other,
};

std::string_view to_string(RowClass cls);

struct RowLabel {
    RowClass cls = RowClass::Other;
    int tech = -1;  // index into the scenario catalog, -1 if not technology specific
    int hour = -1;  // -1 for annual rows
};

struct Term {
    int column;
    double coefficient;
};

/// min c'x  s.t.  row_lower <= A x <= row_upper,  col_lower <= x <= col_upper.
/// Rows are stored compressed (CSR).
class LinearProgram {
public:
    int add_column(std::string name, double cost, double lower = 0.0, double upper = kInfinity);
    int add_row(RowLabel label, double lower, double upper, std::span<const Term> terms);
    int add_row(RowLabel label, double lower, double upper, std::initializer_list<Term> terms) {
        return add_row(label, lower, upper, std::span<const Term>(terms.begin(), terms.size()));
    }

    std::size_t num_columns() const { return cost_.size(); }
    std::size_t num_rows() const { return row_lower_.size(); }
    std::size_t num_nonzeros() const { return values_.size(); }

    std::span<const double> cost() const { return cost_; }
    std::span<const double> column_lower() const { return col_lower_; }
    std::span<const double> column_upper() const { return col_upper_; }
    std::span<const double> row_lower() const { return row_lower_; }
    std::span<const double> row_upper() const { return row_upper_; }
    const std::string& column_name(std::size_t j) const { return col_names_[j]; }
    const RowLabel& row_label(std::size_t i) const { return labels_[i]; }
    std::string row_name(std::size_t i) const;

    // CSR access
    std::span<const std::size_t> row_start() const { return row_start_; }
    std::span<const int> row_columns() const { return columns_; }
    std::span<const double> row_values() const { return values_; }

    void set_cost(int column, double cost) { cost_[static_cast<std::size_t>(column)] = cost; }
    void set_column_bounds(int column, double lower, double upper);

    double objective(std::span<const double> x) const;
    /// A x for every row.
    std::vector<double> row_activity(std::span<const double> x) const;
    /// c - A' y.
    std::vector<double> reduced_costs(std::span<const double> row_duals) const;

    /// CPLEX-LP text for cross-checking with external solvers.
    void write_lp_format(std::ostream& out) const;

private:
    std::vector<double> cost_, col_lower_, col_upper_;
    std::vector<std::string> col_names_;
    std::vector<double> row_lower_, row_upper_;
    std::vector<RowLabel> labels_;
    std::vector<std::size_t> row_start_{0};
    std::vector<int> columns_;
    std::vector<double> values_;
};

enum class LpStatus { Optimal, Infeasible, Unbounded, IterationLimit, Error };

std::string_view to_string(LpStatus status);

struct LpSolution {
    LpStatus status = LpStatus::Error;
    std::vector<double> column_values;
    /// d objective / d row bound, sign convention of a minimisation.
    std::vector<double> row_duals;
    double objective = 0.0;
    std::string message;
};

struct SolverOptions {
    /// Primal and dual feasibility tolerance handed to the backend.
    double tolerance = 1e-9;
    bool verbose = false;
    double time_limit_seconds = kInfinity;
};

/// Any solver able to return primal values, row duals and a status.
class LpBackend {
public:
    virtual ~LpBackend() = default;
    virtual std::string_view name() const = 0;
    virtual LpSolution solve(const LinearProgram& lp, const SolverOptions& options) const = 0;
};

/// Two-phase tableau simplex on dense storage. Meant for test-sized problems
/// (a few thousand columns at most).
class DenseSimplexBackend final : public LpBackend {
public:
    explicit DenseSimplexBackend(std::size_t max_cells = 60'000'000) : max_cells_(max_cells) {}
    std::string_view name() const override { return "dense"; }
    LpSolution solve(const LinearProgram& lp, const SolverOptions& options) const override;

private:
    std::size_t max_cells_;
};

/// Names: "dense", "highs" (dual simplex), "highs-ipm" (interior point, no
/// crossover; its duality gap follows the tolerance), "highs-ipx" (interior
/// point then crossover, usually fastest on full years). Throws ValidationError
/// for unknown or unavailable backends.
std::unique_ptr<LpBackend> make_backend(std::string_view name);
std::vector<std::string> available_backends();

}  // namespace prosumage
