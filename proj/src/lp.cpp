#include "prosumage/lp.hpp"

#include "prosumage/csv.hpp"
#include "prosumage/errors.hpp"

#include <cmath>

#ifdef PROSUMAGE_HAVE_HIGHS
#include "highs_backend.hpp"
#endif

namespace prosumage {

std::string_view to_string(RowClass cls) {
    switch (cls) {
        case RowClass::Balance: return "balance";
        case RowClass::DispatchCap: return "dispatch_cap";
        case RowClass::RenewableCap: return "renewable_cap";
        case RowClass::StorageLevel: return "storage_level";
        case RowClass::StorageEnergyCap: return "storage_energy_cap";
        case RowClass::StorageChargeCap: return "storage_charge_cap";
        case RowClass::StorageDischargeCap: return "storage_discharge_cap";
        case RowClass::ResShare: return "res_share";
        case RowClass::Other: return "row";
    }
    return "row";
}

std::string_view to_string(LpStatus status) {
    switch (status) {
        case LpStatus::Optimal: return "optimal";
        case LpStatus::Infeasible: return "infeasible";
        case LpStatus::Unbounded: return "unbounded";
        case LpStatus::IterationLimit: return "iteration_limit";
        case LpStatus::Error: return "error";
    }
    return "error";
}

int LinearProgram::add_column(std::string name, double cost, double lower, double upper) {
    if (lower > upper) throw ContractViolation("column '" + name + "' has lower bound above upper bound");
    cost_.push_back(cost);
    col_lower_.push_back(lower);
    col_upper_.push_back(upper);
    col_names_.push_back(std::move(name));
    return static_cast<int>(cost_.size() - 1);
}

int LinearProgram::add_row(RowLabel label, double lower, double upper, std::span<const Term> terms) {
    if (lower > upper) throw ContractViolation("row lower bound above upper bound");
    for (const auto& t : terms) {
        if (t.column < 0 || static_cast<std::size_t>(t.column) >= cost_.size()) {
            throw ContractViolation("row references unknown column " + std::to_string(t.column));
        }
        if (t.coefficient == 0.0) continue;
        columns_.push_back(t.column);
        values_.push_back(t.coefficient);
    }
    row_start_.push_back(values_.size());
    row_lower_.push_back(lower);
    row_upper_.push_back(upper);
    labels_.push_back(label);
    return static_cast<int>(row_lower_.size() - 1);
}

void LinearProgram::set_column_bounds(int column, double lower, double upper) {
    if (lower > upper) throw ContractViolation("column lower bound above upper bound");
    col_lower_[static_cast<std::size_t>(column)] = lower;
    col_upper_[static_cast<std::size_t>(column)] = upper;
}

std::string LinearProgram::row_name(std::size_t i) const {
    const auto& l = labels_[i];
    std::string name(to_string(l.cls));
    if (l.tech >= 0) name += "_t" + std::to_string(l.tech);
    if (l.hour >= 0) name += "_h" + std::to_string(l.hour);
    if (l.cls == RowClass::Other) name += std::to_string(i);
    return name;
}

double LinearProgram::objective(std::span<const double> x) const {
    double sum = 0.0;
    for (std::size_t j = 0; j < cost_.size(); ++j) sum += cost_[j] * x[j];
    return sum;
}

std::vector<double> LinearProgram::row_activity(std::span<const double> x) const {
    std::vector<double> activity(num_rows(), 0.0);
    for (std::size_t i = 0; i < num_rows(); ++i) {
        double sum = 0.0;
        for (std::size_t k = row_start_[i]; k < row_start_[i + 1]; ++k) {
            sum += values_[k] * x[static_cast<std::size_t>(columns_[k])];
        }
        activity[i] = sum;
    }
    return activity;
}

std::vector<double> LinearProgram::reduced_costs(std::span<const double> row_duals) const {
    std::vector<double> d(cost_.begin(), cost_.end());
    for (std::size_t i = 0; i < num_rows(); ++i) {
        const double y = row_duals[i];
        if (y == 0.0) continue;
        for (std::size_t k = row_start_[i]; k < row_start_[i + 1]; ++k) {
            d[static_cast<std::size_t>(columns_[k])] -= values_[k] * y;
        }
    }
    return d;
}

void LinearProgram::write_lp_format(std::ostream& out) const {
    auto number = [](double v) { return csv::format_double(v); };
    auto write_expr = [&](std::size_t i) {
        bool first = true;
        for (std::size_t k = row_start_[i]; k < row_start_[i + 1]; ++k) {
            const double a = values_[k];
            out << (a < 0 ? (first ? "-" : " - ") : (first ? "" : " + "));
            if (std::abs(a) != 1.0) out << number(std::abs(a)) << ' ';
            out << col_names_[static_cast<std::size_t>(columns_[k])];
            first = false;
        }
        if (first) out << "0 " << col_names_.front();
    };

    out << "\\ prosumage sector model\nMinimize\n obj:";
    bool any = false;
    for (std::size_t j = 0; j < cost_.size(); ++j) {
        if (cost_[j] == 0.0) continue;
        out << (cost_[j] < 0 ? " - " : (any ? " + " : " ")) << number(std::abs(cost_[j])) << ' ' << col_names_[j];
        any = true;
    }
    if (!any && !col_names_.empty()) out << " 0 " << col_names_.front();
    out << "\nSubject To\n";
    for (std::size_t i = 0; i < num_rows(); ++i) {
        const double lo = row_lower_[i];
        const double hi = row_upper_[i];
        const auto name = row_name(i);
        if (lo == hi) {
            out << ' ' << name << ": ";
            write_expr(i);
            out << " = " << number(lo) << '\n';
            continue;
        }
        if (std::isfinite(lo)) {
            out << ' ' << name << (std::isfinite(hi) ? "_lo" : "") << ": ";
            write_expr(i);
            out << " >= " << number(lo) << '\n';
        }
        if (std::isfinite(hi)) {
            out << ' ' << name << (std::isfinite(lo) ? "_hi" : "") << ": ";
            write_expr(i);
            out << " <= " << number(hi) << '\n';
        }
    }
    out << "Bounds\n";
    for (std::size_t j = 0; j < cost_.size(); ++j) {
        const double lo = col_lower_[j];
        const double hi = col_upper_[j];
        if (lo == 0.0 && !std::isfinite(hi)) continue;
        out << ' ';
        if (!std::isfinite(lo) && !std::isfinite(hi)) {
            out << col_names_[j] << " free\n";
            continue;
        }
        out << (std::isfinite(lo) ? number(lo) : "-inf") << " <= " << col_names_[j];
        if (std::isfinite(hi)) out << " <= " << number(hi);
        out << '\n';
    }
    out << "End\n";
}

std::unique_ptr<LpBackend> make_backend(std::string_view name) {
    if (name == "dense") return std::make_unique<DenseSimplexBackend>();
#ifdef PROSUMAGE_HAVE_HIGHS
    if (name == "highs") return make_highs_backend(HighsMethod::DualSimplex);
    if (name == "highs-ipm") return make_highs_backend(HighsMethod::InteriorPoint);
    if (name == "highs-ipx") return make_highs_backend(HighsMethod::InteriorPointCrossover);
#endif
    throw ValidationError("unknown or unavailable LP backend '" + std::string(name) + "'");
}

std::vector<std::string> available_backends() {
#ifdef PROSUMAGE_HAVE_HIGHS
    return {"dense", "highs", "highs-ipm", "highs-ipx"};
#else
    return {"dense"};
#endif
}

}  // namespace prosumage
