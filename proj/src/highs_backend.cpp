#include "highs_backend.hpp"

#include "Highs.h"

#include <algorithm>
#include <cmath>
#include <memory>

namespace prosumage {

namespace {

class HighsBackend final : public LpBackend {
public:
    explicit HighsBackend(HighsMethod method) : method_(method) {}

    std::string_view name() const override {
        switch (method_) {
            case HighsMethod::InteriorPoint: return "highs-ipm";
            case HighsMethod::InteriorPointCrossover: return "highs-ipx";
            default: return "highs";
        }
    }

    LpSolution solve(const LinearProgram& lp, const SolverOptions& options) const override {
        HighsLp model;
        model.num_col_ = static_cast<HighsInt>(lp.num_columns());
        model.num_row_ = static_cast<HighsInt>(lp.num_rows());
        model.sense_ = ObjSense::kMinimize;
        model.col_cost_.assign(lp.cost().begin(), lp.cost().end());
        model.col_lower_.assign(lp.column_lower().begin(), lp.column_lower().end());
        model.col_upper_.assign(lp.column_upper().begin(), lp.column_upper().end());
        model.row_lower_.assign(lp.row_lower().begin(), lp.row_lower().end());
        model.row_upper_.assign(lp.row_upper().begin(), lp.row_upper().end());
        for (auto* bounds : {&model.col_lower_, &model.col_upper_, &model.row_lower_, &model.row_upper_}) {
            for (double& v : *bounds) {
                if (std::isinf(v)) v = v > 0 ? kHighsInf : -kHighsInf;
            }
        }
        auto& a = model.a_matrix_;
        a.format_ = MatrixFormat::kRowwise;
        a.num_col_ = model.num_col_;
        a.num_row_ = model.num_row_;
        a.start_.assign(lp.row_start().begin(), lp.row_start().end());
        a.index_.assign(lp.row_columns().begin(), lp.row_columns().end());
        a.value_.assign(lp.row_values().begin(), lp.row_values().end());

        Highs highs;
        highs.setOptionValue("output_flag", options.verbose);
        highs.setOptionValue("threads", 1);
        highs.setOptionValue("random_seed", 0);
        highs.setOptionValue("primal_feasibility_tolerance", options.tolerance);
        highs.setOptionValue("dual_feasibility_tolerance", options.tolerance);
        if (std::isfinite(options.time_limit_seconds)) highs.setOptionValue("time_limit", options.time_limit_seconds);
        if (method_ != HighsMethod::DualSimplex) {
            // Without crossover the gap is whatever the IPM tolerance allows;
            // crossover ends on a vertex with simplex-quality duals.
            const bool crossover = method_ == HighsMethod::InteriorPointCrossover;
            highs.setOptionValue("solver", "ipm");
            highs.setOptionValue("run_crossover", crossover ? "on" : "off");
            highs.setOptionValue("ipm_optimality_tolerance", crossover ? std::max(options.tolerance, 1e-10)
                                                                       : options.tolerance);
        } else {
            highs.setOptionValue("solver", "simplex");
        }

        LpSolution out;
        if (highs.passModel(std::move(model)) == HighsStatus::kError) {
            out.status = LpStatus::Error;
            out.message = "HiGHS rejected the model";
            return out;
        }
        const HighsStatus run = highs.run();
        const HighsModelStatus status = highs.getModelStatus();
        switch (status) {
            case HighsModelStatus::kOptimal: out.status = LpStatus::Optimal; break;
            case HighsModelStatus::kInfeasible: out.status = LpStatus::Infeasible; break;
            case HighsModelStatus::kUnbounded:
            case HighsModelStatus::kUnboundedOrInfeasible: out.status = LpStatus::Unbounded; break;
            case HighsModelStatus::kIterationLimit:
            case HighsModelStatus::kTimeLimit: out.status = LpStatus::IterationLimit; break;
            default: out.status = LpStatus::Error; break;
        }
        out.message = highs.modelStatusToString(status);
        if (run == HighsStatus::kError && out.status == LpStatus::Optimal) out.status = LpStatus::Error;
        if (out.status != LpStatus::Optimal) return out;

        const auto& solution = highs.getSolution();
        out.column_values = solution.col_value;
        out.row_duals = solution.row_dual;
        if (out.row_duals.size() != lp.num_rows()) out.row_duals.assign(lp.num_rows(), 0.0);
        out.objective = lp.objective(out.column_values);
        return out;
    }

private:
    HighsMethod method_;
};

}  // namespace

std::unique_ptr<LpBackend> make_highs_backend(HighsMethod method) {
    return std::make_unique<HighsBackend>(method);
}

}  // namespace prosumage
