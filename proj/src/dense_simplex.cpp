#include "prosumage/errors.hpp"
#include "prosumage/lp.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

namespace prosumage {

namespace {

// Standard form built from a LinearProgram:
//   min c'z  s.t.  M z = b,  z >= 0,  b >= 0
// z = [structurals | slacks]. Column j maps to x_j = offset + sign * z_pos - z_neg:
// shifted when its lower bound is finite, mirrored when only its upper bound
// is, split in two when free. Each standard row remembers which original row
// (or column bound) it came from and whether it was negated.
struct ColumnMap {
    std::size_t pos = 0;
    double sign = 1.0;
    double offset = 0.0;
    std::optional<std::size_t> neg;
};

struct StandardForm {
    std::size_t structurals = 0;
    std::size_t slacks = 0;
    std::vector<ColumnMap> columns;
    std::vector<std::vector<std::pair<std::size_t, double>>> rows;  // sparse, over z
    std::vector<double> rhs;
    std::vector<double> cost;  // over z
    std::vector<int> origin_row;  // original row index, -1 for column upper bounds
    std::vector<double> sign;     // +1, or -1 when the row was negated to make rhs >= 0
};

StandardForm to_standard_form(const LinearProgram& lp) {
    StandardForm sf;
    const auto n = lp.num_columns();
    const auto lower = lp.column_lower();
    const auto upper = lp.column_upper();
    sf.columns.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        auto& m = sf.columns[j];
        m.pos = sf.structurals++;
        if (std::isfinite(lower[j])) {
            m.offset = lower[j];
        } else if (std::isfinite(upper[j])) {
            m.offset = upper[j];
            m.sign = -1.0;
        }
    }
    for (std::size_t j = 0; j < n; ++j) {
        if (!std::isfinite(lower[j]) && !std::isfinite(upper[j])) sf.columns[j].neg = sf.structurals++;
    }
    sf.cost.assign(sf.structurals, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        const auto& m = sf.columns[j];
        sf.cost[m.pos] = m.sign * lp.cost()[j];
        if (m.neg) sf.cost[*m.neg] = -lp.cost()[j];
    }

    auto add = [&](std::vector<std::pair<std::size_t, double>> row, double rhs, int origin, int slack_sign) {
        if (slack_sign != 0) {
            row.emplace_back(sf.structurals + sf.slacks, static_cast<double>(slack_sign));
            ++sf.slacks;
            sf.cost.push_back(0.0);
        }
        double s = 1.0;
        if (rhs < 0.0) {
            s = -1.0;
            rhs = -rhs;
            for (auto& [col, v] : row) v = -v;
        }
        sf.rows.push_back(std::move(row));
        sf.rhs.push_back(rhs);
        sf.origin_row.push_back(origin);
        sf.sign.push_back(s);
    };

    const auto start = lp.row_start();
    const auto cols = lp.row_columns();
    const auto vals = lp.row_values();
    for (std::size_t i = 0; i < lp.num_rows(); ++i) {
        std::vector<std::pair<std::size_t, double>> row;
        double shift = 0.0;
        for (std::size_t k = start[i]; k < start[i + 1]; ++k) {
            const auto& m = sf.columns[static_cast<std::size_t>(cols[k])];
            row.emplace_back(m.pos, m.sign * vals[k]);
            if (m.neg) row.emplace_back(*m.neg, -vals[k]);
            shift += vals[k] * m.offset;
        }
        const double lo = lp.row_lower()[i];
        const double hi = lp.row_upper()[i];
        if (lo == hi) {
            add(row, lo - shift, static_cast<int>(i), 0);
        } else {
            if (std::isfinite(lo)) add(row, lo - shift, static_cast<int>(i), -1);
            if (std::isfinite(hi)) add(row, hi - shift, static_cast<int>(i), +1);
        }
    }
    for (std::size_t j = 0; j < n; ++j) {
        if (std::isfinite(lower[j]) && std::isfinite(upper[j])) {
            add({{sf.columns[j].pos, 1.0}}, upper[j] - lower[j], -1, +1);
        }
    }
    return sf;
}

class Tableau {
public:
    Tableau(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_((rows + 1) * (cols + 1), 0.0) {}

    double& at(std::size_t i, std::size_t j) { return data_[i * (cols_ + 1) + j]; }
    double at(std::size_t i, std::size_t j) const { return data_[i * (cols_ + 1) + j]; }
    double& rhs(std::size_t i) { return at(i, cols_); }
    double* row(std::size_t i) { return &data_[i * (cols_ + 1)]; }
    std::size_t objective_row() const { return rows_; }

    void pivot(std::size_t r, std::size_t e) {
        double* pr = row(r);
        const double inv = 1.0 / pr[e];
        for (std::size_t j = 0; j <= cols_; ++j) pr[j] *= inv;
        pr[e] = 1.0;
        for (std::size_t i = 0; i <= rows_; ++i) {
            if (i == r) continue;
            double* pi = row(i);
            const double f = pi[e];
            if (f == 0.0) continue;
            for (std::size_t j = 0; j <= cols_; ++j) pi[j] -= f * pr[j];
            pi[e] = 0.0;
        }
    }

private:
    std::size_t rows_, cols_;
    std::vector<double> data_;
};

enum class PhaseResult { Optimal, Unbounded, IterationLimit };

class Simplex {
public:
    Simplex(const StandardForm& sf, double tolerance)
        : m_(sf.rows.size()),
          nz_(sf.structurals + sf.slacks),
          cols_(nz_ + m_),
          tab_(m_, cols_),
          basis_(m_),
          tol_(tolerance) {
        for (std::size_t i = 0; i < m_; ++i) {
            for (auto [c, v] : sf.rows[i]) tab_.at(i, c) += v;
            tab_.at(i, nz_ + i) = 1.0;  // artificial
            tab_.rhs(i) = sf.rhs[i];
            basis_[i] = nz_ + i;
        }
    }

    bool phase_one(std::size_t max_iter, PhaseResult& result) {
        const auto obj = tab_.objective_row();
        for (std::size_t j = 0; j <= cols_; ++j) tab_.at(obj, j) = 0.0;
        for (std::size_t i = 0; i < m_; ++i) {
            for (std::size_t j = 0; j < nz_; ++j) tab_.at(obj, j) -= tab_.at(i, j);
            tab_.rhs(obj) -= tab_.rhs(i);
        }
        double scale = 1.0;
        for (std::size_t i = 0; i < m_; ++i) scale = std::max(scale, tab_.rhs(i));
        result = iterate(max_iter, 1.0);
        if (result != PhaseResult::Optimal) return false;
        return -tab_.rhs(obj) <= tol_ * scale * 10.0;
    }

    void drive_out_artificials() {
        for (std::size_t i = 0; i < m_; ++i) {
            if (basis_[i] < nz_) continue;
            std::size_t best = cols_;
            double best_abs = 1e-9;
            for (std::size_t j = 0; j < nz_; ++j) {
                if (std::abs(tab_.at(i, j)) > best_abs) {
                    best_abs = std::abs(tab_.at(i, j));
                    best = j;
                }
            }
            if (best < cols_) {
                tab_.pivot(i, best);
                basis_[i] = best;
            }
        }
    }

    PhaseResult phase_two(const std::vector<double>& cost, std::size_t max_iter) {
        const auto obj = tab_.objective_row();
        double scale = 1.0;
        for (std::size_t j = 0; j < nz_; ++j) {
            tab_.at(obj, j) = cost[j];
            scale = std::max(scale, std::abs(cost[j]));
        }
        for (std::size_t j = nz_; j <= cols_; ++j) tab_.at(obj, j) = 0.0;
        for (std::size_t i = 0; i < m_; ++i) {
            const double cb = basis_[i] < nz_ ? cost[basis_[i]] : 0.0;
            if (cb == 0.0) continue;
            for (std::size_t j = 0; j <= cols_; ++j) tab_.at(obj, j) -= cb * tab_.at(i, j);
        }
        return iterate(max_iter, scale);
    }

    std::vector<double> primal() const {
        std::vector<double> z(nz_, 0.0);
        for (std::size_t i = 0; i < m_; ++i) {
            if (basis_[i] < nz_) z[basis_[i]] = std::max(0.0, tab_.at(i, cols_));
        }
        return z;
    }

    // y' = c_B' B^{-1}; the artificial block of the tableau holds B^{-1}.
    std::vector<double> duals(const std::vector<double>& cost) const {
        std::vector<double> y(m_, 0.0);
        for (std::size_t i = 0; i < m_; ++i) {
            const double cb = basis_[i] < nz_ ? cost[basis_[i]] : 0.0;
            if (cb == 0.0) continue;
            for (std::size_t k = 0; k < m_; ++k) y[k] += cb * tab_.at(i, nz_ + k);
        }
        return y;
    }

private:
    // Dantzig pricing; Bland's rule after a run of degenerate pivots.
    PhaseResult iterate(std::size_t max_iter, double cost_scale) {
        const auto obj = tab_.objective_row();
        const double opt_tol = tol_ * cost_scale;
        const double pivot_tol = 1e-11;
        std::size_t degenerate_run = 0;
        for (std::size_t iter = 0; iter < max_iter; ++iter) {
            const bool bland = degenerate_run > 50;
            std::size_t enter = cols_;
            double best = -opt_tol;
            for (std::size_t j = 0; j < nz_; ++j) {
                const double d = tab_.at(obj, j);
                if (d < best) {
                    enter = j;
                    if (bland) break;
                    best = d;
                }
            }
            if (enter == cols_) return PhaseResult::Optimal;

            std::size_t leave = m_;
            double ratio = 0.0;
            for (std::size_t i = 0; i < m_; ++i) {
                const double a = tab_.at(i, enter);
                if (a <= pivot_tol) continue;
                const double r = std::max(0.0, tab_.rhs(i)) / a;
                if (leave == m_ || r < ratio - 1e-12 ||
                    (std::abs(r - ratio) <= 1e-12 &&
                     (bland ? basis_[i] < basis_[leave] : a > tab_.at(leave, enter)))) {
                    leave = i;
                    ratio = r;
                }
            }
            if (leave == m_) return PhaseResult::Unbounded;
            degenerate_run = ratio <= 1e-12 ? degenerate_run + 1 : 0;
            tab_.pivot(leave, enter);
            basis_[leave] = enter;
        }
        return PhaseResult::IterationLimit;
    }

    std::size_t m_, nz_, cols_;
    Tableau tab_;
    std::vector<std::size_t> basis_;
    double tol_;
};

}  // namespace

LpSolution DenseSimplexBackend::solve(const LinearProgram& lp, const SolverOptions& options) const {
    LpSolution out;
    const auto sf = to_standard_form(lp);
    const std::size_t m = sf.rows.size();
    const std::size_t nz = sf.structurals + sf.slacks;
    if ((m + 1) * (nz + m + 1) > max_cells_) {
        out.status = LpStatus::Error;
        out.message = "problem too large for the dense backend (" + std::to_string(m) + " rows, " +
                      std::to_string(nz) + " columns)";
        return out;
    }

    Simplex simplex(sf, options.tolerance);
    const std::size_t max_iter = 50 * (m + nz) + 1000;
    PhaseResult phase{};
    if (!simplex.phase_one(max_iter, phase)) {
        out.status = phase == PhaseResult::IterationLimit ? LpStatus::IterationLimit : LpStatus::Infeasible;
        out.message = "phase one: no feasible point";
        return out;
    }
    simplex.drive_out_artificials();
    phase = simplex.phase_two(sf.cost, max_iter);
    if (phase == PhaseResult::Unbounded) {
        out.status = LpStatus::Unbounded;
        out.message = "objective unbounded below";
        return out;
    }
    if (phase == PhaseResult::IterationLimit) {
        out.status = LpStatus::IterationLimit;
        out.message = "iteration limit";
        return out;
    }

    const auto z = simplex.primal();
    out.column_values.resize(lp.num_columns());
    for (std::size_t j = 0; j < lp.num_columns(); ++j) {
        const auto& c = sf.columns[j];
        out.column_values[j] = c.offset + c.sign * z[c.pos] - (c.neg ? z[*c.neg] : 0.0);
    }

    const auto y = simplex.duals(sf.cost);
    out.row_duals.assign(lp.num_rows(), 0.0);
    for (std::size_t k = 0; k < m; ++k) {
        if (sf.origin_row[k] < 0) continue;
        out.row_duals[static_cast<std::size_t>(sf.origin_row[k])] += sf.sign[k] * y[k];
    }
    out.objective = lp.objective(out.column_values);
    out.status = LpStatus::Optimal;
    return out;
}

}  // namespace prosumage
