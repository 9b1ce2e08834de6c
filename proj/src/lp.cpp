#include "econcast/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace econcast::lp {

void Problem::add_row(std::vector<double> row, double bound) {
    if (row.size() != num_vars) throw std::invalid_argument("lp row width mismatch");
    rows.push_back(std::move(row));
    rhs.push_back(bound);
}

namespace {

constexpr double kReducedCostTol = 1e-11;
constexpr double kPivotTol = 1e-11;

// Tableau layout: m rows of [structural | slack | rhs], plus one objective
// row per tracked objective (negated-cost convention, rhs entry holds z).
class Tableau {
  public:
    Tableau(const Problem& p, const std::vector<double>* secondary) : scale_(p.rows.size(), 1.0) {
        m_ = p.rows.size();
        n_ = p.num_vars;
        width_ = n_ + m_ + 1;
        // Row equilibration keeps pivot tolerances meaningful when
        // coefficients span many orders of magnitude (powers in watts).
        for (std::size_t i = 0; i < m_; ++i) {
            if (p.rhs[i] < 0) throw std::invalid_argument("lp rhs must be nonnegative");
            double mx = 0.0;
            for (double v : p.rows[i]) mx = std::max(mx, std::fabs(v));
            if (mx > 0) scale_[i] = 1.0 / mx;
        }
        rows_.assign(m_, std::vector<double>(width_, 0.0));
        basis_.resize(m_);
        for (std::size_t i = 0; i < m_; ++i) {
            for (std::size_t j = 0; j < n_; ++j) rows_[i][j] = p.rows[i][j] * scale_[i];
            rows_[i][n_ + i] = 1.0;
            rows_[i][width_ - 1] = p.rhs[i] * scale_[i];
            basis_[i] = n_ + i;
        }
        obj_.assign(secondary ? 2 : 1, std::vector<double>(width_, 0.0));
        for (std::size_t j = 0; j < n_; ++j) {
            obj_[0][j] = -p.objective[j];
            if (secondary) obj_[1][j] = -(*secondary)[j];
        }
    }

    // Primal simplex on objective row `which`. With `guard`, entering columns
    // are restricted to zero reduced cost in objective row 0 so the primary
    // optimum is preserved exactly while the secondary improves.
    void run(std::size_t which, bool guard) {
        for (;;) {
            std::size_t enter = width_;
            for (std::size_t j = 0; j + 1 < width_; ++j) {
                if (obj_[which][j] < -kReducedCostTol &&
                    (!guard || std::fabs(obj_[0][j]) <= kReducedCostTol)) {
                    enter = j;
                    break;  // Bland: lowest index
                }
            }
            if (enter == width_) return;
            std::size_t leave = m_;
            double best_ratio = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < m_; ++i) {
                const double a = rows_[i][enter];
                if (a <= kPivotTol) continue;
                const double ratio = rows_[i][width_ - 1] / a;
                if (ratio < best_ratio ||
                    (ratio == best_ratio && (leave == m_ || basis_[i] < basis_[leave]))) {
                    best_ratio = ratio;
                    leave = i;
                }
            }
            if (leave == m_) throw std::runtime_error("lp unbounded");
            pivot(leave, enter);
        }
    }

    Solution extract(const Problem& p) const {
        Solution sol;
        sol.x.assign(n_, 0.0);
        for (std::size_t i = 0; i < m_; ++i) {
            if (basis_[i] < n_) sol.x[basis_[i]] = rows_[i][width_ - 1];
        }
        double primal = 0.0;
        for (std::size_t j = 0; j < n_; ++j) primal += p.objective[j] * sol.x[j];
        // Duals live in the slack columns of the primary objective row (in
        // equilibrated units); y_orig_i = y_scaled_i * scale_i.
        double dual = 0.0;
        for (std::size_t i = 0; i < m_; ++i) {
            dual += obj_[0][n_ + i] * scale_[i] * p.rhs[i];
        }
        sol.value = primal;
        sol.duality_gap = std::fabs(dual - primal) / std::max(1.0, std::fabs(primal));
        return sol;
    }

  private:
    void pivot(std::size_t r, std::size_t c) {
        auto& prow = rows_[r];
        const double inv = 1.0 / prow[c];
        for (double& v : prow) v *= inv;
        prow[c] = 1.0;
        for (std::size_t i = 0; i < m_; ++i) {
            if (i != r) eliminate(rows_[i], prow, c);
        }
        for (auto& orow : obj_) eliminate(orow, prow, c);
        basis_[r] = c;
    }

    static void eliminate(std::vector<double>& row, const std::vector<double>& prow,
                          std::size_t c) {
        const double f = row[c];
        if (f == 0.0) return;
        for (std::size_t j = 0; j < row.size(); ++j) row[j] -= f * prow[j];
        row[c] = 0.0;
    }

    std::size_t m_ = 0, n_ = 0, width_ = 0;
    std::vector<double> scale_;
    std::vector<std::vector<double>> rows_;
    std::vector<std::vector<double>> obj_;
    std::vector<std::size_t> basis_;
};

}  // namespace

Solution maximize(const Problem& problem) {
    Tableau t(problem, nullptr);
    t.run(0, false);
    return t.extract(problem);
}

Solution maximize_lexicographic(const Problem& problem, const std::vector<double>& secondary) {
    if (secondary.size() != problem.num_vars) {
        throw std::invalid_argument("secondary objective width mismatch");
    }
    Tableau t(problem, &secondary);
    t.run(0, false);
    t.run(1, true);
    return t.extract(problem);
}

}  // namespace econcast::lp
