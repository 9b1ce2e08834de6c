#pragma once

#include <cstddef>
#include <vector>

namespace econcast::lp {

/// max c.x  subject to  A x <= b, x >= 0, with every b_i >= 0 so the slack
/// basis is feasible and no phase-1 is needed. That covers every program in
/// this project.
struct Problem {
    std::size_t num_vars = 0;
    std::vector<double> objective;           // size num_vars
    std::vector<std::vector<double>> rows;   // each size num_vars
    std::vector<double> rhs;                 // size rows.size(), all >= 0

    void add_row(std::vector<double> row, double bound);
};

struct Solution {
    std::vector<double> x;
    double value = 0.0;
    /// |primal - dual| / max(1, |primal|) at the optimal basis.
    double duality_gap = 0.0;
};

/// Dense primal simplex, Bland's rule (lowest-index entering variable,
/// lowest-index leaving on ratio ties). Deterministic.
Solution maximize(const Problem& problem);

/// Two-phase lexicographic solve: maximize `problem.objective` first, then
/// `secondary` over the optimal face (pivots restricted to columns with zero
/// reduced cost for the primary objective). The reported value and duality
/// gap refer to the primary objective.
Solution maximize_lexicographic(const Problem& problem, const std::vector<double>& secondary);

}  // namespace econcast::lp
