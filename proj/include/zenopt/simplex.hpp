#ifndef ZENOPT_SIMPLEX_HPP
#define ZENOPT_SIMPLEX_HPP

#include <vector>

namespace zenopt::lp {

// Internal LP form used by the simplex: n structural columns in CSC order,
// m equality rows closed by logical columns n..n+m-1 (coefficient -1, bounds
// equal to the row range). Costs on logicals are zero.
struct CoreLp {
    int m = 0;
    int n = 0;  // structural columns
    std::vector<int> col_start;  // size n+m+1
    std::vector<int> row_idx;
    std::vector<double> val;
    std::vector<double> lb, ub, cost;  // size n+m

    int total_cols() const { return n + m; }
};

enum class VarStatus : char { Basic, AtLower, AtUpper, FreeZero };

struct Basis {
    std::vector<int> basic;        // row -> column
    std::vector<VarStatus> vstat;  // column -> status
    bool valid() const { return !basic.empty(); }
};

enum class LpStatus { Optimal, Infeasible, Unbounded, IterLimit, Error };

struct SimplexOptions {
    long max_iterations = 2'000'000;
    double feas_tol = 1e-9;
    double opt_tol = 1e-9;
    double pivot_tol = 1e-8;
    int reinvert_every = 100;
};

struct LpResult {
    LpStatus status = LpStatus::Error;
    double objective = 0.0;
    std::vector<double> x;      // size n+m (logicals = row activities)
    std::vector<double> duals;  // row duals y with rc_j = c_j - y.A_j
    long iterations = 0;
    std::vector<int> infeasible_rows;  // rows still violated when Infeasible
};

// Two-phase bounded-variable revised simplex with a product-form inverse.
// `bounds_lb/ub` override the CoreLp defaults (branch&bound tightens them);
// pass empty spans to use the defaults. `warm` supplies and receives a basis.
LpResult simplex_solve(const CoreLp& core, const std::vector<double>& lb,
                       const std::vector<double>& ub, const SimplexOptions& opts,
                       Basis* warm = nullptr);

}  // namespace zenopt::lp

#endif
