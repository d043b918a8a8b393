#pragma once

#include <optional>
#include <string>
#include <vector>

namespace chaincalc {

// One inequality sum_j coef_j * x_{idx_j} >= rhs.
struct SparseRow {
    std::vector<std::pair<int, double>> terms;
    double rhs = 0.0;
};

// minimize sum_i weight_i * x_i^p  over x >= 0 subject to the rows.
// weight_i >= 0 and p >= 1; p = 1 is solved as a linear program with a
// certified dual bound, p > 1 as a smooth convex program.
struct ConvexProgram {
    int nvars = 0;
    std::vector<double> weight;
    double p = 1.0;
    std::vector<SparseRow> rows;
};

struct SolveOptions {
    double feas_tol = 1e-9;
    double kkt_tol = 1e-7;
    double gap_tol = 1e-9; // p = 1 relative objective gap vs the dual bound
    int max_iterations = 200;
    std::optional<std::vector<double>> start; // interior warm start (clipped)
};

struct SolveReport {
    std::string status;          // optimal | infeasible_detected | tolerance_reached
    double objective_energy = 0; // sum w x^p at the solution
    double objective_norm = 0;   // energy^(1/p)
    std::vector<double> solution;
    double max_violation = 0;    // worst constraint shortfall at the solution
    double dual_bound = 0;       // certified lower bound (p=1, nonneg data); NaN else
    double duality_gap = 0;      // energy - dual_bound when available; NaN else
    double kkt_residual = 0;     // max of feasibility, gradient and complementarity residuals
    int iterations = 0;
};

// Deterministic given identical inputs. Throws Error("SolverStall", ...) when
// the iteration budget runs out before even relaxed tolerances hold.
SolveReport solve_separable(const ConvexProgram& prog, const SolveOptions& opts = {});

} // namespace chaincalc
