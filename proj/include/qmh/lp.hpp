#pragma once

#include "qmh/cone_program.hpp"
#include "qmh/verdict.hpp"

#include <vector>

namespace qmh {

struct LpOptions {
  double tol = 1e-9;
  long max_iters = 200000;
};

enum class LpStatus { Optimal, Infeasible, Unbounded, IterLimit };

struct LpSolution {
  LpStatus status = LpStatus::IterLimit;
  std::vector<double> x;
  double objective = 0.0;
  std::vector<double> duals;  // simplex multipliers at optimality
  std::vector<double> farkas; // infeasibility multipliers (y^T A <= 0, y^T b > 0)
  long iterations = 0;
};

// Dense-tableau primal simplex for min c^T x s.t. A x = b, x >= 0.
// Dantzig pricing with a Bland fallback on stalls.
LpSolution simplex_solve(std::size_t rows, std::size_t cols, std::vector<double> a,
                         std::vector<double> b, std::vector<double> c,
                         const LpOptions& opts = {});

// Feasibility of a Nonneg cone program, with witness / Farkas verification.
Verdict lp_feasibility(const ConeProgram& p, const LpOptions& opts = {});

// Optimum of `objective` over a Nonneg program (maximize or minimize).
struct LpOptimum {
  Verdict verdict;
  double value = 0.0;
};
LpOptimum lp_optimize(const ConeProgram& p, const std::vector<double>& objective, bool maximize,
                      const LpOptions& opts = {});

} // namespace qmh
