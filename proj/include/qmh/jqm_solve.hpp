#pragma once

#include "qmh/conditions.hpp"
#include "qmh/lp.hpp"
#include "qmh/verdict.hpp"

namespace qmh {

struct JqmOptions {
  double tol = 1e-9;
  int cut_budget = 5000;
  double time_budget_s = 600.0;
  SeparationOptions separation;
  LpOptions lp;
};

// Decides existence of a joint quantum measure by cutting planes: the
// equality system plus a growing family of subset-positivity cuts, solved
// through an exact reduction onto the span of the constraint functionals.
// FEASIBLE is conclusive only when the separation oracle is exhaustive.
// INFEASIBLE is certified by verified multipliers. The witness (and the
// cuts, as atom lists) are reported on the verdict.
struct JqmResult {
  Verdict verdict;
  std::vector<OutcomeSet> cuts; // subsets whose positivity was enforced
};

JqmResult jqm_solve(const ConeProgram& p, const JqmOptions& opts = {});

} // namespace qmh
