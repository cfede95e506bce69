#pragma once

#include "qmh/behaviour.hpp"
#include "qmh/verdict.hpp"

#include <functional>

namespace qmh {

using BehaviourFamily = std::function<Behaviour(double)>;
// effort 0 is the default budget; each level multiplies the solver budget
using ConditionSolver = std::function<Verdict(const Behaviour&, int effort)>;

struct BisectOptions {
  double tol = 1e-3; // target bracket width in the family parameter
  int max_effort = 2;
};

struct BisectResult {
  bool ok = false;      // endpoints bracketed and the loop ran to width <= tol
  double lo = 0.0;      // largest parameter decided feasible
  double hi = 1.0;      // smallest parameter decided infeasible
  Verdict at_lo, at_hi; // verdicts at the final bracket endpoints
  int solves = 0;
  std::string note;
  double lambda_star() const { return 0.5 * (lo + hi); }
};

// Feasibility along a one-parameter family is monotone (each membership set
// is convex and the family is affine), so the boundary is found by
// bisection. UNDECIDED mid-points trigger effort escalation, then nearby
// probes; if a strip stays undecided the bracket is returned wider than tol
// with a note.
BisectResult bisect_boundary(const BehaviourFamily& family, const ConditionSolver& solve,
                             double lo, double hi, const BisectOptions& opts = {});

} // namespace qmh
