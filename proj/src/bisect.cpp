#include "qmh/bisect.hpp"

#include <cmath>

namespace qmh {

namespace {

Verdict solve_escalating(const BehaviourFamily& family, const ConditionSolver& solve,
                         double lambda, int max_effort, int& solves) {
  Behaviour b = family(lambda);
  for (int effort = 0; effort <= max_effort; ++effort) {
    ++solves;
    Verdict v = solve(b, effort);
    if (v.status != Status::Undecided) return v;
    if (effort == max_effort) return v;
  }
  return {};
}

} // namespace

BisectResult bisect_boundary(const BehaviourFamily& family, const ConditionSolver& solve,
                             double lo, double hi, const BisectOptions& opts) {
  BisectResult r;
  r.lo = lo;
  r.hi = hi;

  Verdict vlo = solve_escalating(family, solve, lo, opts.max_effort, r.solves);
  if (vlo.status != Status::Feasible) {
    r.note = "lower endpoint not decided feasible";
    r.at_lo = std::move(vlo);
    return r;
  }
  Verdict vhi = solve_escalating(family, solve, hi, opts.max_effort, r.solves);
  if (vhi.status != Status::Infeasible) {
    r.note = "upper endpoint not decided infeasible";
    r.at_lo = std::move(vlo);
    r.at_hi = std::move(vhi);
    return r;
  }
  r.at_lo = std::move(vlo);
  r.at_hi = std::move(vhi);

  while (r.hi - r.lo > opts.tol) {
    double width = r.hi - r.lo;
    bool advanced = false;
    // mid first, then off-center probes if the midpoint stays undecided
    for (double frac : {0.5, 0.38, 0.62, 0.25, 0.75}) {
      double mid = r.lo + frac * width;
      Verdict v = solve_escalating(family, solve, mid, opts.max_effort, r.solves);
      if (v.status == Status::Feasible) {
        r.lo = mid;
        r.at_lo = std::move(v);
        advanced = true;
        break;
      }
      if (v.status == Status::Infeasible) {
        r.hi = mid;
        r.at_hi = std::move(v);
        advanced = true;
        break;
      }
    }
    if (!advanced) {
      r.note = "undecided strip inside the bracket; returning widened bracket";
      return r;
    }
  }
  r.ok = true;
  return r;
}

} // namespace qmh
