#pragma once

#include "qmh/cone_program.hpp"
#include "qmh/verdict.hpp"

namespace qmh {

struct PsdOptions {
  double tol = 1e-7;        // equality residual target (normalized rows)
  long max_iters = 200000;
  long check_every = 512;   // cadence of infeasibility-certificate attempts
  double cert_gap = 1e-8;   // required separation of a verified certificate
  double cert_eig_slack = 1e-9;
  bool use_dykstra = true;
  const linalg::Matrix* warm_start = nullptr;
};

// PSD feasibility by alternating projections between the affine constraint
// set and the PSD cone (Dykstra correction on the cone side). FEASIBLE
// returns a PSD witness meeting every equality; INFEASIBLE returns verified
// separating multipliers; otherwise UNDECIDED.
Verdict psd_solve(const ConeProgram& p, const PsdOptions& opts = {});

} // namespace qmh
