#pragma once

#include <optional>
#include <string>
#include <vector>

namespace qmh {

enum class Status { Feasible, Infeasible, Undecided };

inline const char* status_name(Status s) {
  switch (s) {
    case Status::Feasible: return "FEASIBLE";
    case Status::Infeasible: return "INFEASIBLE";
    case Status::Undecided: return "UNDECIDED";
  }
  return "?";
}

struct Residuals {
  double max_equality = 0.0;   // witness: worst equality violation
  double min_eigenvalue = 0.0; // witness: smallest eigenvalue (PSD programs)
  double max_cut = 0.0;        // witness: worst lazy-inequality violation
};

// Infeasibility evidence, re-verified with independent arithmetic before a
// verdict is issued. For LP: Farkas multipliers y with y^T A <= 0, y^T b > 0.
// For PSD/JQM: multipliers whose functional combination N is PSD (or zero)
// while its fixed value on the affine set is negative.
struct Certificate {
  std::string type; // "farkas", "psd_separating", "inconsistent_equalities"
  std::vector<double> multipliers;
  double gap = 0.0;              // verified contradiction margin
  double support_residual = 0.0; // leftover from the cone-side verification
};

struct Verdict {
  Status status = Status::Undecided;
  bool conclusive = false;
  std::optional<std::vector<double>> witness; // x, or row-major matrix
  std::size_t witness_side = 0;               // >0 when the witness is square
  std::optional<Certificate> certificate;
  Residuals residuals;
  long iterations = 0;
  double wall_ms = 0.0;
  std::string detail;
};

} // namespace qmh
