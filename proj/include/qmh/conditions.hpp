#pragma once

#include "qmh/behaviour.hpp"
#include "qmh/cone_program.hpp"

#include <cstdint>
#include <optional>

namespace qmh {

// ---- membership-condition compilers ----------------------------------------
//
// Each compiler turns one membership condition into a feasibility program:
//   jpm     joint probability measure          (LP over atom masses)
//   jqm     joint quantum measure              (free decoherence entries +
//                                               lazy subset positivity)
//   spjqm   strongly positive joint q. measure (PSD atom Gram)
//   spjqmb  spjqm over all branching algebras  (extra orthogonality rows)
//   q1      NPA level 1                        (PSD Gram over basic outcomes)
//   q1ab    NPA level 1+AB                     (PSD Gram over joint outcomes)

ConeProgram compile_jpm(const Behaviour& b);
ConeProgram compile_jqm(const Behaviour& b);
ConeProgram compile_spjqm(const Behaviour& b);

// Fast mode derives the branching constraints from the orthogonal-pair
// characterization; validation mode enumerates all branching measurements
// and must produce an equivalent program.
ConeProgram compile_spjqmb(const Behaviour& b, bool validation_mode = false,
                           std::size_t recipe_budget = kDefaultRecipeBudget);

// Gram programs over outcome labels; index_sets names the matrix rows
// (xi_index is the row of the full set Xi).
struct OutcomeIndexedProgram {
  ConeProgram prog;
  std::vector<OutcomeSet> index_sets;
  std::size_t xi_index = 0;
};

OutcomeIndexedProgram compile_q1(const Behaviour& b);
OutcomeIndexedProgram compile_q1ab(const Behaviour& b);

// ---- JQM separation oracle --------------------------------------------------

struct SeparationOptions {
  int exact_limit = 20;   // exhaustive enumeration up to this many atoms
  std::uint64_t seed = 1;
  int restarts = 64;      // local-search starts in the heuristic regime
  double violation_tol = 1e-10;
  int max_results = 8;
};

struct SeparationResult {
  bool exact = false;                 // conclusive when no subset returned
  std::vector<OutcomeSet> subsets;    // most violated first
  std::vector<double> values;         // corresponding quadratic-form values
  std::optional<OutcomeSet> most_violated() const {
    return subsets.empty() ? std::nullopt : std::make_optional(subsets.front());
  }
};

// Searches for subsets a with sum_{i,j in a} d_ij < -violation_tol.
SeparationResult jqm_separation(const linalg::Matrix& d, const SeparationOptions& opts = {});

// ---- constructive witness extension (Q^{1+AB} -> branching atom Gram) -------

enum class ProjectorOrder { DescendingBasics, AscendingBasics };

struct GramWitness {
  linalg::Matrix gram;
  std::vector<std::string> index_names;
};

// Factorizes a feasible q1ab Gram, builds the per-basic projective
// measurements from the outcome subspaces, and returns the Gram matrix of
// the projected atom vectors. The result satisfies the spjqmb equalities of
// the same behaviour (up to numerical tolerance).
linalg::Matrix extend_q1ab_witness(const linalg::Matrix& w, const OutcomeIndexedProgram& meta,
                                   const Scenario& s,
                                   ProjectorOrder order = ProjectorOrder::DescendingBasics,
                                   double rank_cutoff = 1e-10);

} // namespace qmh
