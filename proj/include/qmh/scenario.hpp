#pragma once

#include "qmh/common.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace qmh {

// Subset of the atoms of an NC space, as a fixed-width bitset. This is the
// universal currency for outcomes and events: outcomes of measurements,
// algebra elements and separation-oracle subsets are all OutcomeSets.
class OutcomeSet {
 public:
  OutcomeSet() = default;
  explicit OutcomeSet(std::size_t n_atoms, bool filled = false);

  std::size_t universe() const { return n_; }
  std::size_t count() const;
  bool test(std::size_t i) const;
  void set(std::size_t i);
  void reset(std::size_t i);
  bool empty() const;

  OutcomeSet operator&(const OutcomeSet& o) const;
  OutcomeSet operator|(const OutcomeSet& o) const;
  OutcomeSet complement() const;
  bool is_subset_of(const OutcomeSet& o) const;
  bool intersects(const OutcomeSet& o) const;
  std::size_t intersect_count(const OutcomeSet& o) const;

  bool operator==(const OutcomeSet& o) const { return n_ == o.n_ && w_ == o.w_; }
  // Orders by the sorted member lists (smallest distinguishing atom wins).
  bool operator<(const OutcomeSet& o) const;

  std::vector<std::size_t> members() const;
  std::size_t first_member() const; // universe() when empty
  void for_each(const std::function<void(std::size_t)>& fn) const;
  const std::vector<std::uint64_t>& words() const { return w_; }

 private:
  std::size_t n_ = 0;
  std::vector<std::uint64_t> w_;
};

// Product outcome-label space of all basic measurements. Atoms are indexed
// in mixed-radix order with factor 0 most significant.
struct NCSpace {
  std::vector<int> cards;
  std::vector<std::size_t> strides;
  std::size_t total = 1;

  static NCSpace from_cards(std::vector<int> cards, std::size_t atom_budget);
  int n_factors() const { return static_cast<int>(cards.size()); }
  int label_of(std::size_t atom, int factor) const {
    return static_cast<int>(atom / strides[factor] % static_cast<std::size_t>(cards[factor]));
  }
  std::size_t atom_of(const std::vector<int>& labels) const;
  bool operator==(const NCSpace& o) const { return cards == o.cards; }
};

// A joint measurement: the basic measurements performed together and the
// resulting partition of the NC space into fine-grained outcomes, in
// mixed-radix order over the participating factors.
struct Measurement {
  std::vector<int> basics;      // sorted
  std::vector<int> local_cards; // cards of the basics, same order
  std::vector<OutcomeSet> cells;

  std::size_t n_cells() const { return cells.size(); }
  std::vector<int> cell_labels(std::size_t cell) const;
  std::size_t cell_of_atom(const NCSpace& space, std::size_t atom) const;
};

struct Scenario {
  NCSpace space;
  std::vector<std::vector<int>> maximal_contexts; // each sorted; list sorted lex
  std::vector<std::vector<int>> all_measurements; // meet semilattice, (size,lex) order
  std::vector<std::string> basic_names;           // optional display names
  std::vector<std::string> build_warnings;

  int n_basics() const { return space.n_factors(); }
  std::size_t n_atoms() const { return space.total; }
  Measurement make_measurement(const std::vector<int>& basics) const;
  OutcomeSet basic_outcome(int i, int label) const;
  bool has_measurement(const std::vector<int>& basics) const;
  // index into maximal_contexts of some context including `basics`
  int covering_context(const std::vector<int>& basics) const;
  bool same_structure(const Scenario& o) const {
    return space == o.space && maximal_contexts == o.maximal_contexts;
  }
};

Scenario build_scenario(std::vector<int> factor_cards,
                        std::vector<std::vector<int>> maximal_contexts,
                        std::size_t atom_budget = kDefaultAtomBudget);

// Bell scenario (n wings, m settings per wing, d outcomes per setting);
// basic index of wing w, setting s is w*m + s.
Scenario bell_scenario(int n, int m, int d, std::size_t atom_budget = kDefaultAtomBudget);

Scenario compose_scenarios(const std::vector<Scenario>& parts,
                           std::size_t atom_budget = kDefaultAtomBudget);

// All 2^k coarse-grained outcomes (including the empty set and Xi) of M.
std::vector<OutcomeSet> algebra_outcomes(const Scenario& s, const Measurement& m);

// A single branching measurement: first stage M1, then per fine outcome of
// M1 a second measurement from those including M1. cells is the induced
// partition in canonical order.
struct BranchingMeasurement {
  Measurement first;
  std::vector<Measurement> second; // aligned with first.cells
  std::vector<OutcomeSet> cells;
};

BranchingMeasurement make_branching(const Scenario& s, const std::vector<int>& first_basics,
                                    const std::vector<std::vector<int>>& second_basics);

inline constexpr std::size_t kDefaultRecipeBudget = 500000;

// Every distinct single-branching partition of the scenario, deduplicated by
// the partition itself. Includes all trivial branchings, so every ordinary
// measurement partition appears.
std::vector<BranchingMeasurement> enumerate_branching(
    const Scenario& s, std::size_t recipe_budget = kDefaultRecipeBudget);

struct OrthogonalPair {
  OutcomeSet x, y;
  std::vector<int> ctx_x, ctx_y; // measurements the outcomes are fine outcomes of
  int shared_basic;
};

// Unordered pairs of fine outcomes (over all measurements in the scenario)
// that imply different outcomes of a shared basic measurement. These are
// exactly the pairs forced to decohere by some single branching measurement.
std::vector<OrthogonalPair> branch_orthogonal_pairs(const Scenario& s);

} // namespace qmh
