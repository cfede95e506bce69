#pragma once

#include "qmh/scenario.hpp"

#include <array>
#include <memory>
#include <string>
#include <vector>

namespace qmh {

// A consistent probability function on the outcome collection, stored as
// fine-outcome probabilities per maximal context. Everything else is a sum.
struct Behaviour {
  std::shared_ptr<const Scenario> scenario;
  std::vector<std::vector<double>> probs; // [context][cell]
  std::vector<Measurement> ctx;           // cached maximal-context measurements

  static Behaviour create(std::shared_ptr<const Scenario> s,
                          std::vector<std::vector<double>> probs);

  // True iff x is a coarse outcome of some maximal context.
  bool is_outcome(const OutcomeSet& x) const;
  // P(x); throws InputError when x is not an outcome of any doable measurement.
  double prob_of(const OutcomeSet& x) const;
};

struct ConsistencyIssue {
  std::string what;
  double magnitude;
};

// Normalisation and marginal-consistency report; empty iff valid at tol.
std::vector<ConsistencyIssue> validate(const Behaviour& b, double tol = 1e-9);

Behaviour uniform_behaviour(std::shared_ptr<const Scenario> s);
Behaviour deterministic_behaviour(std::shared_ptr<const Scenario> s, std::size_t atom);
Behaviour mix(const Behaviour& a, const Behaviour& b, double weight_a);

// CHSH conveniences. Basic 0,1 are Alice's x=0,1; basic 2,3 are Bob's y=0,1.
std::shared_ptr<const Scenario> chsh_scenario();
bool is_chsh_structure(const Scenario& s);
Behaviour pr_box();
Behaviour isotropic(double lambda);
// Unbiased-marginal behaviour with the given correlators (E00,E01,E10,E11).
Behaviour correlator_behaviour(const std::array<double, 4>& e);
std::array<double, 4> chsh_correlators(const Behaviour& b);

struct BellFunctional {
  std::shared_ptr<const Scenario> scenario;
  std::vector<std::vector<double>> coef; // aligned with Behaviour::probs
  double value(const Behaviour& b) const;
};

BellFunctional chsh_functional();
double chsh_value(const Behaviour& b);

// Tsirelson-Landau-Masanes arcsin inequality, maximized over the choice of
// distinguished correlator; margin = pi - max combination (>= 0 means satisfied).
struct TlmReport {
  bool satisfied;
  double margin;
  std::array<double, 4> correlators;
  double max_combination;
};
TlmReport tlm_check(const Behaviour& b, double corr_tol = 1e-9);

// Kolmogorov extension: probabilities of the fine cells of a branching
// measurement, aligned with mb.cells. Sums to 1 for a consistent behaviour.
std::vector<double> extend_to_branching(const Behaviour& b, const BranchingMeasurement& mb);

// Product behaviour on the composed scenario (independent subsystems).
Behaviour compose_behaviours(const std::vector<Behaviour>& parts,
                             std::size_t atom_budget = kDefaultAtomBudget);

} // namespace qmh
