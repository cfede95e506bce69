#pragma once

#include "qmh/behaviour.hpp"
#include "qmh/linalg.hpp"

#include <complex>
#include <cstdint>
#include <map>
#include <vector>

namespace qmh {

// Ordinary quantum model: pure state plus one projector per fine outcome of
// each basic measurement. Projectors of jointly performable basics commute.
struct QuantumModel {
  int dim = 0;
  std::vector<std::complex<double>> state;                          // length dim
  std::map<std::pair<int, int>, std::vector<std::complex<double>>> projectors; // (basic,label) -> dim x dim row-major
};

struct ModelIssue {
  std::string what;
  double magnitude;
};

// Completeness, Hermiticity, idempotency and commutation checks at tol.
std::vector<ModelIssue> check_model(const QuantumModel& m, const Scenario& s, double tol = 1e-10);

// Behaviour induced by the model (throws on invariant violations beyond tol).
Behaviour model_behaviour(const QuantumModel& m, std::shared_ptr<const Scenario> s,
                          double tol = 1e-10);

// Atom Gram matrix of the vectors E^{X_1}...E^{X_p}|psi>, the explicit
// strongly positive witness carried by every ordinary quantum model.
linalg::Matrix model_atom_gram(const QuantumModel& m, const Scenario& s);

// Two-qubit singlet with the standard optimal CHSH angles (S = 2*sqrt(2)).
QuantumModel singlet_model();

// Seeded two-qubit model with random measurement directions per setting
// (commuting across the wings by construction), random pure state.
QuantumModel random_two_qubit_model(std::uint64_t seed);

// One-dimensional model realizing the deterministic behaviour at `atom`.
QuantumModel point_model(const Scenario& s, std::size_t atom);

} // namespace qmh
