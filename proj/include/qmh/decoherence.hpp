#pragma once

#include "qmh/linalg.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace qmh {

// Real joint decoherence functional restricted to the atoms of 2^Xi:
// D(X,Y) is recovered bi-additively as the block sum over X x Y, and the
// quantum measure is the diagonal mu(X) = D(X,X).
struct DecoherenceMatrix {
  linalg::Matrix d; // n x n symmetric, entries sum to 1

  std::size_t n_atoms() const { return d.rows; }
  double block_sum(const std::vector<std::size_t>& x, const std::vector<std::size_t>& y) const;
  double total() const;
  double min_eigenvalue() const; // >= 0 (numerically) iff strongly positive
};

struct DecoherenceIssue {
  std::string what;
  double magnitude;
};
std::vector<DecoherenceIssue> validate(const DecoherenceMatrix& m, double tol = 1e-9);

// Joint functional of two independent systems: Kronecker product on atoms.
DecoherenceMatrix kron(const DecoherenceMatrix& a, const DecoherenceMatrix& b);

// Seeded random strongly positive decoherence matrix (Gram of random
// vectors, normalized to total 1).
DecoherenceMatrix random_sp_decoherence(std::size_t n, std::uint64_t seed);

} // namespace qmh
