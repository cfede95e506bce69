#pragma once

#include "qmh/common.hpp"
#include "qmh/linalg.hpp"

#include <string>
#include <vector>

namespace qmh {

// Cone of the variable vector. Nonneg: x >= 0 componentwise. Psd: the
// variables are the packed upper triangle of a symmetric matrix constrained
// to the PSD cone. FreeWithCuts: same packed layout, free entries, with the
// lazily generated subset-positivity family D(a,a) >= 0 as the cone.
enum class ConeKind { Nonneg, FreeWithCuts, Psd };

struct Equality {
  linalg::SparseFunctional f; // packed-index coefficients (plain indices for Nonneg)
  double rhs = 0.0;
  std::string tag; // provenance: which clause of the defining condition this encodes
};

struct ConeProgram {
  ConeKind kind = ConeKind::Nonneg;
  std::size_t n = 0;           // vector length (Nonneg) or matrix side (others)
  std::string condition;       // jpm, jqm, spjqm, spjqmb, q1, q1ab, or synthetic
  std::vector<Equality> equalities;

  std::size_t var_count() const {
    return kind == ConeKind::Nonneg ? n : linalg::packed_size(n);
  }

  void add(Equality e) { equalities.push_back(std::move(e)); }

  // Merge equalities with identical coefficient signatures. Two merged rows
  // whose right-hand sides differ by more than rhs_tol indicate signalling
  // in the source behaviour and raise SignallingError.
  void dedupe(double rhs_tol = 1e-9);

  std::vector<std::string> tag_families() const; // sorted distinct tags

  // Sparse text export, one line per equality.
  std::string export_text() const;
};

} // namespace qmh
