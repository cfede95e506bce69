#include "qmh/decoherence.hpp"

#include "qmh/common.hpp"

#include <cmath>
#include <random>

namespace qmh {

double DecoherenceMatrix::block_sum(const std::vector<std::size_t>& x,
                                    const std::vector<std::size_t>& y) const {
  double s = 0.0;
  for (auto i : x)
    for (auto j : y) s += d.at(i, j);
  return s;
}

double DecoherenceMatrix::total() const {
  double s = 0.0;
  for (double v : d.a) s += v;
  return s;
}

double DecoherenceMatrix::min_eigenvalue() const { return linalg::min_eigenvalue(d); }

std::vector<DecoherenceIssue> validate(const DecoherenceMatrix& m, double tol) {
  std::vector<DecoherenceIssue> issues;
  if (m.d.rows != m.d.cols) {
    issues.push_back({"matrix is not square", 1.0});
    return issues;
  }
  double asym = 0.0;
  for (std::size_t i = 0; i < m.d.rows; ++i)
    for (std::size_t j = i + 1; j < m.d.cols; ++j)
      asym = std::max(asym, std::fabs(m.d.at(i, j) - m.d.at(j, i)));
  if (asym > tol) issues.push_back({"matrix is not symmetric", asym});
  double t = m.total();
  if (std::fabs(t - 1.0) > tol)
    issues.push_back({"entries sum to " + std::to_string(t) + ", not 1", std::fabs(t - 1.0)});
  return issues;
}

DecoherenceMatrix kron(const DecoherenceMatrix& a, const DecoherenceMatrix& b) {
  const std::size_t na = a.n_atoms(), nb = b.n_atoms();
  DecoherenceMatrix out;
  out.d = linalg::Matrix(na * nb, na * nb);
  for (std::size_t i = 0; i < na; ++i)
    for (std::size_t j = 0; j < na; ++j) {
      double v = a.d.at(i, j);
      if (v == 0.0) continue;
      for (std::size_t k = 0; k < nb; ++k)
        for (std::size_t l = 0; l < nb; ++l)
          out.d.at(i * nb + k, j * nb + l) = v * b.d.at(k, l);
    }
  return out;
}

DecoherenceMatrix random_sp_decoherence(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int attempt = 0; attempt < 64; ++attempt) {
    linalg::Matrix r(n, n);
    for (double& v : r.a) v = g(rng);
    DecoherenceMatrix m;
    m.d = linalg::Matrix(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        double s = 0.0;
        for (std::size_t k = 0; k < n; ++k) s += r.at(i, k) * r.at(j, k);
        m.d.at(i, j) = s;
      }
    // total = ||R^T 1||^2 >= 0; resample the rare near-zero draws
    double t = m.total();
    if (t < 1e-3 * static_cast<double>(n)) continue;
    for (double& v : m.d.a) v /= t;
    return m;
  }
  throw Error("failed to sample a strongly positive decoherence matrix");
}

} // namespace qmh
