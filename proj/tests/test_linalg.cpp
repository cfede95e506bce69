#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qmh/linalg.hpp"

#include <cmath>
#include <random>

using namespace qmh;
using linalg::Matrix;

namespace {

Matrix random_sym(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      double v = g(rng);
      a.at(i, j) = v;
      a.at(j, i) = v;
    }
  return a;
}

} // namespace

TEST_CASE("packed index round trip") {
  for (std::size_t n : {1ul, 2ul, 5ul, 17ul, 64ul}) {
    std::size_t p = 0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i; j < n; ++j) {
        CHECK(linalg::packed_index(i, j, n) == p);
        auto [ri, rj] = linalg::packed_coords(p, n);
        CHECK(ri == i);
        CHECK(rj == j);
        ++p;
      }
    CHECK(linalg::packed_size(n) == p);
  }
}

TEST_CASE("jacobi eigendecomposition reconstructs the matrix") {
  for (std::size_t n : {1ul, 2ul, 6ul, 17ul, 40ul}) {
    Matrix a = random_sym(n, 31 + n);
    auto eig = linalg::jacobi_eigensym(a);
    // A = V^T diag V with orthonormal rows of V
    Matrix vt = linalg::transpose(eig.vectors);
    Matrix d(n, n);
    for (std::size_t i = 0; i < n; ++i) d.at(i, i) = eig.values[i];
    Matrix rec = linalg::matmul(linalg::matmul(vt, d), eig.vectors);
    CHECK(linalg::max_abs_diff(rec, a) < 1e-9);
    Matrix vvt = linalg::matmul(eig.vectors, vt);
    CHECK(linalg::max_abs_diff(vvt, Matrix::identity(n)) < 1e-10);
    for (std::size_t i = 1; i < n; ++i) CHECK(eig.values[i - 1] <= eig.values[i]);
  }
}

TEST_CASE("psd_clip returns the nearest PSD matrix") {
  Matrix a = random_sym(12, 99);
  Matrix c = a;
  double lmin = linalg::psd_clip(c);
  CHECK(lmin < 0); // a random symmetric matrix has negative eigenvalues
  CHECK(linalg::min_eigenvalue(c) > -1e-10);
  // difference is exactly the clipped negative part: (A - C) has eigenvalues
  // min(lambda, 0), so its largest eigenvalue is ~0
  Matrix diff(12, 12);
  for (std::size_t q = 0; q < diff.a.size(); ++q) diff.a[q] = a.a[q] - c.a[q];
  auto eig = linalg::jacobi_eigensym(diff);
  CHECK(eig.values.back() < 1e-10);
  CHECK(eig.values.front() == doctest::Approx(lmin).epsilon(1e-10));
}

TEST_CASE("growing cholesky: border, rank-one update, solve") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g(0.0, 1.0);
  const std::size_t n = 9;
  Matrix b = random_sym(n, 41);
  Matrix m(n, n); // m = b b^T + I, SPD
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double s = i == j ? 1.0 : 0.0;
      for (std::size_t k = 0; k < n; ++k) s += b.at(i, k) * b.at(j, k);
      m.at(i, j) = s;
    }

  linalg::GrowingCholesky chol;
  for (std::size_t k = 0; k < n; ++k) {
    std::vector<double> m12(k);
    for (std::size_t i = 0; i < k; ++i) m12[i] = m.at(i, k);
    CHECK(chol.border(m12, m.at(k, k)));
  }
  std::vector<double> x(n);
  for (double& v : x) v = g(rng);
  std::vector<double> rhs(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) rhs[i] += m.at(i, j) * x[j];
  auto sol = rhs;
  chol.solve(sol);
  for (std::size_t i = 0; i < n; ++i) CHECK(sol[i] == doctest::Approx(x[i]).epsilon(1e-8));

  // rank-one update vs direct factorization
  std::vector<double> u(n);
  for (double& v : u) v = g(rng);
  chol.rank1_update(u);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m.at(i, j) += u[i] * u[j];
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) rhs[i] = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) rhs[i] += m.at(i, j) * x[j];
  sol = rhs;
  chol.solve(sol);
  for (std::size_t i = 0; i < n; ++i) CHECK(sol[i] == doctest::Approx(x[i]).epsilon(1e-8));
}

TEST_CASE("functional span: projections and least squares") {
  const std::size_t side = 6;
  std::mt19937_64 rng(17);
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> pick(0, linalg::packed_size(side) - 1);

  linalg::FunctionalSpan span(side);
  std::vector<linalg::SparseFunctional> raw;
  for (int e = 0; e < 14; ++e) {
    linalg::SparseFunctional f;
    if (e >= 10) {
      // force dependent members: copy of an earlier functional
      f = raw[static_cast<std::size_t>(e - 10)];
    } else {
      for (int q = 0; q < 4; ++q) f.add(pick(rng), g(rng));
      f.finalize();
    }
    raw.push_back(f);
    span.add(f);
  }
  CHECK(span.size() == 14);
  CHECK(span.rank() <= 10);

  // realizable target: evaluate all functionals on a random matrix
  Matrix x = random_sym(side, 55);
  std::vector<double> t = span.evaluate_all(x);
  auto rr = span.range_residual(t);
  for (double v : rr) CHECK(std::fabs(v) < 1e-9);

  // reconstruct a matrix with the same functional values
  auto y = span.lstsq_coeffs(t);
  Matrix z(side, side);
  span.accumulate_combination(y, z);
  auto tz = span.evaluate_all(z);
  for (std::size_t e = 0; e < t.size(); ++e) CHECK(tz[e] == doctest::Approx(t[e]).epsilon(1e-9));

  // matrix-space projection coefficients reproduce members of the span
  auto ym = span.lstsq_matrix_coeffs(span.evaluate_all(z));
  Matrix z2(side, side);
  span.accumulate_combination(ym, z2);
  CHECK(linalg::max_abs_diff(z2, z) < 1e-9);
}

TEST_CASE("orthonormalize_columns produces an orthonormal basis") {
  Matrix v(8, 5);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g(0.0, 1.0);
  for (double& x : v.a) x = g(rng);
  // make column 3 a copy of column 1 (rank deficiency)
  for (std::size_t i = 0; i < 8; ++i) v.at(i, 3) = v.at(i, 1);
  std::size_t rank = linalg::orthonormalize_columns(v);
  CHECK(rank == 4);
  for (std::size_t a = 0; a < rank; ++a)
    for (std::size_t b = 0; b < rank; ++b) {
      double d = 0;
      for (std::size_t i = 0; i < 8; ++i) d += v.at(i, a) * v.at(i, b);
      CHECK(d == doctest::Approx(a == b ? 1.0 : 0.0).epsilon(1e-10));
    }
}
