#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qmh/kernels.hpp"

#include <cmath>
#include <random>
#include <vector>

using namespace qmh;

namespace {

std::vector<double> random_vec(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<double> v(n);
  for (double& x : v) x = g(rng);
  return v;
}

} // namespace

TEST_CASE("scalar kernels match straightforward loops") {
  const auto& ops = kernels::detail::scalar_ops;
  for (std::size_t n : {0ul, 1ul, 3ul, 7ul, 64ul, 129ul}) {
    auto x = random_vec(n, 11 + n);
    auto y = random_vec(n, 23 + n);

    double ref_dot = 0, ref_sum = 0, ref_max = 0;
    for (std::size_t i = 0; i < n; ++i) {
      ref_dot += x[i] * y[i];
      ref_sum += x[i];
      ref_max = std::max(ref_max, std::fabs(x[i]));
    }
    CHECK(ops.dot(x.data(), y.data(), n) == doctest::Approx(ref_dot).epsilon(1e-12));
    CHECK(ops.sum(x.data(), n) == doctest::Approx(ref_sum).epsilon(1e-12));
    CHECK(ops.max_abs(x.data(), n) == doctest::Approx(ref_max));

    auto y2 = y;
    ops.axpy(0.75, x.data(), y2.data(), n);
    for (std::size_t i = 0; i < n; ++i) CHECK(y2[i] == doctest::Approx(y[i] + 0.75 * x[i]));
  }
}

TEST_CASE("rot applies a Givens rotation and preserves norms") {
  const auto& ops = kernels::ops();
  const std::size_t n = 37;
  auto x = random_vec(n, 5);
  auto y = random_vec(n, 6);
  double before = 0;
  for (std::size_t i = 0; i < n; ++i) before += x[i] * x[i] + y[i] * y[i];
  double c = std::cos(0.7), s = std::sin(0.7);
  ops.rot(x.data(), y.data(), c, s, n);
  double after = 0;
  for (std::size_t i = 0; i < n; ++i) after += x[i] * x[i] + y[i] * y[i];
  CHECK(after == doctest::Approx(before).epsilon(1e-12));
}

TEST_CASE("simd backend agrees with the scalar reference") {
  kernels::Backend simd = kernels::Backend::Scalar;
  for (auto b : {kernels::Backend::Avx2, kernels::Backend::Neon})
    if (kernels::backend_available(b)) simd = b;
  if (simd == kernels::Backend::Scalar) {
    MESSAGE("no SIMD backend on this machine; equivalence trivially holds");
    return;
  }
  const auto& sc = kernels::detail::scalar_ops;
  kernels::select(simd);
  const auto& ops = kernels::ops();

  for (std::size_t n : {1ul, 2ul, 5ul, 8ul, 13ul, 100ul, 1001ul}) {
    auto x = random_vec(n, 100 + n);
    auto y = random_vec(n, 200 + n);

    CHECK(ops.dot(x.data(), y.data(), n) ==
          doctest::Approx(sc.dot(x.data(), y.data(), n)).epsilon(1e-12));
    CHECK(ops.sum(x.data(), n) == doctest::Approx(sc.sum(x.data(), n)).epsilon(1e-12));
    CHECK(ops.max_abs(x.data(), n) == doctest::Approx(sc.max_abs(x.data(), n)));

    auto ya = y, yb = y;
    ops.axpy(-1.25, x.data(), ya.data(), n);
    sc.axpy(-1.25, x.data(), yb.data(), n);
    for (std::size_t i = 0; i < n; ++i) CHECK(ya[i] == doctest::Approx(yb[i]).epsilon(1e-13));

    auto xa = x, xb = x;
    ya = y;
    yb = y;
    ops.rot(xa.data(), ya.data(), 0.6, 0.8, n);
    sc.rot(xb.data(), yb.data(), 0.6, 0.8, n);
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(xa[i] == doctest::Approx(xb[i]).epsilon(1e-13));
      CHECK(ya[i] == doctest::Approx(yb[i]).epsilon(1e-13));
    }

    auto za = x, zb = x;
    ops.scal(3.5, za.data(), n);
    sc.scal(3.5, zb.data(), n);
    for (std::size_t i = 0; i < n; ++i) CHECK(za[i] == zb[i]);
  }
  kernels::select(kernels::Backend::Scalar);
  CHECK(kernels::active_backend() == kernels::Backend::Scalar);
  kernels::select(simd);
}
