#pragma once

#include <cstddef>
#include <string_view>

// Vector kernels behind the dense linear algebra (simplex tableau rows,
// Jacobi rotations, Gram accumulation). Scalar reference implementations
// plus SIMD variants selected once at startup; select() can force a
// backend, which the equivalence tests rely on.
namespace qmh::kernels {

struct Ops {
  // sum_i x[i]*y[i]
  double (*dot)(const double* x, const double* y, std::size_t n);
  // y[i] += a*x[i]
  void (*axpy)(double a, const double* x, double* y, std::size_t n);
  // x[i] *= a
  void (*scal)(double a, double* x, std::size_t n);
  // sum_i x[i]
  double (*sum)(const double* x, std::size_t n);
  // max_i |x[i]|
  double (*max_abs)(const double* x, std::size_t n);
  // Givens pair update: (x[i], y[i]) <- (c*x[i] + s*y[i], c*y[i] - s*x[i])
  void (*rot)(double* x, double* y, double c, double s, std::size_t n);
};

enum class Backend { Scalar, Avx2, Neon };

const Ops& ops();
Backend active_backend();
bool backend_available(Backend b);
void select(Backend b); // throws std::runtime_error if unavailable
std::string_view backend_name(Backend b);

namespace detail {
extern const Ops scalar_ops;
#if defined(__x86_64__) || defined(_M_X64)
extern const Ops avx2_ops;
bool cpu_has_avx2();
#endif
#if defined(__aarch64__)
extern const Ops neon_ops;
#endif
} // namespace detail

} // namespace qmh::kernels
