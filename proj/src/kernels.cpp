#include "qmh/kernels.hpp"

#include <cmath>
#include <cstdlib>
#include <stdexcept>

namespace qmh::kernels {

namespace {

double dot_scalar(const double* x, const double* y, std::size_t n) {
  double acc0 = 0.0, acc1 = 0.0, acc2 = 0.0, acc3 = 0.0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc0 += x[i] * y[i];
    acc1 += x[i + 1] * y[i + 1];
    acc2 += x[i + 2] * y[i + 2];
    acc3 += x[i + 3] * y[i + 3];
  }
  for (; i < n; ++i) acc0 += x[i] * y[i];
  return (acc0 + acc1) + (acc2 + acc3);
}

void axpy_scalar(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void scal_scalar(double a, double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] *= a;
}

double sum_scalar(const double* x, std::size_t n) {
  double acc0 = 0.0, acc1 = 0.0;
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    acc0 += x[i];
    acc1 += x[i + 1];
  }
  if (i < n) acc0 += x[i];
  return acc0 + acc1;
}

double max_abs_scalar(const double* x, std::size_t n) {
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double v = std::fabs(x[i]);
    if (v > m) m = v;
  }
  return m;
}

void rot_scalar(double* x, double* y, double c, double s, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    double xi = x[i], yi = y[i];
    x[i] = c * xi + s * yi;
    y[i] = c * yi - s * xi;
  }
}

Backend pick_default() {
  if (const char* env = std::getenv("QMH_KERNELS")) {
    std::string_view v(env);
    if (v == "scalar") return Backend::Scalar;
    if (v == "avx2" && backend_available(Backend::Avx2)) return Backend::Avx2;
    if (v == "neon" && backend_available(Backend::Neon)) return Backend::Neon;
  }
#if defined(__x86_64__) || defined(_M_X64)
  if (detail::cpu_has_avx2()) return Backend::Avx2;
#endif
#if defined(__aarch64__)
  return Backend::Neon;
#endif
  return Backend::Scalar;
}

const Ops* g_active = nullptr;
Backend g_backend = Backend::Scalar;

void ensure_init() {
  if (g_active) return;
  g_backend = pick_default();
  switch (g_backend) {
#if defined(__x86_64__) || defined(_M_X64)
    case Backend::Avx2: g_active = &detail::avx2_ops; break;
#endif
#if defined(__aarch64__)
    case Backend::Neon: g_active = &detail::neon_ops; break;
#endif
    default: g_active = &detail::scalar_ops; break;
  }
}

} // namespace

namespace detail {
const Ops scalar_ops = {dot_scalar, axpy_scalar, scal_scalar,
                        sum_scalar, max_abs_scalar, rot_scalar};
} // namespace detail

const Ops& ops() {
  ensure_init();
  return *g_active;
}

Backend active_backend() {
  ensure_init();
  return g_backend;
}

bool backend_available(Backend b) {
  switch (b) {
    case Backend::Scalar: return true;
    case Backend::Avx2:
#if defined(__x86_64__) || defined(_M_X64)
      return detail::cpu_has_avx2();
#else
      return false;
#endif
    case Backend::Neon:
#if defined(__aarch64__)
      return true;
#else
      return false;
#endif
  }
  return false;
}

void select(Backend b) {
  if (!backend_available(b))
    throw std::runtime_error("kernel backend unavailable on this machine");
  g_backend = b;
  switch (b) {
#if defined(__x86_64__) || defined(_M_X64)
    case Backend::Avx2: g_active = &detail::avx2_ops; return;
#endif
#if defined(__aarch64__)
    case Backend::Neon: g_active = &detail::neon_ops; return;
#endif
    default: g_active = &detail::scalar_ops; return;
  }
}

std::string_view backend_name(Backend b) {
  switch (b) {
    case Backend::Scalar: return "scalar";
    case Backend::Avx2: return "avx2";
    case Backend::Neon: return "neon";
  }
  return "?";
}

} // namespace qmh::kernels
