// NEON variants for aarch64.
#if defined(__aarch64__)

#include "qmh/kernels.hpp"

#include <arm_neon.h>

#include <cmath>

namespace qmh::kernels::detail {

namespace {

double dot_neon(const double* x, const double* y, std::size_t n) {
  float64x2_t a0 = vdupq_n_f64(0.0);
  float64x2_t a1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    a0 = vfmaq_f64(a0, vld1q_f64(x + i), vld1q_f64(y + i));
    a1 = vfmaq_f64(a1, vld1q_f64(x + i + 2), vld1q_f64(y + i + 2));
  }
  double acc = vaddvq_f64(a0) + vaddvq_f64(a1);
  for (; i < n; ++i) acc += x[i] * y[i];
  return acc;
}

void axpy_neon(double a, const double* x, double* y, std::size_t n) {
  float64x2_t va = vdupq_n_f64(a);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2)
    vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), va, vld1q_f64(x + i)));
  for (; i < n; ++i) y[i] += a * x[i];
}

void scal_neon(double a, double* x, std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(x + i, vmulq_n_f64(vld1q_f64(x + i), a));
  for (; i < n; ++i) x[i] *= a;
}

double sum_neon(const double* x, std::size_t n) {
  float64x2_t a0 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) a0 = vaddq_f64(a0, vld1q_f64(x + i));
  double acc = vaddvq_f64(a0);
  for (; i < n; ++i) acc += x[i];
  return acc;
}

double max_abs_neon(const double* x, std::size_t n) {
  float64x2_t m = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) m = vmaxq_f64(m, vabsq_f64(vld1q_f64(x + i)));
  double out = vmaxvq_f64(m);
  for (; i < n; ++i) {
    double v = std::fabs(x[i]);
    if (v > out) out = v;
  }
  return out;
}

void rot_neon(double* x, double* y, double c, double s, std::size_t n) {
  float64x2_t vs = vdupq_n_f64(s);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    float64x2_t xi = vld1q_f64(x + i);
    float64x2_t yi = vld1q_f64(y + i);
    vst1q_f64(x + i, vfmaq_f64(vmulq_n_f64(xi, c), vs, yi));
    vst1q_f64(y + i, vfmsq_f64(vmulq_n_f64(yi, c), vs, xi));
  }
  for (; i < n; ++i) {
    double xi = x[i], yi = y[i];
    x[i] = c * xi + s * yi;
    y[i] = c * yi - s * xi;
  }
}

} // namespace

const Ops neon_ops = {dot_neon, axpy_neon, scal_neon, sum_neon, max_abs_neon, rot_neon};

} // namespace qmh::kernels::detail

#endif
