#include "abnormal/simd.hpp"

#if defined(__aarch64__)
#include <arm_neon.h>

#include <cmath>

namespace abnormal::simd {
namespace {

void add(const double* a, const double* b, double* o, std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(o + i, vaddq_f64(vld1q_f64(a + i), vld1q_f64(b + i)));
  for (; i < n; ++i) o[i] = a[i] + b[i];
}
void sub(const double* a, const double* b, double* o, std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(o + i, vsubq_f64(vld1q_f64(a + i), vld1q_f64(b + i)));
  for (; i < n; ++i) o[i] = a[i] - b[i];
}
void mul(const double* a, const double* b, double* o, std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(o + i, vmulq_f64(vld1q_f64(a + i), vld1q_f64(b + i)));
  for (; i < n; ++i) o[i] = a[i] * b[i];
}
void div(const double* a, const double* b, double* o, std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(o + i, vdivq_f64(vld1q_f64(a + i), vld1q_f64(b + i)));
  for (; i < n; ++i) o[i] = a[i] / b[i];
}
void neg(const double* a, double* o, std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(o + i, vnegq_f64(vld1q_f64(a + i)));
  for (; i < n; ++i) o[i] = -a[i];
}
void vsqrt(const double* a, double* o, std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(o + i, vsqrtq_f64(vld1q_f64(a + i)));
  for (; i < n; ++i) o[i] = std::sqrt(a[i]);
}
void scale(double s, const double* a, double* o, std::size_t n) {
  float64x2_t vs = vdupq_n_f64(s);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(o + i, vmulq_f64(vs, vld1q_f64(a + i)));
  for (; i < n; ++i) o[i] = s * a[i];
}
void axpy(double s, const double* a, double* y, std::size_t n) {
  // separate mul and add: vfmaq would round once and break equivalence with scalar
  float64x2_t vs = vdupq_n_f64(s);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2)
    vst1q_f64(y + i, vaddq_f64(vld1q_f64(y + i), vmulq_f64(vs, vld1q_f64(a + i))));
  for (; i < n; ++i) y[i] = y[i] + s * a[i];
}
void fill(double s, double* o, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) o[i] = s;
}
double dot(const double* a, const double* b, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) acc = vaddq_f64(acc, vmulq_f64(vld1q_f64(a + i), vld1q_f64(b + i)));
  double s = vgetq_lane_f64(acc, 0) + vgetq_lane_f64(acc, 1);
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}
double vmin(const double* a, std::size_t n) {
  double m = INFINITY;
  for (std::size_t i = 0; i < n; ++i) m = a[i] < m ? a[i] : m;
  return m;
}
std::size_t tiny(const double* num, const double* den, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i)
    if (den[i] == 0.0 || std::fabs(den[i]) <= 1e-12 * std::fabs(num[i])) return i;
  return n;
}

const Kernels kNeon{Isa::kNeon, "neon", add, sub, mul, div, neg, vsqrt,
                    scale, axpy, fill, dot, vmin, tiny};

}  // namespace

const Kernels* neon_kernels() { return &kNeon; }

}  // namespace abnormal::simd

#else

namespace abnormal::simd {
const Kernels* neon_kernels() { return nullptr; }
}  // namespace abnormal::simd

#endif
