#include <cmath>

#include "abnormal/simd.hpp"

namespace abnormal::simd {
namespace {

void add(const double* a, const double* b, double* o, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) o[i] = a[i] + b[i];
}
void sub(const double* a, const double* b, double* o, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) o[i] = a[i] - b[i];
}
void mul(const double* a, const double* b, double* o, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) o[i] = a[i] * b[i];
}
void div(const double* a, const double* b, double* o, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) o[i] = a[i] / b[i];
}
void neg(const double* a, double* o, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) o[i] = -a[i];
}
void vsqrt(const double* a, double* o, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) o[i] = std::sqrt(a[i]);
}
void scale(double s, const double* a, double* o, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) o[i] = s * a[i];
}
void axpy(double s, const double* a, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = y[i] + s * a[i];
}
void fill(double s, double* o, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) o[i] = s;
}
double dot(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
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

const Kernels kScalar{Isa::kScalar, "scalar", add, sub, mul, div, neg, vsqrt,
                      scale, axpy, fill, dot, vmin, tiny};

}  // namespace

const Kernels& scalar_kernels() { return kScalar; }

}  // namespace abnormal::simd
