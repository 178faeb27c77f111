#include "abnormal/simd.hpp"

#if defined(__x86_64__) && defined(__AVX2__)
#include <immintrin.h>

#include <cmath>

namespace abnormal::simd {
namespace {

template <class F, class G>
inline void binary(const double* a, const double* b, double* o, std::size_t n, F vec, G tail) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(o + i, vec(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  for (; i < n; ++i) o[i] = tail(a[i], b[i]);
}

void add(const double* a, const double* b, double* o, std::size_t n) {
  binary(a, b, o, n, [](__m256d x, __m256d y) { return _mm256_add_pd(x, y); },
         [](double x, double y) { return x + y; });
}
void sub(const double* a, const double* b, double* o, std::size_t n) {
  binary(a, b, o, n, [](__m256d x, __m256d y) { return _mm256_sub_pd(x, y); },
         [](double x, double y) { return x - y; });
}
void mul(const double* a, const double* b, double* o, std::size_t n) {
  binary(a, b, o, n, [](__m256d x, __m256d y) { return _mm256_mul_pd(x, y); },
         [](double x, double y) { return x * y; });
}
void div(const double* a, const double* b, double* o, std::size_t n) {
  binary(a, b, o, n, [](__m256d x, __m256d y) { return _mm256_div_pd(x, y); },
         [](double x, double y) { return x / y; });
}
void neg(const double* a, double* o, std::size_t n) {
  const __m256d sign = _mm256_set1_pd(-0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) _mm256_storeu_pd(o + i, _mm256_xor_pd(_mm256_loadu_pd(a + i), sign));
  for (; i < n; ++i) o[i] = -a[i];
}
void vsqrt(const double* a, double* o, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) _mm256_storeu_pd(o + i, _mm256_sqrt_pd(_mm256_loadu_pd(a + i)));
  for (; i < n; ++i) o[i] = std::sqrt(a[i]);
}
void scale(double s, const double* a, double* o, std::size_t n) {
  const __m256d vs = _mm256_set1_pd(s);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) _mm256_storeu_pd(o + i, _mm256_mul_pd(vs, _mm256_loadu_pd(a + i)));
  for (; i < n; ++i) o[i] = s * a[i];
}
void axpy(double s, const double* a, double* y, std::size_t n) {
  const __m256d vs = _mm256_set1_pd(s);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d p = _mm256_mul_pd(vs, _mm256_loadu_pd(a + i));
    _mm256_storeu_pd(y + i, _mm256_add_pd(_mm256_loadu_pd(y + i), p));
  }
  for (; i < n; ++i) y[i] = y[i] + s * a[i];
}
void fill(double s, double* o, std::size_t n) {
  const __m256d vs = _mm256_set1_pd(s);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) _mm256_storeu_pd(o + i, vs);
  for (; i < n; ++i) o[i] = s;
}
double dot(const double* a, const double* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc);
  double s = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}
double vmin(const double* a, std::size_t n) {
  __m256d acc = _mm256_set1_pd(INFINITY);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) acc = _mm256_min_pd(acc, _mm256_loadu_pd(a + i));
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc);
  double m = lanes[0];
  for (int k = 1; k < 4; ++k) m = lanes[k] < m ? lanes[k] : m;
  for (; i < n; ++i) m = a[i] < m ? a[i] : m;
  return m;
}
std::size_t tiny(const double* num, const double* den, std::size_t n) {
  const __m256d absmask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7fffffffffffffffLL));
  const __m256d rel = _mm256_set1_pd(1e-12);
  const __m256d zero = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d d = _mm256_loadu_pd(den + i);
    __m256d ad = _mm256_and_pd(d, absmask);
    __m256d an = _mm256_and_pd(_mm256_loadu_pd(num + i), absmask);
    __m256d bad = _mm256_or_pd(_mm256_cmp_pd(d, zero, _CMP_EQ_OQ),
                               _mm256_cmp_pd(ad, _mm256_mul_pd(rel, an), _CMP_LE_OQ));
    int mask = _mm256_movemask_pd(bad);
    if (mask) return i + static_cast<std::size_t>(__builtin_ctz(static_cast<unsigned>(mask)));
  }
  for (; i < n; ++i)
    if (den[i] == 0.0 || std::fabs(den[i]) <= 1e-12 * std::fabs(num[i])) return i;
  return n;
}

const Kernels kAvx2{Isa::kAvx2, "avx2", add, sub, mul, div, neg, vsqrt,
                    scale, axpy, fill, dot, vmin, tiny};

}  // namespace

const Kernels* avx2_kernels() { return &kAvx2; }

}  // namespace abnormal::simd

#else

namespace abnormal::simd {
const Kernels* avx2_kernels() { return nullptr; }
}  // namespace abnormal::simd

#endif
