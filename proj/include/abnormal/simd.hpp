#pragma once

#include <cstddef>

namespace abnormal::simd {

enum class Isa { kScalar, kAvx2, kNeon };

// Elementwise kernels give bitwise-identical results across ISAs (no FMA contraction).
// dot and min are reductions and may differ in the last bits.
struct Kernels {
  Isa isa;
  const char* name;
  void (*add)(const double* a, const double* b, double* out, std::size_t n);
  void (*sub)(const double* a, const double* b, double* out, std::size_t n);
  void (*mul)(const double* a, const double* b, double* out, std::size_t n);
  void (*div)(const double* a, const double* b, double* out, std::size_t n);
  void (*neg)(const double* a, double* out, std::size_t n);
  void (*sqrt)(const double* a, double* out, std::size_t n);
  void (*scale)(double s, const double* a, double* out, std::size_t n);  // out = s*a
  void (*axpy)(double s, const double* a, double* y, std::size_t n);     // y += s*a
  void (*fill)(double s, double* out, std::size_t n);
  double (*dot)(const double* a, const double* b, std::size_t n);
  double (*min)(const double* a, std::size_t n);
  // first lane whose divisor is tiny relative to the numerator; n if none
  std::size_t (*tiny_divisor)(const double* num, const double* den, std::size_t n);
};

const Kernels& scalar_kernels();
const Kernels* avx2_kernels();  // nullptr if not compiled in
const Kernels* neon_kernels();

Isa detected_isa();
const Kernels& active();
// tests and benchmarks; throws if the ISA is not usable on this machine
void force_isa(Isa isa);
void reset_isa();
const char* isa_name(Isa isa);

}  // namespace abnormal::simd
