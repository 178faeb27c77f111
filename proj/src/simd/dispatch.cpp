#include <atomic>
#include <cstdlib>
#include <cstring>
#include <stdexcept>

#include "abnormal/simd.hpp"

namespace abnormal::simd {
namespace {

bool usable(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return true;
    case Isa::kAvx2:
#if defined(__x86_64__)
      return avx2_kernels() != nullptr && __builtin_cpu_supports("avx2");
#else
      return false;
#endif
    case Isa::kNeon:
      return neon_kernels() != nullptr;
  }
  return false;
}

const Kernels* table(Isa isa) {
  switch (isa) {
    case Isa::kAvx2: return avx2_kernels();
    case Isa::kNeon: return neon_kernels();
    default: return &scalar_kernels();
  }
}

const Kernels* pick_default() {
  // ABNORMAL_ISA=scalar pins the reference path
  const char* env = std::getenv("ABNORMAL_ISA");
  if (env && std::strcmp(env, "scalar") == 0) return &scalar_kernels();
  return table(detected_isa());
}

std::atomic<const Kernels*> g_active{nullptr};

}  // namespace

Isa detected_isa() {
  if (usable(Isa::kAvx2)) return Isa::kAvx2;
  if (usable(Isa::kNeon)) return Isa::kNeon;
  return Isa::kScalar;
}

const Kernels& active() {
  const Kernels* k = g_active.load(std::memory_order_acquire);
  if (!k) {
    k = pick_default();
    g_active.store(k, std::memory_order_release);
  }
  return *k;
}

void force_isa(Isa isa) {
  if (!usable(isa)) throw std::runtime_error(std::string("ISA not available: ") + isa_name(isa));
  g_active.store(table(isa), std::memory_order_release);
}

void reset_isa() { g_active.store(pick_default(), std::memory_order_release); }

const char* isa_name(Isa isa) {
  switch (isa) {
    case Isa::kAvx2: return "avx2";
    case Isa::kNeon: return "neon";
    default: return "scalar";
  }
}

}  // namespace abnormal::simd
