#include <cstdlib>
#include <cstring>
#include <stdexcept>
#include <string>

#include "plkg/simd/kernels.hpp"

namespace plkg::simd {

namespace {

constexpr KernelTable kScalar{scalar::dot, scalar::axpy, scalar::lerp, scalar::adam,
                              scalar::gemv};
#ifdef PLKG_HAVE_AVX2
constexpr KernelTable kAvx2{avx2::dot, avx2::axpy, avx2::lerp, avx2::adam, avx2::gemv};
#endif

Isa detect() {
  if (const char* env = std::getenv("PLKG_SIMD"); env && std::strcmp(env, "scalar") == 0) {
    return Isa::scalar;
  }
  return isa_available(Isa::avx2) ? Isa::avx2 : Isa::scalar;
}

}  // namespace

const char* to_string(Isa isa) { return isa == Isa::avx2 ? "avx2" : "scalar"; }

bool isa_available(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return true;
    case Isa::avx2:
#if defined(PLKG_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
  }
  return false;
}

const KernelTable& kernels_for(Isa isa) {
  if (!isa_available(isa)) {
    throw std::runtime_error(std::string("SIMD kernels not available: ") + to_string(isa));
  }
#ifdef PLKG_HAVE_AVX2
  if (isa == Isa::avx2) return kAvx2;
#endif
  return kScalar;
}

Isa active_isa() {
  static const Isa isa = detect();
  return isa;
}

const KernelTable& kernels() {
  static const KernelTable& table = kernels_for(active_isa());
  return table;
}

}  // namespace plkg::simd
