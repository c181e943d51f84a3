// SPDX-License-Identifier: Apache-2.0
#include <cstdlib>
#include <cstring>

#include "kernels_impl.hpp"

namespace nlin::simd {
namespace {

bool cpu_has_avx2() {
#if defined(NLIN_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const KernelTable& select() {
  const char* env = std::getenv("NLIN_SIMD");
  if (env && std::strcmp(env, "scalar") == 0) return scalar_kernels();
  if (const KernelTable* t = avx2_kernels()) return *t;
  return scalar_kernels();
}

}  // namespace

const KernelTable* avx2_kernels() {
#if defined(NLIN_HAVE_AVX2)
  static const bool ok = cpu_has_avx2();
  return ok ? &detail::avx2_table() : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable& kernels() {
  static const KernelTable& t = select();
  return t;
}

const char* isa_name(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return "scalar";
    case Isa::avx2:
      return "avx2";
  }
  return "unknown";
}

}  // namespace nlin::simd
