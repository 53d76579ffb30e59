#include <cstdlib>
#include <string_view>

#include "exactsel/kernels.hpp"

namespace exactsel::kernels {

#if defined(EXACTSEL_HAVE_AVX2)
const KernelTable& avx2_table();
#endif
#if defined(EXACTSEL_HAVE_NEON)
const KernelTable& neon_table();
#endif

const KernelTable* avx2() {
#if defined(EXACTSEL_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  static const bool supported = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  return supported ? &avx2_table() : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable* neon() {
#if defined(EXACTSEL_HAVE_NEON)
  return &neon_table();
#else
  return nullptr;
#endif
}

const KernelTable& active() {
  static const KernelTable* chosen = [] {
    const char* env = std::getenv("EXACTSEL_SIMD");
    if (env != nullptr && std::string_view(env) == "scalar") return &scalar();
    if (const KernelTable* t = avx2()) return t;
    if (const KernelTable* t = neon()) return t;
    return &scalar();
  }();
  return *chosen;
}

std::vector<const KernelTable*> available() {
  std::vector<const KernelTable*> out{&scalar()};
  if (const KernelTable* t = avx2()) out.push_back(t);
  if (const KernelTable* t = neon()) out.push_back(t);
  return out;
}

}  // namespace exactsel::kernels
