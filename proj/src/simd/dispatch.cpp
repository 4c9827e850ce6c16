#include <atomic>
#include <cstdlib>
#include <string>

#include "gwd/error.hpp"
#include "gwd/simd/kernels.hpp"

namespace gwd::simd {

#if defined(GWD_HAVE_AVX2)
const KernelTable& avx2_table_impl();
#endif

namespace {

bool cpu_has_avx2() {
#if defined(GWD_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

std::atomic<const KernelTable*>& active() {
  static std::atomic<const KernelTable*> table{nullptr};
  return table;
}

const KernelTable& table_for(Isa isa) {
  if (isa == Isa::avx2) {
    if (const KernelTable* t = avx2_kernels()) return *t;
    throw InputError("AVX2 kernels are not available on this machine");
  }
  return scalar_kernels();
}

}  // namespace

std::string_view isa_name(Isa isa) { return isa == Isa::avx2 ? "avx2" : "scalar"; }

const KernelTable* avx2_kernels() {
#if defined(GWD_HAVE_AVX2)
  static const bool supported = cpu_has_avx2();
  return supported ? &avx2_table_impl() : nullptr;
#else
  return nullptr;
#endif
}

Isa detect_isa() {
  if (const char* forced = std::getenv("GWD_ISA")) {
    if (std::string(forced) == "scalar") return Isa::scalar;
  }
  return avx2_kernels() ? Isa::avx2 : Isa::scalar;
}

const KernelTable& kernels() {
  const KernelTable* t = active().load(std::memory_order_acquire);
  if (!t) {
    t = &table_for(detect_isa());
    active().store(t, std::memory_order_release);
  }
  return *t;
}

void select_isa(Isa isa) { active().store(&table_for(isa), std::memory_order_release); }

}  // namespace gwd::simd
