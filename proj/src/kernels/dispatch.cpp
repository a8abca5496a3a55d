#include <atomic>
#include <cstdlib>
#include <string>

#include "rclass/kernels.hpp"

namespace rclass::kernels {

#ifndef RCLASS_HAVE_AVX2
const KernelTable* avx2_table() { return nullptr; }
#endif

bool cpu_supports_avx2() {
#if defined(RCLASS_HAVE_AVX2) && (defined(__x86_64__) || defined(__i386__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

namespace {

const KernelTable* pick(Isa isa) {
  if (isa == Isa::Avx2 && avx2_table() != nullptr && cpu_supports_avx2()) return avx2_table();
  return &scalar_table();
}

const KernelTable* initial_table() {
  if (const char* env = std::getenv("RCLASS_ISA")) {
    const std::string want(env);
    if (want == "scalar") return &scalar_table();
    if (want == "avx2") return pick(Isa::Avx2);
  }
  return pick(Isa::Avx2);
}

std::atomic<const KernelTable*>& slot() {
  static std::atomic<const KernelTable*> table{initial_table()};
  return table;
}

}  // namespace

const KernelTable& active() { return *slot().load(std::memory_order_relaxed); }

void force_isa(Isa isa) { slot().store(pick(isa), std::memory_order_relaxed); }

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::Scalar:
      return "scalar";
    case Isa::Avx2:
      return "avx2";
  }
  return "unknown";
}

}  // namespace rclass::kernels
