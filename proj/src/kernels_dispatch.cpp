#include <atomic>
#include <cstdlib>
#include <string>

#include "kernels_internal.hpp"
#include "lora/errors.hpp"

namespace lora::kernels {

namespace {

std::atomic<const KernelTable*> g_active{nullptr};

const KernelTable* initial_choice() {
  const KernelTable* best = avx2_kernels();
  if (const char* env = std::getenv("LORA_SIMD")) {
    const std::string want(env);
    if (want == "scalar") return &detail::kScalarTable;
    if (want == "avx2" && best == nullptr)
      throw DomainError("LORA_SIMD=avx2 requested but AVX2 is unavailable");
  }
  return best != nullptr ? best : &detail::kScalarTable;
}

}  // namespace

std::string_view to_string(Isa isa) { return isa == Isa::Avx2 ? "avx2" : "scalar"; }

const KernelTable& scalar_kernels() { return detail::kScalarTable; }

const KernelTable* avx2_kernels() {
#if defined(LORA_WITH_AVX2)
  static const bool supported = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  return supported ? &detail::kAvx2Table : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable& active() {
  const KernelTable* table = g_active.load(std::memory_order_acquire);
  if (table == nullptr) {
    const KernelTable* chosen = initial_choice();
    const KernelTable* expected = nullptr;
    g_active.compare_exchange_strong(expected, chosen, std::memory_order_acq_rel);
    table = g_active.load(std::memory_order_acquire);
  }
  return *table;
}

void select(Isa isa) {
  if (isa == Isa::Scalar) {
    g_active.store(&detail::kScalarTable, std::memory_order_release);
    return;
  }
  const KernelTable* table = avx2_kernels();
  if (table == nullptr) throw DomainError("AVX2 kernels unavailable on this build or CPU");
  g_active.store(table, std::memory_order_release);
}

}  // namespace lora::kernels
