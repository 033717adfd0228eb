#pragma once

// Data-parallel inner loops of the Monte-Carlo simulator. Each kernel has a
// scalar reference and, on x86-64, an AVX2 variant; the variant is chosen at
// runtime from CPUID and can be pinned with LORA_SIMD=scalar|avx2 or
// select(). Variants are equivalence-tested against the scalar reference.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace lora::kernels {

enum class Isa { Scalar, Avx2 };

std::string_view to_string(Isa isa);

struct KernelTable {
  Isa isa;

  /// For every query point, the index of the nearest site and the squared
  /// distance to it. Ties resolve to the lowest site index. Requires at
  /// least one site.
  void (*nearest_site)(std::span<const double> site_x, std::span<const double> site_y,
                       std::span<const double> query_x, std::span<const double> query_y,
                       std::span<std::uint32_t> index, std::span<double> dist2);

  /// out[i] = fading[i] * dist2[i]^(-half_beta). dist2 must be positive.
  void (*path_gains)(std::span<const double> dist2, std::span<const double> fading,
                     double half_beta, std::span<double> out);

  /// sums[c] += gain[i] over all i with cls[i] == c, for c < sums.size().
  /// Entries with cls[i] >= sums.size() are ignored.
  void (*sum_by_class)(std::span<const double> gain, std::span<const std::uint8_t> cls,
                       std::span<double> sums);
};

const KernelTable& scalar_kernels();
/// nullptr when the build or the CPU lacks AVX2+FMA.
const KernelTable* avx2_kernels();

/// Currently selected table.
const KernelTable& active();
/// Pin the table. Throws DomainError if the ISA is unavailable.
void select(Isa isa);

}  // namespace lora::kernels
