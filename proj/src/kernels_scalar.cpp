#include <cmath>

#include "kernels_internal.hpp"

namespace lora::kernels::detail {

namespace {

void nearest_site(std::span<const double> sx, std::span<const double> sy, std::span<const double> qx,
                  std::span<const double> qy, std::span<std::uint32_t> index,
                  std::span<double> dist2) {
  const std::size_t n_sites = sx.size();
  for (std::size_t q = 0; q < qx.size(); ++q) {
    double best = INFINITY;
    std::uint32_t best_i = 0;
    for (std::size_t s = 0; s < n_sites; ++s) {
      const double dx = sx[s] - qx[q];
      const double dy = sy[s] - qy[q];
      const double d2 = dx * dx + dy * dy;
      if (d2 < best) {
        best = d2;
        best_i = static_cast<std::uint32_t>(s);
      }
    }
    index[q] = best_i;
    dist2[q] = best;
  }
}

void path_gains(std::span<const double> dist2, std::span<const double> fading, double half_beta,
                std::span<double> out) {
  for (std::size_t i = 0; i < dist2.size(); ++i) out[i] = fading[i] * std::pow(dist2[i], -half_beta);
}

void sum_by_class(std::span<const double> gain, std::span<const std::uint8_t> cls,
                  std::span<double> sums) {
  for (std::size_t i = 0; i < gain.size(); ++i)
    if (cls[i] < sums.size()) sums[cls[i]] += gain[i];
}

}  // namespace

const KernelTable kScalarTable{Isa::Scalar, &nearest_site, &path_gains, &sum_by_class};

}  // namespace lora::kernels::detail
