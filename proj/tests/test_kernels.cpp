#include <doctest.h>

#include <cmath>
#include <vector>

#include "lora/errors.hpp"
#include "lora/kernels.hpp"
#include "lora/rng.hpp"

using namespace lora;
using kernels::KernelTable;

namespace {

struct Points {
  std::vector<double> x, y;
};

Points random_points(std::size_t n, std::uint64_t stream, double scale) {
  rng::Stream s(31, stream);
  Points p;
  for (std::size_t i = 0; i < n; ++i) {
    p.x.push_back(scale * (2.0 * s.uniform() - 1.0));
    p.y.push_back(scale * (2.0 * s.uniform() - 1.0));
  }
  return p;
}

std::vector<const KernelTable*> tables() {
  std::vector<const KernelTable*> t = {&kernels::scalar_kernels()};
  if (const KernelTable* avx = kernels::avx2_kernels()) t.push_back(avx);
  return t;
}

}  // namespace

TEST_SUITE("kernels") {
  TEST_CASE("dispatch") {
    CHECK(kernels::scalar_kernels().isa == kernels::Isa::Scalar);
    CHECK(kernels::to_string(kernels::Isa::Avx2) == "avx2");
    const kernels::Isa before = kernels::active().isa;
    kernels::select(kernels::Isa::Scalar);
    CHECK(kernels::active().isa == kernels::Isa::Scalar);
    if (kernels::avx2_kernels() != nullptr) {
      kernels::select(kernels::Isa::Avx2);
      CHECK(kernels::active().isa == kernels::Isa::Avx2);
    } else {
      CHECK_THROWS_AS(kernels::select(kernels::Isa::Avx2), DomainError);
    }
    kernels::select(before);
  }

  TEST_CASE("nearest site: brute force and cross-ISA identity") {
    for (std::size_t n_sites : {1u, 2u, 3u, 7u, 64u}) {
      for (std::size_t n_query : {0u, 1u, 5u, 8u, 13u, 1000u}) {
        const Points sites = random_points(n_sites, n_sites, 1000.0);
        const Points q = random_points(n_query, 100 + n_query, 1200.0);
        std::vector<std::uint32_t> ref_idx(n_query);
        std::vector<double> ref_d2(n_query);
        kernels::scalar_kernels().nearest_site(sites.x, sites.y, q.x, q.y, ref_idx, ref_d2);
        for (std::size_t i = 0; i < n_query; ++i) {
          double best = INFINITY;
          for (std::size_t s = 0; s < n_sites; ++s) {
            const double dx = sites.x[s] - q.x[i], dy = sites.y[s] - q.y[i];
            best = std::min(best, dx * dx + dy * dy);
          }
          CHECK(ref_d2[i] == best);
        }
        for (const KernelTable* t : tables()) {
          std::vector<std::uint32_t> idx(n_query);
          std::vector<double> d2(n_query);
          t->nearest_site(sites.x, sites.y, q.x, q.y, idx, d2);
          CHECK(idx == ref_idx);
          CHECK(d2 == ref_d2);
        }
      }
    }
  }

  TEST_CASE("nearest site ties go to the lowest index") {
    const std::vector<double> sx = {1.0, -1.0, 1.0, 0.0}, sy = {0.0, 0.0, 0.0, 5.0};
    std::vector<double> qx(9, 0.0), qy(9, 0.0);
    for (const KernelTable* t : tables()) {
      std::vector<std::uint32_t> idx(9);
      std::vector<double> d2(9);
      t->nearest_site(sx, sy, qx, qy, idx, d2);
      for (std::uint32_t i : idx) CHECK(i == 0);
    }
  }

  TEST_CASE("path gains agree across ISAs") {
    rng::Stream s(8, 8);
    std::vector<double> d2, h;
    for (int i = 0; i < 4099; ++i) {
      d2.push_back(std::exp(40.0 * s.uniform() - 5.0));
      h.push_back(s.exponential());
    }
    // Values outside the vector fast path.
    d2[3] = 1e-320;
    d2[17] = 1e300;
    d2[40] = 5e-310;
    for (double half_beta : {1.25, 1.45, 2.0}) {
      std::vector<double> ref(d2.size());
      kernels::scalar_kernels().path_gains(d2, h, half_beta, ref);
      for (std::size_t i = 0; i < d2.size(); ++i) CHECK(ref[i] == h[i] * std::pow(d2[i], -half_beta));
      for (const KernelTable* t : tables()) {
        std::vector<double> out(d2.size());
        t->path_gains(d2, h, half_beta, out);
        for (std::size_t i = 0; i < d2.size(); ++i) {
          if (std::isfinite(ref[i]))
            CHECK(std::abs(out[i] - ref[i]) <= 4e-15 * std::abs(ref[i]));
          else
            CHECK(out[i] == ref[i]);
        }
      }
    }
  }

  TEST_CASE("class sums agree across ISAs") {
    rng::Stream s(9, 9);
    std::vector<double> g;
    std::vector<std::uint8_t> cls;
    for (int i = 0; i < 1003; ++i) {
      g.push_back(s.exponential());
      cls.push_back(static_cast<std::uint8_t>(s.below(8)));  // 6 and 7 are out of range
    }
    std::vector<double> ref(6, 0.5);
    std::vector<double> exact(6, 0.5);
    for (std::size_t i = 0; i < g.size(); ++i)
      if (cls[i] < 6) exact[cls[i]] += g[i];
    kernels::scalar_kernels().sum_by_class(g, cls, ref);
    for (int c = 0; c < 6; ++c) CHECK(ref[c] == doctest::Approx(exact[c]).epsilon(1e-13));
    for (const KernelTable* t : tables()) {
      std::vector<double> out(6, 0.5);
      t->sum_by_class(g, cls, out);
      for (int c = 0; c < 6; ++c) CHECK(out[c] == doctest::Approx(ref[c]).epsilon(1e-13));
      std::vector<double> wide(12, 0.0);
      t->sum_by_class(g, cls, wide);
      for (int c = 0; c < 6; ++c) CHECK(wide[c] == doctest::Approx(ref[c] - 0.5).epsilon(1e-13));
    }
  }
}
