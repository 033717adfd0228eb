// AVX2 variants of the simulator kernels. Compiled with -mavx2 -mfma and
// only reached after a CPUID check.

#include <immintrin.h>

#include <cmath>
#include <cstring>

#include "kernels_internal.hpp"

namespace lora::kernels::detail {

namespace {

void nearest_site(std::span<const double> sx, std::span<const double> sy, std::span<const double> qx,
                  std::span<const double> qy, std::span<std::uint32_t> index,
                  std::span<double> dist2) {
  const std::size_t n_sites = sx.size();
  const std::size_t n = qx.size();
  std::size_t q = 0;
  for (; q + 8 <= n; q += 8) {
    const __m256d qx0 = _mm256_loadu_pd(qx.data() + q);
    const __m256d qy0 = _mm256_loadu_pd(qy.data() + q);
    const __m256d qx1 = _mm256_loadu_pd(qx.data() + q + 4);
    const __m256d qy1 = _mm256_loadu_pd(qy.data() + q + 4);
    __m256d best0 = _mm256_set1_pd(INFINITY), best1 = best0;
    __m256d idx0 = _mm256_setzero_pd(), idx1 = idx0;
    for (std::size_t s = 0; s < n_sites; ++s) {
      const __m256d px = _mm256_set1_pd(sx[s]);
      const __m256d py = _mm256_set1_pd(sy[s]);
      const __m256d si = _mm256_set1_pd(static_cast<double>(s));
      const __m256d dx0 = _mm256_sub_pd(px, qx0), dy0 = _mm256_sub_pd(py, qy0);
      const __m256d dx1 = _mm256_sub_pd(px, qx1), dy1 = _mm256_sub_pd(py, qy1);
      const __m256d d0 = _mm256_add_pd(_mm256_mul_pd(dx0, dx0), _mm256_mul_pd(dy0, dy0));
      const __m256d d1 = _mm256_add_pd(_mm256_mul_pd(dx1, dx1), _mm256_mul_pd(dy1, dy1));
      const __m256d lt0 = _mm256_cmp_pd(d0, best0, _CMP_LT_OQ);
      const __m256d lt1 = _mm256_cmp_pd(d1, best1, _CMP_LT_OQ);
      best0 = _mm256_blendv_pd(best0, d0, lt0);
      best1 = _mm256_blendv_pd(best1, d1, lt1);
      idx0 = _mm256_blendv_pd(idx0, si, lt0);
      idx1 = _mm256_blendv_pd(idx1, si, lt1);
    }
    _mm256_storeu_pd(dist2.data() + q, best0);
    _mm256_storeu_pd(dist2.data() + q + 4, best1);
    _mm_storeu_si128(reinterpret_cast<__m128i*>(index.data() + q), _mm256_cvttpd_epi32(idx0));
    _mm_storeu_si128(reinterpret_cast<__m128i*>(index.data() + q + 4), _mm256_cvttpd_epi32(idx1));
  }
  for (; q < n; ++q) {
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

// fdlibm-derived log/exp on four doubles. Valid for positive normal
// arguments (log) and |y| <= 700 (exp); callers route everything else to
// the scalar path.
constexpr double kLn2Hi = 6.93147180369123816490e-01;
constexpr double kLn2Lo = 1.90821492927058770002e-10;
constexpr double kInvLn2 = 1.44269504088896338700e+00;
constexpr double kMagic = 0x1.8p52;  // 2^52 + 2^51

inline __m256d int64_to_double(__m256i v) {
  const __m256d magic = _mm256_set1_pd(kMagic);
  return _mm256_sub_pd(_mm256_castsi256_pd(_mm256_add_epi64(v, _mm256_castpd_si256(magic))), magic);
}

inline __m256i double_to_int64(__m256d integral) {
  const __m256d magic = _mm256_set1_pd(kMagic);
  return _mm256_sub_epi64(_mm256_castpd_si256(_mm256_add_pd(integral, magic)),
                          _mm256_castpd_si256(magic));
}

inline __m256d log4(__m256d x) {
  const __m256i bits = _mm256_castpd_si256(x);
  __m256i exponent = _mm256_sub_epi64(_mm256_srli_epi64(bits, 52), _mm256_set1_epi64x(1023));
  const __m256i mant_mask = _mm256_set1_epi64x(0x000FFFFFFFFFFFFFLL);
  __m256d m = _mm256_castsi256_pd(
      _mm256_or_si256(_mm256_and_si256(bits, mant_mask), _mm256_set1_epi64x(0x3FF0000000000000LL)));
  __m256d dk = int64_to_double(exponent);
  const __m256d big = _mm256_cmp_pd(m, _mm256_set1_pd(1.4142135623730951), _CMP_GT_OQ);
  m = _mm256_blendv_pd(m, _mm256_mul_pd(m, _mm256_set1_pd(0.5)), big);
  dk = _mm256_add_pd(dk, _mm256_and_pd(big, _mm256_set1_pd(1.0)));

  const __m256d f = _mm256_sub_pd(m, _mm256_set1_pd(1.0));
  const __m256d s = _mm256_div_pd(f, _mm256_add_pd(_mm256_set1_pd(2.0), f));
  const __m256d z = _mm256_mul_pd(s, s);
  const __m256d w = _mm256_mul_pd(z, z);
  auto c = [](double v) { return _mm256_set1_pd(v); };
  const __m256d t1 = _mm256_mul_pd(
      w, _mm256_add_pd(c(3.999999999940941908e-01),
                       _mm256_mul_pd(w, _mm256_add_pd(c(2.222219843214978396e-01),
                                                      _mm256_mul_pd(w, c(1.531383769920937332e-01))))));
  const __m256d t2 = _mm256_mul_pd(
      z, _mm256_add_pd(
             c(6.666666666666735130e-01),
             _mm256_mul_pd(w, _mm256_add_pd(
                                  c(2.857142874366239149e-01),
                                  _mm256_mul_pd(w, _mm256_add_pd(c(1.818357216161805012e-01),
                                                                 _mm256_mul_pd(w, c(1.479819860511658591e-01))))))));
  const __m256d r = _mm256_add_pd(t2, t1);
  const __m256d hfsq = _mm256_mul_pd(_mm256_mul_pd(c(0.5), f), f);
  // dk*ln2_hi - ((hfsq - (s*(hfsq+R) + dk*ln2_lo)) - f)
  const __m256d inner = _mm256_add_pd(_mm256_mul_pd(s, _mm256_add_pd(hfsq, r)), _mm256_mul_pd(dk, c(kLn2Lo)));
  return _mm256_sub_pd(_mm256_mul_pd(dk, c(kLn2Hi)), _mm256_sub_pd(_mm256_sub_pd(hfsq, inner), f));
}

inline __m256d exp4(__m256d y) {
  auto c = [](double v) { return _mm256_set1_pd(v); };
  const __m256d k = _mm256_round_pd(_mm256_mul_pd(y, c(kInvLn2)), _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  const __m256d hi = _mm256_sub_pd(y, _mm256_mul_pd(k, c(kLn2Hi)));
  const __m256d lo = _mm256_mul_pd(k, c(kLn2Lo));
  const __m256d r = _mm256_sub_pd(hi, lo);
  const __m256d t = _mm256_mul_pd(r, r);
  __m256d p = c(4.13813679705723846039e-08);
  p = _mm256_add_pd(c(-1.65339022054652515390e-06), _mm256_mul_pd(t, p));
  p = _mm256_add_pd(c(6.61375632143793436117e-05), _mm256_mul_pd(t, p));
  p = _mm256_add_pd(c(-2.77777777770155933842e-03), _mm256_mul_pd(t, p));
  p = _mm256_add_pd(c(1.66666666666666019037e-01), _mm256_mul_pd(t, p));
  const __m256d cc = _mm256_sub_pd(r, _mm256_mul_pd(t, p));
  // 1 - ((lo - (r*c)/(2-c)) - hi)
  const __m256d frac = _mm256_div_pd(_mm256_mul_pd(r, cc), _mm256_sub_pd(c(2.0), cc));
  const __m256d e = _mm256_sub_pd(c(1.0), _mm256_sub_pd(_mm256_sub_pd(lo, frac), hi));
  const __m256i ki = double_to_int64(k);
  const __m256i scale = _mm256_slli_epi64(_mm256_add_epi64(ki, _mm256_set1_epi64x(1023)), 52);
  return _mm256_mul_pd(e, _mm256_castsi256_pd(scale));
}

void path_gains(std::span<const double> dist2, std::span<const double> fading, double half_beta,
                std::span<double> out) {
  const std::size_t n = dist2.size();
  const __m256d minus_hb = _mm256_set1_pd(-half_beta);
  const __m256d tiny = _mm256_set1_pd(0x1.0p-1000);
  const __m256d huge = _mm256_set1_pd(0x1.0p+1000);
  const __m256d ylim = _mm256_set1_pd(700.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d d2 = _mm256_loadu_pd(dist2.data() + i);
    const __m256d h = _mm256_loadu_pd(fading.data() + i);
    const __m256d in_range = _mm256_and_pd(_mm256_cmp_pd(d2, tiny, _CMP_GE_OQ), _mm256_cmp_pd(d2, huge, _CMP_LE_OQ));
    const __m256d y = _mm256_mul_pd(minus_hb, log4(d2));
    const __m256d y_abs = _mm256_andnot_pd(_mm256_set1_pd(-0.0), y);
    const __m256d ok = _mm256_and_pd(in_range, _mm256_cmp_pd(y_abs, ylim, _CMP_LE_OQ));
    if (_mm256_movemask_pd(ok) != 0xF) {
      for (std::size_t j = i; j < i + 4; ++j) out[j] = fading[j] * std::pow(dist2[j], -half_beta);
      continue;
    }
    _mm256_storeu_pd(out.data() + i, _mm256_mul_pd(h, exp4(y)));
  }
  for (; i < n; ++i) out[i] = fading[i] * std::pow(dist2[i], -half_beta);
}

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

void sum_by_class(std::span<const double> gain, std::span<const std::uint8_t> cls,
                  std::span<double> sums) {
  constexpr std::size_t kMaxClasses = 8;
  const std::size_t n_classes = sums.size();
  const std::size_t n = gain.size();
  if (n_classes > kMaxClasses) {
    kScalarTable.sum_by_class(gain, cls, sums);
    return;
  }
  __m256d acc[kMaxClasses];
  for (std::size_t c = 0; c < n_classes; ++c) acc[c] = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d g = _mm256_loadu_pd(gain.data() + i);
    std::int32_t packed;
    std::memcpy(&packed, cls.data() + i, sizeof packed);
    const __m256d label = _mm256_cvtepi32_pd(_mm_cvtepu8_epi32(_mm_cvtsi32_si128(packed)));
    for (std::size_t c = 0; c < n_classes; ++c) {
      const __m256d hit = _mm256_cmp_pd(label, _mm256_set1_pd(static_cast<double>(c)), _CMP_EQ_OQ);
      acc[c] = _mm256_add_pd(acc[c], _mm256_and_pd(hit, g));
    }
  }
  for (std::size_t c = 0; c < n_classes; ++c) sums[c] += hsum(acc[c]);
  for (; i < n; ++i)
    if (cls[i] < n_classes) sums[cls[i]] += gain[i];
}

}  // namespace

extern const KernelTable kAvx2Table;
const KernelTable kAvx2Table{Isa::Avx2, &nearest_site, &path_gains, &sum_by_class};

}  // namespace lora::kernels::detail
