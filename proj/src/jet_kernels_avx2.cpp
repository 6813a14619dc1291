// SPDX-License-Identifier: Apache-2.0
//
// AVX2+FMA gathered dot product. Kept in its own translation unit so the
// rest of the library builds without -mavx2; the target attribute scopes
// the ISA to this function and dispatch happens at runtime.

#include "finsler/jet_kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

namespace finsler::kernels {

__attribute__((target("avx2,fma"))) double dot_avx2(const double* a,
                                                    const double* b,
                                                    const std::int32_t* li,
                                                    const std::int32_t* ri,
                                                    std::int64_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::int64_t p = 0;
  for (; p + 4 <= n; p += 4) {
    const __m128i vl =
        _mm_loadu_si128(reinterpret_cast<const __m128i*>(li + p));
    const __m128i vr =
        _mm_loadu_si128(reinterpret_cast<const __m128i*>(ri + p));
    const __m256d va = _mm256_i32gather_pd(a, vl, 8);
    const __m256d vb = _mm256_i32gather_pd(b, vr, 8);
    acc = _mm256_fmadd_pd(va, vb, acc);
  }
  __m128d lo = _mm256_castpd256_pd128(acc);
  const __m128d hi = _mm256_extractf128_pd(acc, 1);
  lo = _mm_add_pd(lo, hi);
  double s = _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
  for (; p < n; ++p) s += a[li[p]] * b[ri[p]];
  return s;
}

}  // namespace finsler::kernels

#endif
