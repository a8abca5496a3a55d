// Compiled with -mavx2 -mfma. Nothing here may run unless dispatch.cpp has
// confirmed CPU support.

#include <immintrin.h>

#include "rclass/kernels.hpp"

namespace rclass::kernels {
namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
  }
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

double quad_form_avx2(const double* a, const double* v, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    acc += v[i] * dot_avx2(a + i * n, v, n);
  }
  return acc;
}

void weighted_diff_avx2(const double* x, const double* c, const double* w, double* out,
                        std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(c + i));
    _mm256_storeu_pd(out + i, _mm256_mul_pd(_mm256_loadu_pd(w + i), d));
  }
  for (; i < n; ++i) out[i] = w[i] * (x[i] - c[i]);
}

void chebyshev2_avx2(const double* x, std::size_t n, double* out) {
  out[0] = 1.0;
  const __m256d two = _mm256_set1_pd(2.0);
  const __m256d one = _mm256_set1_pd(1.0);
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    const __m256d t1 = _mm256_loadu_pd(x + j);
    // 2v*v - 1 with a single rounding
    const __m256d t2 = _mm256_fmsub_pd(_mm256_mul_pd(two, t1), t1, one);
    // interleave [v0 v1 v2 v3] and [w0 w1 w2 w3] -> [v0 w0 v1 w1] [v2 w2 v3 w3]
    const __m256d lo = _mm256_unpacklo_pd(t1, t2);  // v0 w0 v2 w2
    const __m256d hi = _mm256_unpackhi_pd(t1, t2);  // v1 w1 v3 w3
    _mm256_storeu_pd(out + 1 + 2 * j, _mm256_permute2f128_pd(lo, hi, 0x20));
    _mm256_storeu_pd(out + 5 + 2 * j, _mm256_permute2f128_pd(lo, hi, 0x31));
  }
  for (; j < n; ++j) {
    const double v = x[j];
    out[1 + 2 * j] = v;
    out[2 + 2 * j] = 2.0 * v * v - 1.0;
  }
}

}  // namespace

const KernelTable* avx2_table() {
  static const KernelTable table{Isa::Avx2, &dot_avx2, &quad_form_avx2, &weighted_diff_avx2,
                                 &chebyshev2_avx2};
  return &table;
}

}  // namespace rclass::kernels
