// AVX2+FMA variants of the band-wise kernels. Four doubles per vector, two
// accumulators on the reductions to hide FMA latency, scalar tails.

#if defined(UNMIX_HAVE_AVX2)

#include <immintrin.h>

#include "unmix/kernels.hpp"

namespace unmix::kernels {
namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d swapped = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, swapped));
}

double dot_avx2(const double* x, const double* y, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4), acc1);
  }
  if (i + 4 <= n) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
    i += 4;
  }
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) acc += x[i] * y[i];
  return acc;
}

double sum_sq_diff_avx2(const double* x, const double* y, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    __m256d d0 = _mm256_sub_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i));
    __m256d d1 = _mm256_sub_pd(_mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4));
    acc0 = _mm256_fmadd_pd(d0, d0, acc0);
    acc1 = _mm256_fmadd_pd(d1, d1, acc1);
  }
  if (i + 4 <= n) {
    __m256d d = _mm256_sub_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i));
    acc0 = _mm256_fmadd_pd(d, d, acc0);
    i += 4;
  }
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) {
    const double d = x[i] - y[i];
    acc += d * d;
  }
  return acc;
}

double residual_sq_ppnm_avx2(const double* y, const double* s, double b,
                             std::size_t n) {
  const __m256d bb = _mm256_set1_pd(b);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d sv = _mm256_loadu_pd(s + i);
    __m256d sq = _mm256_mul_pd(sv, sv);
    __m256d model = _mm256_fmadd_pd(bb, sq, sv);
    __m256d r = _mm256_sub_pd(_mm256_loadu_pd(y + i), model);
    acc = _mm256_fmadd_pd(r, r, acc);
  }
  double out = hsum(acc);
  for (; i < n; ++i) {
    const double r = y[i] - (s[i] + b * s[i] * s[i]);
    out += r * r;
  }
  return out;
}

void axpy_avx2(double a, const double* x, double* y, std::size_t n) {
  const __m256d av = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d yv = _mm256_loadu_pd(y + i);
    yv = _mm256_fmadd_pd(av, _mm256_loadu_pd(x + i), yv);
    _mm256_storeu_pd(y + i, yv);
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

void ppnm_transform_avx2(const double* s, double b, double* out,
                         std::size_t n) {
  const __m256d bb = _mm256_set1_pd(b);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d sv = _mm256_loadu_pd(s + i);
    __m256d sq = _mm256_mul_pd(sv, sv);
    _mm256_storeu_pd(out + i, _mm256_fmadd_pd(bb, sq, sv));
  }
  for (; i < n; ++i) out[i] = s[i] + b * s[i] * s[i];
}

void square_avx2(const double* s, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d sv = _mm256_loadu_pd(s + i);
    _mm256_storeu_pd(out + i, _mm256_mul_pd(sv, sv));
  }
  for (; i < n; ++i) out[i] = s[i] * s[i];
}

double dot_diff_avx2(const double* h, const double* y, const double* s,
                     std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d d = _mm256_sub_pd(_mm256_loadu_pd(y + i), _mm256_loadu_pd(s + i));
    acc = _mm256_fmadd_pd(_mm256_loadu_pd(h + i), d, acc);
  }
  double out = hsum(acc);
  for (; i < n; ++i) out += h[i] * (y[i] - s[i]);
  return out;
}

}  // namespace

const Backend& avx2_backend_table() {
  static const Backend table = {
      "avx2",          dot_avx2,    sum_sq_diff_avx2,
      residual_sq_ppnm_avx2, axpy_avx2, ppnm_transform_avx2,
      square_avx2,     dot_diff_avx2,
  };
  return table;
}

}  // namespace unmix::kernels

#endif  // UNMIX_HAVE_AVX2
