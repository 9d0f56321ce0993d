// Compiled with -mavx2 only; reached solely through the dispatch table after
// a CPUID check.
#include <immintrin.h>

#include "d2dsim/kernels.hpp"

namespace d2dsim::kernels::avx2 {

namespace {

inline __m256d distance4(__m256d ox, __m256d oy, const double* xs, const double* ys) {
  const __m256d dx = _mm256_sub_pd(ox, _mm256_loadu_pd(xs));
  const __m256d dy = _mm256_sub_pd(oy, _mm256_loadu_pd(ys));
  return _mm256_sqrt_pd(_mm256_add_pd(_mm256_mul_pd(dx, dx), _mm256_mul_pd(dy, dy)));
}

}  // namespace

void distance_row(Point origin, const double* xs, const double* ys, double* out, std::size_t n) {
  const __m256d ox = _mm256_set1_pd(origin.x);
  const __m256d oy = _mm256_set1_pd(origin.y);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(out + i, distance4(ox, oy, xs + i, ys + i));
  }
  scalar::distance_row(origin, xs + i, ys + i, out + i, n - i);
}

std::size_t first_within(Point origin, const double* xs, const double* ys,
                         const std::uint8_t* available, std::size_t begin, std::size_t n,
                         double limit) {
  const __m256d ox = _mm256_set1_pd(origin.x);
  const __m256d oy = _mm256_set1_pd(origin.y);
  const __m256d lim = _mm256_set1_pd(limit);
  const __m256d zero = _mm256_setzero_pd();
  std::size_t i = begin;
  for (; i + 4 <= n; i += 4) {
    const __m256d d = distance4(ox, oy, xs + i, ys + i);
    const __m256d hit = _mm256_and_pd(_mm256_cmp_pd(d, lim, _CMP_LE_OQ),
                                      _mm256_cmp_pd(d, zero, _CMP_NEQ_OQ));
    int mask = _mm256_movemask_pd(hit);
    if (mask == 0) continue;
    for (int lane = 0; lane < 4; ++lane) {
      if ((mask >> lane) & 1) {
        if (available[i + lane] != 0) return i + static_cast<std::size_t>(lane);
      }
    }
  }
  return scalar::first_within(origin, xs, ys, available, i, n, limit);
}

}  // namespace d2dsim::kernels::avx2
