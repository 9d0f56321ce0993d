#include <arm_neon.h>

#include "d2dsim/kernels.hpp"

namespace d2dsim::kernels::neon {

namespace {

inline float64x2_t distance2(float64x2_t ox, float64x2_t oy, const double* xs, const double* ys) {
  const float64x2_t dx = vsubq_f64(ox, vld1q_f64(xs));
  const float64x2_t dy = vsubq_f64(oy, vld1q_f64(ys));
  // Separate mul and add: vfmaq would round differently from the scalar path.
  return vsqrtq_f64(vaddq_f64(vmulq_f64(dx, dx), vmulq_f64(dy, dy)));
}

}  // namespace

void distance_row(Point origin, const double* xs, const double* ys, double* out, std::size_t n) {
  const float64x2_t ox = vdupq_n_f64(origin.x);
  const float64x2_t oy = vdupq_n_f64(origin.y);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    vst1q_f64(out + i, distance2(ox, oy, xs + i, ys + i));
  }
  scalar::distance_row(origin, xs + i, ys + i, out + i, n - i);
}

std::size_t first_within(Point origin, const double* xs, const double* ys,
                         const std::uint8_t* available, std::size_t begin, std::size_t n,
                         double limit) {
  const float64x2_t ox = vdupq_n_f64(origin.x);
  const float64x2_t oy = vdupq_n_f64(origin.y);
  const float64x2_t lim = vdupq_n_f64(limit);
  std::size_t i = begin;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t d = distance2(ox, oy, xs + i, ys + i);
    const uint64x2_t le = vcleq_f64(d, lim);
    const uint64x2_t nz = vreinterpretq_u64_u32(vmvnq_u32(vreinterpretq_u32_u64(vceqzq_f64(d))));
    const uint64x2_t hit = vandq_u64(le, nz);
    if (vgetq_lane_u64(hit, 0) != 0 && available[i] != 0) return i;
    if (vgetq_lane_u64(hit, 1) != 0 && available[i + 1] != 0) return i + 1;
  }
  return scalar::first_within(origin, xs, ys, available, i, n, limit);
}

}  // namespace d2dsim::kernels::neon
