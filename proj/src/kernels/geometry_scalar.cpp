#include <cmath>

#include "d2dsim/kernels.hpp"

namespace d2dsim::kernels::scalar {

void distance_row(Point origin, const double* xs, const double* ys, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = origin.x - xs[i];
    const double dy = origin.y - ys[i];
    out[i] = std::sqrt(dx * dx + dy * dy);
  }
}

std::size_t first_within(Point origin, const double* xs, const double* ys,
                         const std::uint8_t* available, std::size_t begin, std::size_t n,
                         double limit) {
  for (std::size_t i = begin; i < n; ++i) {
    if (available[i] == 0) continue;
    const double dx = origin.x - xs[i];
    const double dy = origin.y - ys[i];
    const double d = std::sqrt(dx * dx + dy * dy);
    if (d <= limit && d != 0.0) return i;
  }
  return n;
}

}  // namespace d2dsim::kernels::scalar
