#include <cstdlib>
#include <stdexcept>
#include <string>

#include "d2dsim/kernels.hpp"

namespace d2dsim::kernels {

namespace {

constexpr KernelTable kScalar{Isa::Scalar, &scalar::distance_row, &scalar::first_within};
#if defined(D2DSIM_HAVE_AVX2)
constexpr KernelTable kAvx2{Isa::Avx2, &avx2::distance_row, &avx2::first_within};
#endif
#if defined(D2DSIM_HAVE_NEON)
constexpr KernelTable kNeon{Isa::Neon, &neon::distance_row, &neon::first_within};
#endif

const KernelTable* detect() {
  if (const char* forced = std::getenv("D2DSIM_ISA")) {
    const std::string name(forced);
    if (name == "scalar") return &kScalar;
    if (name == "avx2" && supported(Isa::Avx2)) return &table(Isa::Avx2);
    if (name == "neon" && supported(Isa::Neon)) return &table(Isa::Neon);
  }
  if (supported(Isa::Avx2)) return &table(Isa::Avx2);
  if (supported(Isa::Neon)) return &table(Isa::Neon);
  return &kScalar;
}

const KernelTable*& current() {
  static const KernelTable* chosen = detect();
  return chosen;
}

}  // namespace

std::string_view to_string(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
    case Isa::Neon: return "neon";
  }
  return "?";
}

PointColumns::PointColumns(std::span<const Point> points) {
  xs.reserve(points.size());
  ys.reserve(points.size());
  for (const Point& p : points) {
    xs.push_back(p.x);
    ys.push_back(p.y);
  }
}

bool supported(Isa isa) {
  switch (isa) {
    case Isa::Scalar:
      return true;
    case Isa::Avx2:
#if defined(D2DSIM_HAVE_AVX2)
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
    case Isa::Neon:
#if defined(D2DSIM_HAVE_NEON)
      return true;  // baseline on aarch64
#else
      return false;
#endif
  }
  return false;
}

const KernelTable& table(Isa isa) {
  if (!supported(isa)) {
    throw std::invalid_argument("kernel variant not available: " + std::string(to_string(isa)));
  }
  switch (isa) {
#if defined(D2DSIM_HAVE_AVX2)
    case Isa::Avx2: return kAvx2;
#endif
#if defined(D2DSIM_HAVE_NEON)
    case Isa::Neon: return kNeon;
#endif
    default: return kScalar;
  }
}

const KernelTable& active() { return *current(); }

void select(Isa isa) { current() = &table(isa); }

void distance_row(Point origin, const PointColumns& pts, std::span<double> out) {
  if (out.size() != pts.size()) throw ContractViolation("distance_row: output size mismatch");
  active().distance_row(origin, pts.xs.data(), pts.ys.data(), out.data(), pts.size());
}

std::size_t first_within(Point origin, const PointColumns& pts,
                         std::span<const std::uint8_t> available, std::size_t begin,
                         double limit) {
  if (available.size() != pts.size()) throw ContractViolation("first_within: mask size mismatch");
  if (begin >= pts.size()) return pts.size();
  return active().first_within(origin, pts.xs.data(), pts.ys.data(), available.data(), begin,
                               pts.size(), limit);
}

}  // namespace d2dsim::kernels
