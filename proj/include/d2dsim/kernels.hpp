#pragma once

// Geometry kernels over structure-of-arrays coordinates.
//
// Every kernel has a scalar reference implementation and optional AVX2 / NEON
// variants. Variants only use IEEE add, sub, mul, sqrt and compares, so their
// results are bit-identical to the scalar reference; the test suite checks
// this on random inputs. The active variant is chosen once at startup from
// the host CPU and can be overridden (D2DSIM_ISA=scalar|avx2|neon).

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "d2dsim/types.hpp"

namespace d2dsim::kernels {

enum class Isa { Scalar, Avx2, Neon };

std::string_view to_string(Isa isa);

/// Coordinates stored column-wise.
struct PointColumns {
  std::vector<double> xs;
  std::vector<double> ys;

  PointColumns() = default;
  explicit PointColumns(std::span<const Point> points);

  std::size_t size() const { return xs.size(); }
};

/// Writes sqrt((o.x - xs[i])^2 + (o.y - ys[i])^2) into out[i].
using DistanceRowFn = void (*)(Point origin, const double* xs, const double* ys,
                               double* out, std::size_t n);

/// Returns the first index i in [begin, n) with available[i] != 0 and
/// 0 < distance(origin, point i) <= limit, or n when there is none.
using FirstWithinFn = std::size_t (*)(Point origin, const double* xs, const double* ys,
                                      const std::uint8_t* available, std::size_t begin,
                                      std::size_t n, double limit);

struct KernelTable {
  Isa isa;
  DistanceRowFn distance_row;
  FirstWithinFn first_within;
};

/// True when the variant was compiled in and the CPU can execute it.
bool supported(Isa isa);

/// Table for a specific variant. Throws std::invalid_argument if unsupported.
const KernelTable& table(Isa isa);

/// Table used by the simulator.
const KernelTable& active();

/// Overrides the automatic choice. Not thread-safe; call before simulating.
void select(Isa isa);

/// Convenience wrappers over the active table.
void distance_row(Point origin, const PointColumns& pts, std::span<double> out);
std::size_t first_within(Point origin, const PointColumns& pts,
                         std::span<const std::uint8_t> available, std::size_t begin,
                         double limit);

namespace scalar {
void distance_row(Point origin, const double* xs, const double* ys, double* out, std::size_t n);
std::size_t first_within(Point origin, const double* xs, const double* ys,
                         const std::uint8_t* available, std::size_t begin, std::size_t n,
                         double limit);
}  // namespace scalar

#if defined(D2DSIM_HAVE_AVX2)
namespace avx2 {
void distance_row(Point origin, const double* xs, const double* ys, double* out, std::size_t n);
std::size_t first_within(Point origin, const double* xs, const double* ys,
                         const std::uint8_t* available, std::size_t begin, std::size_t n,
                         double limit);
}  // namespace avx2
#endif

#if defined(D2DSIM_HAVE_NEON)
namespace neon {
void distance_row(Point origin, const double* xs, const double* ys, double* out, std::size_t n);
std::size_t first_within(Point origin, const double* xs, const double* ys,
                         const std::uint8_t* available, std::size_t begin, std::size_t n,
                         double limit);
}  // namespace neon
#endif

}  // namespace d2dsim::kernels
