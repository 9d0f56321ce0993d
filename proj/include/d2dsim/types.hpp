#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>

namespace d2dsim {

/// Planar position in meters. The BS of the reference cell sits at the origin.
struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

using PairId = std::size_t;
using CellularId = std::size_t;

inline constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

/// Demanded application, highest priority first.
enum class Application : std::uint8_t { A1 = 0, A2 = 1, A3 = 2 };

inline constexpr std::size_t kApplicationCount = 3;

std::string_view to_string(Application app);
Application parse_application(std::string_view tag);

/// A precondition of an operation was violated by the caller.
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Seedable random stream. Conversions to uniform doubles and bounded
/// integers are done here so the sequence does not depend on the standard
/// library's distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n);

  std::uint64_t next() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

/// Mixes a base seed with a stream label into an independent seed.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

}  // namespace d2dsim
