#include "d2dsim/scenario.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "d2dsim/kernels.hpp"

namespace d2dsim {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

// Signed angle difference folded into (-180, 180].
double wrap_deg(double a) {
  a = std::fmod(a, 360.0);
  if (a <= -180.0) a += 360.0;
  if (a > 180.0) a -= 360.0;
  return a;
}

}  // namespace

void SectorGeometry::validate() const {
  if (!(radius_m > 0.0) || !std::isfinite(radius_m)) {
    throw std::invalid_argument("sector radius must be positive");
  }
  if (!(arc_deg > 0.0 && arc_deg <= 360.0)) {
    throw std::invalid_argument("sector arc must lie in (0, 360] degrees");
  }
}

bool SectorGeometry::contains(Point p) const {
  const double dx = p.x - apex.x;
  const double dy = p.y - apex.y;
  const double r = std::sqrt(dx * dx + dy * dy);
  // Tolerance absorbs rounding of the polar -> cartesian conversion.
  if (r > radius_m * (1.0 + 1e-12)) return false;
  if (r == 0.0 || arc_deg >= 360.0) return true;
  const double az = std::atan2(dy, dx) / kDegToRad;
  return std::abs(wrap_deg(az - orientation_deg)) <= arc_deg / 2.0 + 1e-9;
}

std::array<SectorGeometry, 3> tri_sector_cell(double radius_m, Point apex) {
  std::array<SectorGeometry, 3> cell;
  for (int s = 0; s < 3; ++s) {
    cell[s] = SectorGeometry{radius_m, 120.0, 120.0 * s, apex};
  }
  return cell;
}

double distance(Point a, Point b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return std::sqrt(dx * dx + dy * dy);
}

std::vector<Point> deploy_users(const SectorGeometry& sector, std::size_t n, Rng& rng) {
  sector.validate();
  std::vector<Point> users;
  users.reserve(n);
  const double start = sector.orientation_deg - sector.arc_deg / 2.0;
  for (std::size_t i = 0; i < n; ++i) {
    // sqrt on the radial draw makes the density uniform in area.
    const double r = sector.radius_m * std::sqrt(rng.uniform());
    const double az = (start + sector.arc_deg * rng.uniform()) * kDegToRad;
    users.push_back({sector.apex.x + r * std::cos(az), sector.apex.y + r * std::sin(az)});
  }
  return users;
}

Deployment form_pairs(std::span<const Point> users, double d0_m, const SectorGeometry& sector,
                      int sector_index) {
  if (!(d0_m > 0.0)) throw std::invalid_argument("pairing distance d0 must be positive");

  Deployment dep;
  dep.sector = sector;
  dep.sector_index = sector_index;
  dep.n_total = users.size();

  const kernels::PointColumns cols(users);
  std::vector<std::uint8_t> available(users.size(), 1);

  for (std::size_t x = 0; x < users.size(); ++x) {
    if (!available[x]) continue;
    const std::size_t y = kernels::first_within(users[x], cols, available, x + 1, d0_m);
    if (y == users.size()) continue;
    available[x] = 0;
    available[y] = 0;
    dep.pairs.push_back({dep.pairs.size(), users[x], users[y], sector_index});
  }
  for (std::size_t u = 0; u < users.size(); ++u) {
    if (available[u]) dep.cellular.push_back({dep.cellular.size(), users[u], sector_index});
  }
  return dep;
}

}  // namespace d2dsim
