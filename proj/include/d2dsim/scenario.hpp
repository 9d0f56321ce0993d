#pragma once

// Sector geometry, random user drops and distance-gated D2D pair formation.

#include <array>
#include <span>
#include <vector>

#include "d2dsim/types.hpp"

namespace d2dsim {

struct SectorGeometry {
  double radius_m = 500.0;
  double arc_deg = 120.0;
  double orientation_deg = 0.0;  // azimuth of the sector bisector
  Point apex{};                  // BS location

  /// Throws std::invalid_argument unless radius > 0 and 0 < arc <= 360.
  void validate() const;

  bool contains(Point p) const;
};

/// The three 120 degree sectors of a cell centred on `apex`. Sector 0 has its
/// bisector along +x; the others follow counter-clockwise.
std::array<SectorGeometry, 3> tri_sector_cell(double radius_m, Point apex = {});

struct D2DPair {
  PairId id = 0;
  Point tx;
  Point rx;
  int sector = 0;

  Point midpoint() const { return {(tx.x + rx.x) / 2.0, (tx.y + rx.y) / 2.0}; }
};

struct CellularUser {
  CellularId id = 0;
  Point location;
  int sector = 0;
};

struct Deployment {
  SectorGeometry sector;
  int sector_index = 0;
  std::vector<D2DPair> pairs;         // set D
  std::vector<CellularUser> cellular;  // set C
  std::size_t n_total = 0;

  std::size_t d() const { return pairs.size(); }
  std::size_t c() const { return cellular.size(); }
};

double distance(Point a, Point b);

/// Drops `n` users uniformly over the sector area.
std::vector<Point> deploy_users(const SectorGeometry& sector, std::size_t n, Rng& rng);

/// Greedy pair formation in list order: each unpaired user x takes the first
/// later unpaired user y with 0 < d(x, y) <= d0 as its receiver. Everybody
/// left over becomes a cellular user.
Deployment form_pairs(std::span<const Point> users, double d0_m,
                      const SectorGeometry& sector = {}, int sector_index = 0);

}  // namespace d2dsim
