#pragma once

// Interference terms seen by a D2D receiver on one shared RB, and the
// resulting per-RB SINR.

#include <span>
#include <vector>

#include "d2dsim/channel.hpp"
#include "d2dsim/kernels.hpp"
#include "d2dsim/scenario.hpp"

namespace d2dsim {

struct InterferenceBreakdown {
  double from_bs_w = 0.0;
  double from_cellular_residual_w = 0.0;
  double from_cotier_w = 0.0;
  double total_w = 0.0;

  static InterferenceBreakdown of(double bs, double residual, double cotier) {
    return {bs, residual, cotier, bs + residual + cotier};
  }
};

/// Another active pair transmitting on k RBs.
struct CotierSource {
  D2DPair pair;
  int k = 1;
};

double bs_interference(const D2DPair& pair, const RadioConfig& cfg, Point bs_location);

/// Interference from the RBs the partner keeps after lending `k_shared` of
/// its `holdings`. Per-RB cellular power is P_cell_max / r.
double residual_cellular_interference(const D2DPair& pair, const CellularUser& partner,
                                      int holdings, int k_shared, const RadioConfig& cfg);

/// Co-tier interference from pairs whose midpoint lies within D_max of this
/// pair's midpoint; with `sectored`, only pairs of the same sector count.
double cotier_interference(const D2DPair& pair, std::span<const CotierSource> others,
                           const RadioConfig& cfg, bool sectored);

/// The set of active transmitters in one iteration, laid out for repeated
/// co-tier queries. A victim present in the field is skipped by identity
/// (sector, id).
class CotierField {
 public:
  explicit CotierField(std::vector<CotierSource> sources);

  double interference_at(const D2DPair& victim, const RadioConfig& cfg, bool sectored) const;

  /// True if some pair of another sector lies within D_max of the victim.
  bool has_out_of_sector_neighbour(const D2DPair& victim, const RadioConfig& cfg) const;

  std::span<const CotierSource> sources() const { return sources_; }

 private:
  std::vector<CotierSource> sources_;
  kernels::PointColumns midpoints_;
};

/// SINR on each of the k_alloc RBs; the D2D power is split evenly over them.
double sinr_per_rb(const D2DPair& pair, int k_alloc, const InterferenceBreakdown& breakdown,
                   const RadioConfig& cfg);

}  // namespace d2dsim
