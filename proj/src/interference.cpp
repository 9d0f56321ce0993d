#include "d2dsim/interference.hpp"

#include <algorithm>
#include <stdexcept>

namespace d2dsim {

namespace {

std::vector<Point> midpoints_of(std::span<const CotierSource> sources) {
  std::vector<Point> mids;
  mids.reserve(sources.size());
  for (const auto& s : sources) mids.push_back(s.pair.midpoint());
  return mids;
}

bool same_pair(const D2DPair& a, const D2DPair& b) {
  return a.sector == b.sector && a.id == b.id;
}

}  // namespace

double bs_interference(const D2DPair& pair, const RadioConfig& cfg, Point bs_location) {
  if (pair.rx == bs_location) throw std::domain_error("D2D receiver placed on the BS");
  double p_bs = dbm_to_watt(cfg.p_bs_dbm);
  if (cfg.bs_power_division == BsPowerDivision::PerRb) p_bs /= cfg.n_rb;
  if (p_bs == 0.0) return 0.0;
  return p_bs * link_gain(bs_location, pair.rx, cfg);
}

double residual_cellular_interference(const D2DPair& pair, const CellularUser& partner,
                                      int holdings, int k_shared, const RadioConfig& cfg) {
  if (k_shared < 0 || k_shared > holdings) {
    throw ContractViolation("shared RB count exceeds the partner's holdings");
  }
  const int residual = holdings - k_shared;
  if (residual == 0) return 0.0;
  const double p_cell_per_rb = dbm_to_watt(cfg.p_cell_max_dbm) / cfg.n_rb;
  return residual * p_cell_per_rb * link_gain(partner.location, pair.rx, cfg);
}

CotierField::CotierField(std::vector<CotierSource> sources)
    : sources_(std::move(sources)), midpoints_(midpoints_of(sources_)) {}

double CotierField::interference_at(const D2DPair& victim, const RadioConfig& cfg,
                                    bool sectored) const {
  if (sources_.empty()) return 0.0;
  std::vector<double> dist(sources_.size());
  kernels::distance_row(victim.midpoint(), midpoints_, dist);

  const double p_d2d = dbm_to_watt(cfg.p_d2d_max_dbm);
  double total = 0.0;
  for (std::size_t i = 0; i < sources_.size(); ++i) {
    const auto& src = sources_[i];
    if (same_pair(src.pair, victim)) continue;
    if (dist[i] > cfg.dmax_m) continue;
    if (sectored && src.pair.sector != victim.sector) continue;
    total += (p_d2d / src.k) * link_gain(src.pair.tx, victim.rx, cfg);
  }
  return total;
}

bool CotierField::has_out_of_sector_neighbour(const D2DPair& victim,
                                              const RadioConfig& cfg) const {
  std::vector<double> dist(sources_.size());
  kernels::distance_row(victim.midpoint(), midpoints_, dist);
  for (std::size_t i = 0; i < sources_.size(); ++i) {
    if (sources_[i].pair.sector != victim.sector && dist[i] <= cfg.dmax_m) return true;
  }
  return false;
}

double cotier_interference(const D2DPair& pair, std::span<const CotierSource> others,
                           const RadioConfig& cfg, bool sectored) {
  for (const auto& o : others) {
    if (same_pair(o.pair, pair)) throw ContractViolation("victim pair listed as its own interferer");
    if (o.k < 1) throw ContractViolation("interfering pair with no RBs");
  }
  return CotierField({others.begin(), others.end()}).interference_at(pair, cfg, sectored);
}

double sinr_per_rb(const D2DPair& pair, int k_alloc, const InterferenceBreakdown& breakdown,
                   const RadioConfig& cfg) {
  if (k_alloc < 1) throw ContractViolation("SINR requested for a pair with no RBs");
  const double signal = (dbm_to_watt(cfg.p_d2d_max_dbm) / k_alloc) * link_gain(pair.tx, pair.rx, cfg);
  return signal / (dbm_to_watt(cfg.noise_dbm) + breakdown.total_w);
}

}  // namespace d2dsim
