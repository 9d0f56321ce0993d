#include "d2dsim/metrics.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace d2dsim {

std::string_view to_string(AllocationMode mode) {
  return mode == AllocationMode::Sbrra ? "sbrra" : "hmm";
}

AllocationMode parse_mode(std::string_view text) {
  if (text == "sbrra") return AllocationMode::Sbrra;
  if (text == "hmm") return AllocationMode::Hmm;
  throw std::invalid_argument("unknown allocation mode '" + std::string(text) + "'");
}

double throughput_from_rb_sinrs(std::span<const double> sinr_per_rb, double beta_hz) {
  double total = 0.0;
  for (double sinr : sinr_per_rb) {
    if (sinr < 0.0) throw ContractViolation("negative SINR");
    total += beta_hz * std::log2(1.0 + sinr);
  }
  return total;
}

double pair_throughput(double sinr_linear, int k, double beta_hz) {
  if (k < 1) throw ContractViolation("throughput needs at least one RB");
  // Kept as a per-RB sum so frequency-selective SINRs can be fed in directly.
  const std::vector<double> rbs(static_cast<std::size_t>(k), sinr_linear);
  return throughput_from_rb_sinrs(rbs, beta_hz);
}

double to_kbps(double bps) { return bps / 1000.0; }

double mos(double throughput_kbps) {
  if (!(throughput_kbps >= 0.0)) throw std::domain_error("MOS of a negative throughput");
  const double x = (throughput_kbps + 541.1) / 45.98;
  return 5.0 - 578.0 / (1.0 + x * x);
}

AggregateThroughput aggregate_throughput(std::span<const ShareEvent> history, double beta_hz) {
  AggregateThroughput out;
  for (std::size_t e = 0; e < history.size(); ++e) {
    const ShareEvent& ev = history[e];
    if (e > 0 && ev.iteration < history[e - 1].iteration) {
      throw ContractViolation("share history out of order");
    }
    const bool new_iteration = e == 0 || ev.iteration != history[e - 1].iteration;
    if (e > 0 && new_iteration) {
      const bool consecutive = ev.iteration == history[e - 1].iteration + 1;
      if (!consecutive || !ev.eligible) {
        out.total_bps = 0.0;
        out.chain_start = e;
        out.broken = true;
      }
    }
    out.total_bps += pair_throughput(ev.sinr_linear, ev.k, beta_hz);
  }
  return out;
}

double complexity_metric(std::span<const InterferenceBreakdown> breakdowns) {
  double total = 0.0;
  for (const auto& b : breakdowns) total += b.total_w;
  return total;
}

double t_system(std::span<const IterationResult> iterations) {
  if (iterations.empty()) throw ContractViolation("T_system over zero iterations");
  double sum = 0.0;
  for (const auto& it : iterations) sum += it.iteration_total_bps;
  return sum / static_cast<double>(iterations.size());
}

}  // namespace d2dsim
