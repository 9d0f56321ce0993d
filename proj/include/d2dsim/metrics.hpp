#pragma once

// Throughput, MOS and the interference-based complexity metric, plus the
// per-iteration and per-scenario result records built from them.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "d2dsim/interference.hpp"
#include "d2dsim/types.hpp"

namespace d2dsim {

enum class AllocationMode { Sbrra, Hmm };

std::string_view to_string(AllocationMode mode);
AllocationMode parse_mode(std::string_view text);

struct AllocationDecision {
  PairId pair_id = 0;
  CellularId partner = kNone;
  int k = 0;
  Application application = Application::A3;
  int holdings_before = 0;      // partner holdings at share time
  bool reused_partner = false;  // previous-iteration throughput of the partner was carried in
  double sinr_per_rb = 0.0;     // linear, identical on each of the k RBs
  bool feasible = false;        // SINR meets the configured threshold
};

struct PairOutcome {
  AllocationDecision decision;
  bool served = false;
  InterferenceBreakdown breakdown;  // zero for unserved pairs and in HMM mode
  double standalone_bps = 0.0;      // this iteration's Shannon throughput
  double carry_in_bps = 0.0;        // aggregated throughput carried in via reuse
  double throughput_bps = 0.0;      // standalone + carry
  double mos = 0.0;
};

struct IterationResult {
  int iteration = 0;  // 1-based
  std::vector<PairOutcome> pairs;
  double iteration_total_bps = 0.0;  // T_d(n)
  std::vector<PairId> unserved;
  double complexity_w = 0.0;
  std::size_t n_cellular = 0;
};

struct ScenarioReport {
  std::uint64_t seed = 0;
  std::size_t n_users = 0;
  double radius_m = 0.0;
  AllocationMode mode = AllocationMode::Sbrra;
  bool sectored = true;
  int q = 0;

  std::vector<IterationResult> iterations;
  double t_system_bps = 0.0;

  double mean_sinr_db = 0.0;  // over served pairs, all iterations
  double mean_mos = 0.0;
  std::vector<std::size_t> pairs_per_iteration;
  std::size_t outage_events = 0;
};

/// Shannon throughput summed over RBs: beta * sum log2(1 + sinr_k).
double throughput_from_rb_sinrs(std::span<const double> sinr_per_rb, double beta_hz);

/// Flat channel form: k RBs all at the same SINR.
double pair_throughput(double sinr_linear, int k, double beta_hz);

/// The one bps -> kbps conversion used ahead of the MOS mapping.
double to_kbps(double bps);

/// MOS on the five point scale from throughput in kbps.
double mos(double throughput_kbps);

/// One lending event of a cellular user, as recorded in the RB ledger.
struct ShareEvent {
  int iteration = 0;
  double sinr_linear = 0.0;
  int k = 0;
  bool eligible = true;  // pre-share holdings >= r/2
};

struct AggregateThroughput {
  double total_bps = 0.0;
  std::size_t chain_start = 0;  // index of the first event in the aggregated suffix
  bool broken = false;          // an earlier chain was discarded
};

/// Cumulative throughput of one cellular user's lending history, in event
/// order. Events must be sorted by iteration. The chain restarts when an
/// iteration is skipped or a new iteration's first share is not eligible.
AggregateThroughput aggregate_throughput(std::span<const ShareEvent> history, double beta_hz);

/// Aggregate interference power over the given pairs.
double complexity_metric(std::span<const InterferenceBreakdown> breakdowns);

/// Mean of the iteration totals.
double t_system(std::span<const IterationResult> iterations);

}  // namespace d2dsim
