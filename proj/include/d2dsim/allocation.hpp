#pragma once

// The SBRRA allocation engine: partner ranking, application-driven RB
// grants out of a per-cellular-user ledger, BS replenishment and throughput
// aggregation across iterations for partners that keep lending.

#include <array>
#include <span>
#include <stdexcept>
#include <vector>

#include "d2dsim/channel.hpp"
#include "d2dsim/interference.hpp"
#include "d2dsim/metrics.hpp"
#include "d2dsim/scenario.hpp"

namespace d2dsim {

/// Upper bound on a single share.
enum class ShareCap {
  RetainOne,  // k <= holdings - 1: the lender always keeps one RB
  GrantSize,  // k <= r - 1 and k <= holdings
};

struct AllocationPolicy {
  std::array<int, kApplicationCount> rb_demand{5, 3, 1};  // A1, A2, A3
  ShareCap share_cap = ShareCap::RetainOne;

  void validate(const RadioConfig& cfg) const;

  friend bool operator==(const AllocationPolicy&, const AllocationPolicy&) = default;
};

int rb_demand(Application app, const AllocationPolicy& policy = {});

/// Thrown by rank_partners when the sector has no cellular user.
class NoPartnerError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Cellular ids ordered by gain towards the pair's receiver, best first; ties
/// go to the lower id.
std::vector<CellularId> rank_partners(const D2DPair& pair, std::span<const CellularUser> cellular,
                                      const RadioConfig& cfg);

/// Same ordering rule applied to precomputed gains (index = id).
std::vector<CellularId> rank_by_gain(std::span<const double> gains);

struct ShareRecord {
  int iteration = 0;
  CellularId cellular = 0;
  PairId pair = 0;
  int k = 0;
  int holdings_before = 0;
  double sinr_linear = 0.0;
  double standalone_bps = 0.0;
  double throughput_bps = 0.0;  // as reported, carry included
  bool carried = false;
};

struct CellularAccount {
  int holdings = 0;
  int last_grant_iteration = 0;
  int last_active_iteration = 0;  // 0: never lent
  int replenishments = 0;
  int total_shared = 0;
  double carry_bps = 0.0;  // aggregated throughput of the current lending chain
  std::vector<std::size_t> history;  // indices into RbLedger::records()
};

/// RB inventory of the cellular users, indexed by stable slot.
class RbLedger {
 public:
  explicit RbLedger(int r) : r_(r) {}

  int r() const { return r_; }

  /// Opens accounts (with a fresh grant of r) for slots [size, count).
  void ensure(std::size_t count, int iteration);

  /// Every account below r/2 receives another grant of r.
  void replenish(int iteration);

  bool can_share(CellularId id, int k, ShareCap cap) const;

  /// Lends k RBs; returns the holdings before the share.
  int share(CellularId id, int k, ShareCap cap);

  std::size_t add_record(const ShareRecord& rec);

  std::span<const CellularAccount> accounts() const { return accounts_; }
  CellularAccount& account(CellularId id) { return accounts_.at(id); }
  const CellularAccount& account(CellularId id) const { return accounts_.at(id); }
  std::span<const ShareRecord> records() const { return records_; }
  ShareRecord& record(std::size_t i) { return records_.at(i); }

  /// holdings == r * (1 + replenishments) - total_shared for every account.
  bool conserved() const;

 private:
  int r_;
  std::vector<CellularAccount> accounts_;
  std::vector<ShareRecord> records_;
};

struct ScenarioState {
  explicit ScenarioState(int r) : ledger(r) {}

  int iteration = 0;  // last completed iteration
  RbLedger ledger;
};

enum class PartnerSelection {
  BestGain,  // SBRRA: walk the gain ranking
  Random,    // uniformly shuffled candidates (HMM training corpus)
};

struct EngineOptions {
  RadioConfig radio;
  AllocationPolicy policy;
  bool sectored = true;
  PartnerSelection selection = PartnerSelection::BestGain;
  bool aggregate_reuse = true;
};

/// Advances `state` by one iteration over `dep`. `demands[j]` is the
/// application of pair slot j. `external` lists active pairs of other
/// sectors, which only act as co-tier interferers. `rng` is used only with
/// PartnerSelection::Random.
IterationResult allocate_iteration(ScenarioState& state, const Deployment& dep,
                                   std::span<const Application> demands,
                                   const EngineOptions& opts,
                                   std::span<const CotierSource> external = {},
                                   Rng* rng = nullptr);

/// Interference seen by each served pair of `result` on `dep`.
std::vector<InterferenceBreakdown> interference_breakdowns(
    const Deployment& dep, const IterationResult& result, const RadioConfig& cfg, bool sectored,
    std::span<const CotierSource> external = {});

}  // namespace d2dsim
