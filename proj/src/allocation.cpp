#include "d2dsim/allocation.hpp"

#include <algorithm>
#include <numeric>
#include <string>

namespace d2dsim {

std::string_view to_string(Application app) {
  switch (app) {
    case Application::A1: return "A1";
    case Application::A2: return "A2";
    case Application::A3: return "A3";
  }
  return "?";
}

Application parse_application(std::string_view tag) {
  if (tag == "A1") return Application::A1;
  if (tag == "A2") return Application::A2;
  if (tag == "A3") return Application::A3;
  throw std::invalid_argument("unknown application tag '" + std::string(tag) + "'");
}

void AllocationPolicy::validate(const RadioConfig& cfg) const {
  for (std::size_t a = 0; a < rb_demand.size(); ++a) {
    if (rb_demand[a] < 1 || rb_demand[a] > cfg.n_rb - 1) {
      throw std::invalid_argument("invalid value for a" + std::to_string(a + 1) +
                                  "_rb: must lie in [1, n_rb - 1]");
    }
  }
}

int rb_demand(Application app, const AllocationPolicy& policy) {
  return policy.rb_demand[static_cast<std::size_t>(app)];
}

std::vector<CellularId> rank_by_gain(std::span<const double> gains) {
  std::vector<CellularId> order(gains.size());
  std::iota(order.begin(), order.end(), CellularId{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](CellularId a, CellularId b) { return gains[a] > gains[b]; });
  return order;
}

std::vector<CellularId> rank_partners(const D2DPair& pair, std::span<const CellularUser> cellular,
                                      const RadioConfig& cfg) {
  if (cellular.empty()) throw NoPartnerError("no cellular user to share RBs with");
  std::vector<double> gains(cellular.size());
  for (std::size_t i = 0; i < cellular.size(); ++i) {
    if (cellular[i].id != i) throw ContractViolation("cellular ids must equal their slot index");
    gains[i] = link_gain(cellular[i].location, pair.rx, cfg);
  }
  return rank_by_gain(gains);
}

// ---- ledger ---------------------------------------------------------------

void RbLedger::ensure(std::size_t count, int iteration) {
  while (accounts_.size() < count) {
    CellularAccount acc;
    acc.holdings = r_;
    acc.last_grant_iteration = iteration;
    accounts_.push_back(std::move(acc));
  }
}

void RbLedger::replenish(int iteration) {
  for (auto& acc : accounts_) {
    if (2 * acc.holdings < r_) {
      acc.holdings += r_;
      acc.last_grant_iteration = iteration;
      ++acc.replenishments;
    }
  }
}

bool RbLedger::can_share(CellularId id, int k, ShareCap cap) const {
  const int h = accounts_.at(id).holdings;
  if (k < 1) return false;
  switch (cap) {
    case ShareCap::RetainOne: return k <= h - 1;
    case ShareCap::GrantSize: return k <= r_ - 1 && k <= h;
  }
  return false;
}

int RbLedger::share(CellularId id, int k, ShareCap cap) {
  if (!can_share(id, k, cap)) throw ContractViolation("share exceeds the lender's RB budget");
  auto& acc = accounts_.at(id);
  const int before = acc.holdings;
  acc.holdings -= k;
  acc.total_shared += k;
  return before;
}

std::size_t RbLedger::add_record(const ShareRecord& rec) {
  records_.push_back(rec);
  accounts_.at(rec.cellular).history.push_back(records_.size() - 1);
  return records_.size() - 1;
}

bool RbLedger::conserved() const {
  return std::all_of(accounts_.begin(), accounts_.end(), [&](const CellularAccount& a) {
    return a.holdings >= 0 && a.holdings == r_ * (1 + a.replenishments) - a.total_shared;
  });
}

// ---- engine ---------------------------------------------------------------

namespace {

std::vector<CotierSource> active_sources(const Deployment& dep, const IterationResult& result,
                                         std::span<const CotierSource> external) {
  std::vector<CotierSource> sources;
  for (const auto& out : result.pairs) {
    if (out.served) sources.push_back({dep.pairs.at(out.decision.pair_id), out.decision.k});
  }
  sources.insert(sources.end(), external.begin(), external.end());
  return sources;
}

}  // namespace

std::vector<InterferenceBreakdown> interference_breakdowns(const Deployment& dep,
                                                           const IterationResult& result,
                                                           const RadioConfig& cfg, bool sectored,
                                                           std::span<const CotierSource> external) {
  const CotierField field(active_sources(dep, result, external));
  std::vector<InterferenceBreakdown> out;
  for (const auto& o : result.pairs) {
    if (!o.served) continue;
    const D2DPair& pair = dep.pairs.at(o.decision.pair_id);
    const CellularUser& partner = dep.cellular.at(o.decision.partner);
    out.push_back(InterferenceBreakdown::of(
        bs_interference(pair, cfg, dep.sector.apex),
        residual_cellular_interference(pair, partner, o.decision.holdings_before, o.decision.k, cfg),
        field.interference_at(pair, cfg, sectored)));
  }
  return out;
}

IterationResult allocate_iteration(ScenarioState& state, const Deployment& dep,
                                   std::span<const Application> demands,
                                   const EngineOptions& opts,
                                   std::span<const CotierSource> external, Rng* rng) {
  if (demands.size() < dep.d()) throw ContractViolation("missing demand for a pair slot");
  if (opts.selection == PartnerSelection::Random && rng == nullptr) {
    throw ContractViolation("random partner selection needs a random stream");
  }
  const RadioConfig& cfg = opts.radio;
  RbLedger& ledger = state.ledger;
  const int n = state.iteration + 1;
  const int r = ledger.r();

  ledger.ensure(dep.c(), n);
  ledger.replenish(n);

  IterationResult result;
  result.iteration = n;
  result.n_cellular = dep.c();
  result.pairs.resize(dep.d());

  // First pair each cellular user serves this iteration; it receives the carry.
  std::vector<bool> lent_this_iteration(ledger.accounts().size(), false);
  std::vector<std::size_t> record_of(dep.d(), kNone);

  for (PairId j = 0; j < dep.d(); ++j) {
    PairOutcome& out = result.pairs[j];
    AllocationDecision& dec = out.decision;
    dec.pair_id = j;
    dec.application = demands[j];
    dec.k = rb_demand(dec.application, opts.policy);

    std::vector<CellularId> candidates;
    if (opts.selection == PartnerSelection::BestGain) {
      if (!dep.cellular.empty()) candidates = rank_partners(dep.pairs[j], dep.cellular, cfg);
    } else {
      candidates.resize(dep.c());
      std::iota(candidates.begin(), candidates.end(), CellularId{0});
      for (std::size_t i = candidates.size(); i > 1; --i) {
        std::swap(candidates[i - 1], candidates[rng->below(i)]);
      }
    }

    const auto chosen = std::find_if(candidates.begin(), candidates.end(), [&](CellularId id) {
      return ledger.can_share(id, dec.k, opts.policy.share_cap);
    });
    if (chosen == candidates.end()) {
      result.unserved.push_back(j);
      continue;
    }

    const CellularId partner = *chosen;
    dec.partner = partner;
    dec.holdings_before = ledger.share(partner, dec.k, opts.policy.share_cap);
    out.served = true;

    const CellularAccount& acc = ledger.account(partner);
    if (opts.aggregate_reuse && !lent_this_iteration[partner] &&
        acc.last_active_iteration == n - 1 && n > 1 && 2 * dec.holdings_before >= r) {
      dec.reused_partner = true;
      out.carry_in_bps = acc.carry_bps;
    }
    lent_this_iteration[partner] = true;
    record_of[j] = ledger.add_record({n, partner, j, dec.k, dec.holdings_before});
  }

  const auto breakdowns = interference_breakdowns(dep, result, cfg, opts.sectored, external);
  const double threshold = db_to_linear(cfg.sinr_threshold_db);

  std::size_t b = 0;
  for (PairOutcome& out : result.pairs) {
    if (!out.served) continue;
    AllocationDecision& dec = out.decision;
    out.breakdown = breakdowns[b++];
    dec.sinr_per_rb = sinr_per_rb(dep.pairs[dec.pair_id], dec.k, out.breakdown, cfg);
    dec.feasible = dec.sinr_per_rb >= threshold;
    out.standalone_bps = pair_throughput(dec.sinr_per_rb, dec.k, cfg.rb_bandwidth_hz);
    out.throughput_bps = dec.reused_partner ? out.standalone_bps + out.carry_in_bps
                                            : out.standalone_bps;
    out.mos = mos(to_kbps(out.throughput_bps));
    result.iteration_total_bps += out.throughput_bps;
    result.complexity_w += out.breakdown.total_w;

    ShareRecord& rec = ledger.record(record_of[dec.pair_id]);
    rec.sinr_linear = dec.sinr_per_rb;
    rec.standalone_bps = out.standalone_bps;
    rec.throughput_bps = out.throughput_bps;
    rec.carried = dec.reused_partner;
  }

  // Close the iteration: each lender's chain total is what its pairs reported.
  std::vector<double> chain(ledger.accounts().size(), 0.0);
  for (const PairOutcome& out : result.pairs) {
    if (out.served) chain[out.decision.partner] += out.throughput_bps;
  }
  for (CellularId id = 0; id < chain.size(); ++id) {
    if (!lent_this_iteration[id]) continue;
    CellularAccount& acc = ledger.account(id);
    acc.last_active_iteration = n;
    acc.carry_bps = opts.aggregate_reuse ? chain[id] : 0.0;
  }

  state.iteration = n;
  return result;
}

}  // namespace d2dsim
