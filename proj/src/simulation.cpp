#include "d2dsim/simulation.hpp"

#include <array>
#include <fstream>
#include <functional>
#include <sstream>

namespace d2dsim {

Rng make_stream(std::uint64_t seed, Stream s) {
  return Rng(derive_seed(seed, static_cast<std::uint64_t>(s)));
}

void SimConfig::validate() const {
  radio.validate();
  policy.validate(radio);
}

void SimulationPlan::validate() const {
  if (q < 1) throw InvalidPlan("invalid value for q: at least one iteration is required");
  if (replications < 1) throw InvalidPlan("invalid value for replications: must be >= 1");
  if (!(radius_m > 0.0)) throw InvalidPlan("invalid value for radius_m: must be positive");
  if (hmm_warmup_scenarios < 1) throw InvalidPlan("invalid value for hmm_warmup_scenarios");
  if (threads < 0) throw InvalidPlan("invalid value for threads");
}

// ---- demand scripts ---------------------------------------------------------

DemandScript DemandScript::parse(std::istream& is) {
  DemandScript script;
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::vector<Application> apps;
    std::istringstream ls(line);
    std::string tok;
    bool any = false;
    while (std::getline(ls, tok, ',')) {
      const auto b = tok.find_first_not_of(" \t\r");
      const auto e = tok.find_last_not_of(" \t\r");
      if (b == std::string::npos) {
        if (any || line.find(',') != std::string::npos) {
          throw std::invalid_argument("demand script line " + std::to_string(line_no) +
                                      ": empty application tag");
        }
        continue;
      }
      any = true;
      try {
        apps.push_back(parse_application(tok.substr(b, e - b + 1)));
      } catch (const std::invalid_argument& err) {
        throw std::invalid_argument("demand script line " + std::to_string(line_no) + ": " +
                                    err.what());
      }
    }
    if (any) script.iterations.push_back(std::move(apps));
  }
  return script;
}

DemandScript DemandScript::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open demand script '" + path + "'");
  return parse(in);
}

std::optional<Application> DemandScript::at(int iteration, PairId slot) const {
  if (iteration < 1 || static_cast<std::size_t>(iteration) > iterations.size()) return {};
  const auto& line = iterations[static_cast<std::size_t>(iteration) - 1];
  if (slot >= line.size()) return {};
  return line[slot];
}

// ---- scenario driver ----------------------------------------------------------

namespace {

struct IterationInputs {
  Deployment dep;
  std::vector<Application> demands;
  std::vector<CotierSource> external;
};

Application sample_application(Rng& rng) {
  return static_cast<Application>(rng.below(kApplicationCount));
}

/// Fresh tri-sector drop each iteration: sector 0 is allocated, the pairs of
/// the other two sectors only interfere.
class RandomDrops {
 public:
  RandomDrops(const SimConfig& cfg, std::size_t n_users, double radius_m, std::uint64_t seed,
              const DemandScript* script)
      : cfg_(cfg),
        n_users_(n_users),
        cell_(tri_sector_cell(radius_m)),
        script_(script),
        deploy_(make_stream(seed, Stream::Deploy)),
        neighbour_deploy_(make_stream(seed, Stream::NeighbourDeploy)),
        demand_(make_stream(seed, Stream::Demand)),
        neighbour_demand_(make_stream(seed, Stream::NeighbourDemand)) {}

  IterationInputs next(int n) {
    IterationInputs in;
    const auto users = deploy_users(cell_[0], n_users_, deploy_);
    in.dep = form_pairs(users, cfg_.radio.d0_m, cell_[0], 0);
    for (PairId j = 0; j < in.dep.d(); ++j) {
      const auto scripted = script_ ? script_->at(n, j) : std::nullopt;
      in.demands.push_back(scripted ? *scripted : sample_application(demand_));
    }
    for (int s = 1; s < 3; ++s) {
      const auto others = deploy_users(cell_[s], n_users_, neighbour_deploy_);
      const Deployment dep = form_pairs(others, cfg_.radio.d0_m, cell_[s], s);
      for (const auto& p : dep.pairs) {
        in.external.push_back({p, rb_demand(sample_application(neighbour_demand_), cfg_.policy)});
      }
    }
    return in;
  }

 private:
  const SimConfig& cfg_;
  std::size_t n_users_;
  std::array<SectorGeometry, 3> cell_;
  const DemandScript* script_;
  Rng deploy_;
  Rng neighbour_deploy_;
  Rng demand_;
  Rng neighbour_demand_;
};

ScenarioReport drive(const SimConfig& cfg, int q, AllocationMode mode, bool sectored,
                     const hmm::HmmModel* model, std::uint64_t seed,
                     const std::function<IterationInputs(int)>& source) {
  cfg.validate();
  if (q < 1) throw InvalidPlan("invalid value for q: at least one iteration is required");
  if (mode == AllocationMode::Hmm && model == nullptr) {
    throw ContractViolation("HMM mode needs a model");
  }

  ScenarioReport report;
  report.seed = seed;
  report.mode = mode;
  report.sectored = sectored;
  report.q = q;

  ScenarioState state(cfg.radio.n_rb);
  Rng hmm_rng = make_stream(seed, Stream::HmmAllocate);
  EngineOptions opts{cfg.radio, cfg.policy, sectored};

  for (int n = 1; n <= q; ++n) {
    const IterationInputs in = source(n);
    IterationResult it;
    if (mode == AllocationMode::Sbrra) {
      it = allocate_iteration(state, in.dep, in.demands, opts, in.external);
    } else {
      it = hmm::hmm_allocate(state, in.dep, in.demands, cfg.radio, cfg.policy, *model, hmm_rng);
      // Reported for comparison only; the HMM grant itself is geometry-free.
      const auto bds = interference_breakdowns(in.dep, it, cfg.radio, sectored, in.external);
      it.complexity_w = complexity_metric(bds);
    }
    report.iterations.push_back(std::move(it));
  }
  summarize(report);
  return report;
}

}  // namespace

void summarize(ScenarioReport& report) {
  report.t_system_bps = t_system(report.iterations);
  report.pairs_per_iteration.clear();
  double sinr_db = 0.0;
  double mos_sum = 0.0;
  std::size_t served = 0;
  report.outage_events = 0;
  for (const auto& it : report.iterations) {
    report.pairs_per_iteration.push_back(it.pairs.size());
    for (const auto& p : it.pairs) {
      if (!p.served) continue;
      ++served;
      sinr_db += linear_to_db(p.decision.sinr_per_rb);
      mos_sum += p.mos;
      if (!p.decision.feasible) ++report.outage_events;
    }
  }
  report.mean_sinr_db = served ? sinr_db / served : 0.0;
  report.mean_mos = served ? mos_sum / served : 0.0;
}

std::vector<hmm::LabeledSequence> generate_training_corpus(const SimConfig& cfg,
                                                           const SimulationPlan& plan,
                                                           const hmm::Alphabet& alphabet) {
  cfg.validate();
  plan.validate();
  std::vector<hmm::LabeledSequence> corpus;
  Rng seeds = make_stream(plan.seed, Stream::HmmTraining);
  EngineOptions opts{cfg.radio, cfg.policy, plan.sectored, plan.hmm_training_partner, false};

  for (int w = 0; w < plan.hmm_warmup_scenarios; ++w) {
    const std::uint64_t sub = seeds.next();
    RandomDrops drops(cfg, plan.n_users, plan.radius_m, sub, nullptr);
    Rng partner_rng = make_stream(sub, Stream::Partner);
    ScenarioState state(cfg.radio.n_rb);
    for (int n = 1; n <= plan.q; ++n) {
      const IterationInputs in = drops.next(n);
      const auto it = allocate_iteration(state, in.dep, in.demands, opts, in.external, &partner_rng);
      for (const auto& p : it.pairs) {
        if (!p.served) continue;
        const std::size_t x = alphabet.symbol_for(p.decision.application, p.decision.sinr_per_rb);
        corpus.push_back({{hmm::State::BaseStation, hmm::State::CellularUser, hmm::State::Pair},
                          {x, x, x}});
      }
    }
  }
  return corpus;
}

hmm::HmmModel train_default_model(const SimConfig& cfg, const SimulationPlan& plan) {
  const auto corpus = generate_training_corpus(cfg, plan);
  if (corpus.empty()) {
    throw hmm::TrainingError("warm-up scenarios produced no D2D grants to train on");
  }
  return hmm::train(hmm::HmmModel::defaults(), corpus);
}

ScenarioReport run_scenario(const SimConfig& cfg, const SimulationPlan& plan,
                            const hmm::HmmModel* model, const DemandScript* script) {
  plan.validate();
  std::optional<hmm::HmmModel> own;
  if (plan.mode == AllocationMode::Hmm && model == nullptr) {
    own = train_default_model(cfg, plan);
    model = &*own;
  }
  RandomDrops drops(cfg, plan.n_users, plan.radius_m, plan.seed, script);
  ScenarioReport report = drive(cfg, plan.q, plan.mode, plan.sectored, model, plan.seed,
                                [&](int n) { return drops.next(n); });
  report.n_users = plan.n_users;
  report.radius_m = plan.radius_m;
  return report;
}

ScenarioReport run_scripted(const SimConfig& cfg, std::span<const Deployment> deployments,
                            std::span<const std::vector<Application>> demands,
                            AllocationMode mode, bool sectored, const hmm::HmmModel* model,
                            std::uint64_t seed) {
  if (deployments.size() != demands.size()) {
    throw InvalidPlan("scripted run needs one demand line per deployment");
  }
  ScenarioReport report =
      drive(cfg, static_cast<int>(deployments.size()), mode, sectored, model, seed, [&](int n) {
        const auto i = static_cast<std::size_t>(n - 1);
        return IterationInputs{deployments[i], demands[i], {}};
      });
  if (!deployments.empty()) {
    report.n_users = deployments[0].n_total;
    report.radius_m = deployments[0].sector.radius_m;
  }
  return report;
}

// ---- full-cell snapshot -------------------------------------------------------

CellSnapshot snapshot_cell(const SimConfig& cfg, std::size_t n_users_per_sector, double radius_m,
                           Rng& rng, Application app) {
  cfg.validate();
  CellSnapshot cell;
  const auto geometry = tri_sector_cell(radius_m);
  const int k = rb_demand(app, cfg.policy);
  for (int s = 0; s < 3; ++s) {
    const auto users = deploy_users(geometry[s], n_users_per_sector, rng);
    cell.sectors[s] = form_pairs(users, cfg.radio.d0_m, geometry[s], s);
    const Deployment& dep = cell.sectors[s];
    RbLedger ledger(cfg.radio.n_rb);
    ledger.ensure(dep.c(), 1);
    for (const auto& pair : dep.pairs) {
      if (dep.cellular.empty()) break;
      for (CellularId id : rank_partners(pair, dep.cellular, cfg.radio)) {
        if (!ledger.can_share(id, k, cfg.policy.share_cap)) continue;
        const int before = ledger.share(id, k, cfg.policy.share_cap);
        cell.grants.push_back({pair, k, id, before});
        break;
      }
    }
  }
  return cell;
}

double cell_complexity(const SimConfig& cfg, const CellSnapshot& cell, bool sectored) {
  std::vector<CotierSource> sources;
  sources.reserve(cell.grants.size());
  for (const auto& g : cell.grants) sources.push_back({g.pair, g.k});
  const CotierField field(std::move(sources));

  std::vector<InterferenceBreakdown> bds;
  for (const auto& g : cell.grants) {
    const Deployment& dep = cell.sectors.at(static_cast<std::size_t>(g.pair.sector));
    bds.push_back(InterferenceBreakdown::of(
        bs_interference(g.pair, cfg.radio, dep.sector.apex),
        residual_cellular_interference(g.pair, dep.cellular.at(g.partner), g.holdings_before, g.k,
                                       cfg.radio),
        field.interference_at(g.pair, cfg.radio, sectored)));
  }
  return complexity_metric(bds);
}

}  // namespace d2dsim
