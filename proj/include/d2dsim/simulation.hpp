#pragma once

// Multi-iteration scenarios: fresh user drops every iteration, with the RB
// ledger and lending chains persisting across iterations by slot index.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "d2dsim/allocation.hpp"
#include "d2dsim/hmm.hpp"
#include "d2dsim/metrics.hpp"

namespace d2dsim {

struct SimConfig {
  RadioConfig radio;
  AllocationPolicy policy;

  void validate() const;
  friend bool operator==(const SimConfig&, const SimConfig&) = default;
};

/// One line per iteration, comma separated application tags; position on
/// the line is the pair slot. Blank lines and '#' comments are skipped.
struct DemandScript {
  std::vector<std::vector<Application>> iterations;

  static DemandScript parse(std::istream& is);
  static DemandScript load(const std::string& path);

  /// Scripted demand, if the script covers (iteration, slot). iteration is 1-based.
  std::optional<Application> at(int iteration, PairId slot) const;

  friend bool operator==(const DemandScript&, const DemandScript&) = default;
};

struct SimulationPlan {
  std::size_t n_users = 30;  // per sector
  double radius_m = 500.0;
  int q = 5;
  std::uint64_t seed = 1;
  AllocationMode mode = AllocationMode::Sbrra;
  bool sectored = true;
  std::string demand_script;  // optional path
  int replications = 100;
  int hmm_warmup_scenarios = 20;
  /// Lender choice in the warm-up runs the HMM is trained on.
  PartnerSelection hmm_training_partner = PartnerSelection::Random;
  int threads = 0;  // 0: hardware concurrency

  void validate() const;
  friend bool operator==(const SimulationPlan&, const SimulationPlan&) = default;
};

class InvalidPlan : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Random streams derived from a scenario seed.
enum class Stream : std::uint64_t {
  Deploy = 1,
  NeighbourDeploy = 2,
  Demand = 3,
  HmmAllocate = 4,
  NeighbourDemand = 5,
  HmmTraining = 6,
  Partner = 7,
};

Rng make_stream(std::uint64_t seed, Stream s);

/// Labelled grant traces from geometric warm-up runs (uniformly random
/// lenders unless the plan says otherwise).
/// Each served grant yields the path BS -> cellular user -> pair, every
/// state emitting the grant's (application, SINR bucket) symbol.
std::vector<hmm::LabeledSequence> generate_training_corpus(const SimConfig& cfg,
                                                           const SimulationPlan& plan,
                                                           const hmm::Alphabet& alphabet = {});

/// HMM trained on generate_training_corpus().
hmm::HmmModel train_default_model(const SimConfig& cfg, const SimulationPlan& plan);

/// Runs plan.q iterations. In HMM mode `model` is used if given, otherwise a
/// model is trained from the plan's seed first. The demand script, if any,
/// must already be parsed into `script`.
ScenarioReport run_scenario(const SimConfig& cfg, const SimulationPlan& plan,
                            const hmm::HmmModel* model = nullptr,
                            const DemandScript* script = nullptr);

/// Replays fixed deployments and demands, one entry per iteration.
ScenarioReport run_scripted(const SimConfig& cfg, std::span<const Deployment> deployments,
                            std::span<const std::vector<Application>> demands,
                            AllocationMode mode = AllocationMode::Sbrra, bool sectored = true,
                            const hmm::HmmModel* model = nullptr, std::uint64_t seed = 0);

/// Fills the report's summary fields from its iterations.
void summarize(ScenarioReport& report);

/// Every pair of a full tri-sector cell demanding `app`, each taking the
/// head of its gain ranking from a fresh ledger. Used for the sectored vs
/// unsectored interference comparison.
struct CellGrant {
  D2DPair pair;
  int k = 1;
  CellularId partner = kNone;
  int holdings_before = 0;
};

struct CellSnapshot {
  std::array<Deployment, 3> sectors;
  std::vector<CellGrant> grants;  // pairs that found a lender, sector by sector
};

CellSnapshot snapshot_cell(const SimConfig& cfg, std::size_t n_users_per_sector, double radius_m,
                           Rng& rng, Application app = Application::A3);

/// Aggregate interference over every active pair of the snapshot.
double cell_complexity(const SimConfig& cfg, const CellSnapshot& cell, bool sectored);

}  // namespace d2dsim
