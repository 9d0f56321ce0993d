#include <doctest.h>

#include <sstream>

#include "d2dsim/simulation.hpp"

using namespace d2dsim;

TEST_CASE("random streams") {
  Rng a(5), b(5);
  for (int i = 0; i < 10; ++i) CHECK(a.next() == b.next());
  Rng r(1);
  for (int i = 0; i < 1000; ++i) CHECK(r.below(7) < 7);
  CHECK_THROWS_AS(r.below(0), ContractViolation);
  CHECK(derive_seed(1, 1) != derive_seed(1, 2));
  CHECK(derive_seed(1, 1) != derive_seed(2, 1));
  for (int i = 0; i < 1000; ++i) {
    const double u = r.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("demand scripts") {
  std::istringstream in("# pair slots per iteration\nA1, A2\n\nA3,A1 ,A2  # trailing comment\n");
  const auto s = DemandScript::parse(in);
  REQUIRE(s.iterations.size() == 2);
  CHECK(s.at(1, 0) == Application::A1);
  CHECK(s.at(2, 2) == Application::A2);
  CHECK_FALSE(s.at(1, 2).has_value());
  CHECK_FALSE(s.at(3, 0).has_value());
  CHECK_FALSE(s.at(0, 0).has_value());

  std::istringstream bad("A1, A4\n");
  CHECK_THROWS_WITH_AS(DemandScript::parse(bad), doctest::Contains("line 1"), std::invalid_argument);
  std::istringstream hole("A1,,A2\n");
  CHECK_THROWS_AS(DemandScript::parse(hole), std::invalid_argument);
  CHECK_THROWS_AS(DemandScript::load("/nonexistent/script.txt"), std::invalid_argument);
}

TEST_CASE("plan validation") {
  SimulationPlan p;
  CHECK_NOTHROW(p.validate());
  p.q = 0;
  CHECK_THROWS_AS(p.validate(), InvalidPlan);
  p = {};
  p.replications = 0;
  CHECK_THROWS_AS(p.validate(), InvalidPlan);
  p = {};
  p.radius_m = -1;
  CHECK_THROWS_AS(p.validate(), InvalidPlan);
  CHECK_THROWS_AS(run_scenario(SimConfig{}, SimulationPlan{.q = 0}), InvalidPlan);
}

TEST_CASE("scenarios are deterministic and T_system is the mean of iteration totals") {
  const SimConfig cfg;
  SimulationPlan plan;
  plan.seed = 2024;
  const auto a = run_scenario(cfg, plan);
  const auto b = run_scenario(cfg, plan);
  REQUIRE(a.iterations.size() == 5);
  CHECK(a.t_system_bps == b.t_system_bps);
  CHECK(a.mean_sinr_db == b.mean_sinr_db);
  for (std::size_t n = 0; n < 5; ++n) {
    REQUIRE(a.iterations[n].pairs.size() == b.iterations[n].pairs.size());
    for (std::size_t j = 0; j < a.iterations[n].pairs.size(); ++j) {
      CHECK(a.iterations[n].pairs[j].throughput_bps == b.iterations[n].pairs[j].throughput_bps);
    }
  }
  double sum = 0.0;
  for (const auto& it : a.iterations) sum += it.iteration_total_bps;
  CHECK(a.t_system_bps == sum / 5.0);

  plan.q = 1;
  const auto one = run_scenario(cfg, plan);
  CHECK(one.t_system_bps == one.iterations[0].iteration_total_bps);
}

TEST_CASE("sectoring does not change the drops") {
  const SimConfig cfg;
  SimulationPlan plan;
  plan.seed = 3;
  const auto s = run_scenario(cfg, plan);
  plan.sectored = false;
  const auto u = run_scenario(cfg, plan);
  CHECK(s.pairs_per_iteration == u.pairs_per_iteration);
  for (std::size_t n = 0; n < s.iterations.size(); ++n) {
    CHECK(s.iterations[n].complexity_w <= u.iterations[n].complexity_w);
  }
}

TEST_CASE("a demand script pins the applications") {
  const SimConfig cfg;
  SimulationPlan plan;
  plan.seed = 10;
  std::istringstream in("A2,A2,A2,A2,A2,A2,A2,A2,A2,A2\nA1\n");
  const auto script = DemandScript::parse(in);
  const auto r = run_scenario(cfg, plan, nullptr, &script);
  for (const auto& p : r.iterations[0].pairs) CHECK(p.decision.application == Application::A2);
  if (!r.iterations[1].pairs.empty()) {
    CHECK(r.iterations[1].pairs[0].decision.application == Application::A1);
  }
}

TEST_CASE("HMM mode trains its own model when none is given") {
  const SimConfig cfg;
  SimulationPlan plan;
  plan.seed = 6;
  plan.mode = AllocationMode::Hmm;
  plan.hmm_warmup_scenarios = 5;
  const auto corpus = generate_training_corpus(cfg, plan);
  CHECK_FALSE(corpus.empty());
  for (const auto& seq : corpus) {
    CHECK(seq.states ==
          std::vector<hmm::State>{hmm::State::BaseStation, hmm::State::CellularUser, hmm::State::Pair});
  }
  const auto model = train_default_model(cfg, plan);
  const auto a = run_scenario(cfg, plan);
  const auto b = run_scenario(cfg, plan, &model);
  CHECK(a.t_system_bps == b.t_system_bps);
  CHECK(a.mode == AllocationMode::Hmm);
  for (const auto& it : a.iterations) {
    for (const auto& p : it.pairs) CHECK_FALSE(p.decision.reused_partner);
  }
}

TEST_CASE("cell snapshot complexity") {
  const SimConfig cfg;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Rng rng(seed);
    const auto cell = snapshot_cell(cfg, 50, 500.0, rng);
    CHECK(cell_complexity(cfg, cell, true) <= cell_complexity(cfg, cell, false));
    for (const auto& g : cell.grants) {
      CHECK(g.k == 1);
      CHECK(g.holdings_before >= 2);
    }
  }
}

TEST_CASE("a new pair within D_max raises the complexity") {
  const SimConfig cfg;
  CellSnapshot cell;
  cell.sectors[0].sector = tri_sector_cell(500.0)[0];
  cell.sectors[0].cellular = {{0, {300, 100}, 0}, {1, {350, -100}, 0}};
  const D2DPair a{0, {200, 0}, {210, 0}, 0};
  cell.sectors[0].pairs = {a};
  cell.grants = {{a, 1, 0, 6}};
  const double before = cell_complexity(cfg, cell, true);

  const D2DPair b{1, {230, 0}, {240, 0}, 0};  // midpoints 30 m apart
  cell.sectors[0].pairs.push_back(b);
  cell.grants.push_back({b, 1, 1, 6});
  const double after = cell_complexity(cfg, cell, true);
  CHECK(after > before);

  // The existing pair's own share grew by exactly the co-tier term.
  CHECK(after - before > cotier_interference(a, std::vector<CotierSource>{{b, 1}}, cfg.radio, true));
  CHECK(cell_complexity(cfg, CellSnapshot{}, true) == 0.0);
}
