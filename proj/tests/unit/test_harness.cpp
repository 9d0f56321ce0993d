#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "d2dsim/harness.hpp"

using namespace d2dsim;
using namespace d2dsim::harness;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

RunConfig parse(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in, "test.cfg");
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("d2dsim_test_" + name);
  fs::remove_all(dir);
  return dir;
}

RunConfig small(int reps = 6) {
  RunConfig c;
  c.plan.replications = reps;
  c.plan.hmm_warmup_scenarios = 4;
  c.plan.threads = 1;
  return c;
}

}  // namespace

TEST_CASE("an empty config gives the defaults") {
  const RunConfig c = parse("# nothing here\n\n");
  CHECK(c == RunConfig{});
  CHECK(c.sim.radio.n_rb == 6);
  CHECK(c.sim.radio.rb_bandwidth_hz == 180000.0);
  CHECK(c.sim.radio.p_bs_dbm == 43.0);
  CHECK(c.sim.radio.d0_m == 20.0);
  CHECK(c.sim.radio.dmax_m == 50.0);
  CHECK(c.sim.radio.noise_dbm == -106.0);
  CHECK(serialize_config(c) == slurp(fs::path(D2DSIM_GOLDEN_DIR) / "default_config.txt"));
}

TEST_CASE("config errors") {
  CHECK_THROWS_WITH_AS(parse("n_rb = 0\n"), doctest::Contains("n_rb"), ConfigError);
  CHECK_THROWS_WITH_AS(parse("q = 3\nwarp = 9\n"), doctest::Contains("test.cfg:2"), ConfigError);
  CHECK_THROWS_WITH_AS(parse("q = 3\nwarp = 9\n"), doctest::Contains("warp"), ConfigError);
  CHECK_THROWS_WITH_AS(parse("\n\nradius_m 500\n"), doctest::Contains("test.cfg:3"), ConfigError);
  CHECK_THROWS_WITH_AS(parse("radius_m = far\n"), doctest::Contains("radius_m"), ConfigError);
  CHECK_THROWS_WITH_AS(parse("q = 0\n"), doctest::Contains("q"), ConfigError);
  CHECK_THROWS_WITH_AS(parse("a2_rb = 6\n"), doctest::Contains("a2_rb"), ConfigError);
  CHECK_THROWS_WITH_AS(parse("mode = greedy\n"), doctest::Contains("mode"), ConfigError);
  CHECK_THROWS_WITH_AS(parse("q = 2\nq = 3\n"), doctest::Contains("duplicate"), ConfigError);
  CHECK_THROWS_AS(parse("seed = -1\n"), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/d2dsim.cfg"), ConfigError);
}

TEST_CASE("config round trip") {
  const RunConfig c = parse(
      "p_bs_dbm = -inf\nnoise_dbm = -106.5\nfc_mhz = 2100.125\nn_users = 50\nradius_m = 1000\n"
      "q = 4\nseed = 18446744073709551615\nmode = hmm\nsectored = false\nshare_cap = grant_size\n"
      "bs_power_division = per_rb\nshadowing_sigma_db = 0.1\nshadowing_seed = 3\na2_rb = 2\n"
      "demand_script = /tmp/demands.txt\nreplications = 7\nthreads = 2\n"
      "hmm_training_partner = best_gain\n");
  CHECK(c.plan.seed == 18446744073709551615ULL);
  CHECK(c.sim.radio.shadowing_sigma_db == 0.1);
  const RunConfig again = parse(serialize_config(c));
  CHECK(again == c);
  CHECK(serialize_config(again) == serialize_config(c));
}

TEST_CASE("relative demand scripts resolve against the config file") {
  const auto dir = scratch("relcfg");
  fs::create_directories(dir / "sub");
  std::ofstream(dir / "sub" / "run.cfg") << "demand_script = demands.txt\n";
  const RunConfig c = load_config((dir / "sub" / "run.cfg").string());
  CHECK(fs::path(c.plan.demand_script) == (dir / "sub" / "demands.txt").lexically_normal());
}

TEST_CASE("intervals and the paired test") {
  const std::vector<double> one{3.0};
  const auto ci1 = mean_ci95(one);
  CHECK(ci1.mean == 3.0);
  CHECK(ci1.lo == 3.0);
  CHECK(ci1.hi == 3.0);

  // t(0.975, 4) = 2.7764451051977987
  const std::vector<double> xs{1, 2, 3, 4, 5};
  const auto ci = mean_ci95(xs);
  CHECK(ci.mean == 3.0);
  CHECK(ci.hi - ci.mean == doctest::Approx(2.7764451051977987 * std::sqrt(2.5 / 5.0)).epsilon(1e-12));

  const std::vector<double> a{5, 6, 7, 8, 9, 10}, b{1, 2, 3, 4, 5, 7};
  CHECK(paired_t_greater(a, b) < 0.001);
  CHECK(paired_t_greater(b, a) > 0.999);
  CHECK_THROWS(paired_t_greater(a, one));
}

TEST_CASE("preset names") {
  for (auto p : {Preset::PairsVsRadius, Preset::ThroughputVsIterations, Preset::ModeComparison,
                 Preset::ComplexityVsPairs, Preset::MosTable}) {
    CHECK(parse_preset(to_string(p)) == p);
  }
  CHECK_THROWS_AS(parse_preset("fig-99"), std::invalid_argument);
  CHECK_THROWS_AS(run_preset("fig-99", small(), scratch("bad").string()), std::invalid_argument);
}

TEST_CASE("CSV column schema matches the golden file") {
  std::map<std::string, std::string> golden;
  std::ifstream in(fs::path(D2DSIM_GOLDEN_DIR) / "columns.txt");
  for (std::string line; std::getline(in, line);) {
    const auto colon = line.find(": ");
    golden[line.substr(0, colon)] = line.substr(colon + 2);
  }
  const auto dir = scratch("schema");
  for (auto p : {Preset::PairsVsRadius, Preset::ThroughputVsIterations, Preset::ModeComparison,
                 Preset::ComplexityVsPairs, Preset::MosTable}) {
    const std::string name(to_string(p));
    CAPTURE(name);
    const auto paths = run_preset(name, small(3), dir.string());
    REQUIRE(paths.size() == 2);
    for (std::size_t i = 0; i < 2; ++i) {
      std::ifstream f(paths[i]);
      std::string line, first_data;
      std::vector<std::string> header;
      while (std::getline(f, line) && line.rfind("#", 0) == 0) header.push_back(line);
      CHECK(line == golden[i == 0 ? name : "summary"]);
      REQUIRE_FALSE(header.empty());
      CHECK(header[0] == "# d2dsim " + name + (i ? " summary" : ""));
      CHECK(header.size() == 1 + 27);  // every key except the thread count
      CHECK(std::getline(f, first_data));  // at least one row
    }
  }
}

TEST_CASE("every report header replays to the same config") {
  const auto dir = scratch("replay");
  RunConfig c = small(2);
  c.plan.seed = 99;
  c.plan.n_users = 40;
  const auto paths = run_preset("pairs-vs-radius", c, dir.string());
  std::ifstream f(paths[0]);
  std::string cfg_text, line;
  std::getline(f, line);  // title
  while (std::getline(f, line) && line.rfind("# ", 0) == 0) cfg_text += line.substr(2) + "\n";
  RunConfig replay = parse(cfg_text);
  replay.plan.threads = c.plan.threads;
  CHECK(replay == c);
}

TEST_CASE("presets are byte-identical across runs and thread counts") {
  for (const char* name : {"throughput-vs-iterations", "mode-comparison", "complexity-vs-pairs",
                           "pairs-vs-radius", "mos-table"}) {
    CAPTURE(name);
    RunConfig c = small(8);
    const auto a = run_preset(name, c, scratch("det_a").string());
    c.plan.threads = 3;
    const auto b = run_preset(name, c, scratch("det_b").string());
    for (std::size_t i = 0; i < 2; ++i) CHECK(slurp(a[i]) == slurp(b[i]));
  }
}

TEST_CASE("complexity rows never have sectored above unsectored") {
  const auto out = run_preset(Preset::ComplexityVsPairs, small(20));
  REQUIRE(out.experiment.rows.size() == 60);
  for (const auto& row : out.experiment.rows) {
    CHECK(std::stod(row[3]) <= std::stod(row[4]));
  }
}

TEST_CASE("unwritable output directory") {
  const auto dir = scratch("blocked");
  fs::create_directories(dir);
  std::ofstream(dir / "file") << "x";
  CHECK_THROWS_AS(run_preset("pairs-vs-radius", small(1), (dir / "file" / "out").string()),
                  std::runtime_error);
}

TEST_CASE("command line front end") {
  const auto dir = scratch("cli");
  fs::create_directories(dir);
  std::ofstream(dir / "run.cfg") << "replications = 3\nhmm_warmup_scenarios = 2\nthreads = 1\n";
  const std::string cli = D2DSIM_CLI;
  const std::string base = cli + " run --config " + (dir / "run.cfg").string() + " --out " +
                           (dir / "out").string();
  CHECK(std::system((base + " --preset mode-comparison --seed 5 --no-sector > /dev/null").c_str()) == 0);
  const auto text = slurp(dir / "out" / "mode-comparison.csv");
  CHECK(text.find("# seed = 5\n") != std::string::npos);
  CHECK(text.find("# sectored = false\n") != std::string::npos);

  CHECK(std::system((base + " --preset throughput-vs-iterations --mode hmm > /dev/null").c_str()) == 0);
  CHECK(slurp(dir / "out" / "throughput-vs-iterations.csv").find(",hmm\n") != std::string::npos);

  CHECK(std::system((base + " --preset nope > /dev/null 2>&1").c_str()) != 0);
  CHECK(std::system((cli + " hmm-train --config " + (dir / "run.cfg").string() + " --out " +
                     (dir / "model.txt").string())
                        .c_str()) == 0);
  std::ifstream model(dir / "model.txt");
  CHECK(hmm::load(model).trained);
}
