// Command line front end: run experiment presets, train and inspect HMM models.

#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "d2dsim/harness.hpp"
#include "d2dsim/kernels.hpp"

using namespace d2dsim;

int main(int argc, char** argv) {
  CLI::App app{"D2D resource block allocation simulator"};
  app.require_subcommand(1);

  std::string config_path;
  std::string preset;
  std::string out_dir;
  std::uint64_t seed = 0;
  std::string mode;
  bool no_sector = false;
  int threads = -1;

  auto* run = app.add_subcommand("run", "run an experiment preset and write CSV files");
  run->add_option("--config", config_path, "config file (key = value)")->check(CLI::ExistingFile);
  run->add_option("--preset", preset, "pairs-vs-radius | throughput-vs-iterations | "
                                      "mode-comparison | complexity-vs-pairs | mos-table")
      ->required();
  run->add_option("--out", out_dir, "output directory")->required();
  auto* seed_opt = run->add_option("--seed", seed, "base seed (overrides the config)");
  run->add_option("--mode", mode, "sbrra | hmm (overrides the config)")
      ->check(CLI::IsMember({"sbrra", "hmm"}));
  run->add_flag("--no-sector", no_sector, "let co-tier interference cross sector borders");
  run->add_option("--threads", threads, "worker threads, 0 for all cores");

  std::string model_out;
  auto* train = app.add_subcommand("hmm-train", "train the HMM baseline and save the model");
  train->add_option("--config", config_path, "config file (key = value)")->check(CLI::ExistingFile);
  train->add_option("--out", model_out, "model file")->required();
  auto* train_seed = train->add_option("--seed", seed, "base seed (overrides the config)");

  auto* show = app.add_subcommand("show-config", "print the resolved config");
  show->add_option("--config", config_path, "config file (key = value)")->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    harness::RunConfig cfg;
    if (!config_path.empty()) cfg = harness::load_config(config_path);

    if (*run) {
      if (*seed_opt) cfg.plan.seed = seed;
      if (!mode.empty()) cfg.plan.mode = parse_mode(mode);
      if (no_sector) cfg.plan.sectored = false;
      if (threads >= 0) cfg.plan.threads = threads;
      for (const auto& path : harness::run_preset(preset, cfg, out_dir)) {
        std::cout << path << "\n";
      }
    } else if (*train) {
      if (*train_seed) cfg.plan.seed = seed;
      const auto model = train_default_model(cfg.sim, cfg.plan);
      std::ofstream f(model_out);
      if (!f) throw std::runtime_error("cannot write '" + model_out + "'");
      hmm::save(model, f);
    } else if (*show) {
      std::cout << "# geometry kernels: " << kernels::to_string(kernels::active().isa) << "\n"
                << harness::serialize_config(cfg);
    }
  } catch (const std::exception& e) {
    std::cerr << "d2dsim: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
