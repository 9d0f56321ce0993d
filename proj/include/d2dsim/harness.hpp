#pragma once

// Config files, experiment presets and CSV output.
//
// Config files are `key = value` lines with '#' comments; every key is
// optional and unknown keys are rejected. The resolved config is echoed as a
// '#' header at the top of every CSV so a report can be replayed from itself.

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "d2dsim/simulation.hpp"

namespace d2dsim::harness {

struct RunConfig {
  SimConfig sim;
  SimulationPlan plan;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Applies one key. Throws ConfigError naming the key on unknown keys or bad values.
void set_key(RunConfig& cfg, std::string_view key, std::string_view value);

/// Parses and validates. `origin` prefixes error messages (usually the path).
RunConfig parse_config(std::istream& is, const std::string& origin = "config");

/// A relative demand_script path is resolved against the config file's directory.
RunConfig load_config(const std::string& path);

/// Every key, one per line, in a fixed order. parse_config(serialize_config(c)) == c.
std::string serialize_config(const RunConfig& cfg);

std::string format_double(double v);

// ---- statistics --------------------------------------------------------------

struct Interval {
  std::size_t n = 0;
  double mean = 0.0;
  double lo = 0.0;
  double hi = 0.0;
};

/// Mean with a two-sided 95% Student t interval. For n < 2 the interval collapses to the mean.
Interval mean_ci95(std::span<const double> xs);

/// One-sided paired t-test of mean(a - b) > 0; returns the p-value.
double paired_t_greater(std::span<const double> a, std::span<const double> b);

// ---- presets -----------------------------------------------------------------

enum class Preset {
  PairsVsRadius,
  ThroughputVsIterations,
  ModeComparison,
  ComplexityVsPairs,
  MosTable,
};

std::string_view to_string(Preset p);
Preset parse_preset(std::string_view name);

inline constexpr std::array<double, 3> kRadiusSweep{500.0, 1000.0, 2000.0};
inline constexpr std::array<std::size_t, 3> kUserSweep{30, 50, 100};

/// Pair counts of the reference sector for every (replication, iteration, radius).
struct RadiusSample {
  int replication = 0;
  int iteration = 0;
  double radius_m = 0.0;
  std::size_t pairs = 0;
  std::size_t cellular = 0;
};
std::vector<RadiusSample> sample_pairs_vs_radius(const RunConfig& cfg,
                                                 std::span<const double> radii = kRadiusSweep);

struct ComplexitySample {
  int replication = 0;
  std::size_t n_users = 0;
  std::size_t pairs = 0;
  double sectored_w = 0.0;
  double unsectored_w = 0.0;
};
std::vector<ComplexitySample> sample_complexity(const RunConfig& cfg,
                                                std::span<const std::size_t> users = kUserSweep);

/// One scenario per replication (seed + index), run on the configured
/// number of threads; the result order never depends on scheduling.
std::vector<ScenarioReport> run_replications(const RunConfig& cfg, AllocationMode mode,
                                             const hmm::HmmModel* model,
                                             const DemandScript* script);

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

struct PresetOutput {
  Table experiment;
  Table summary;  // group, metric, n, mean, ci95_lo, ci95_hi
};

PresetOutput run_preset(Preset preset, const RunConfig& cfg);

/// Header comment block, column row, data rows.
void write_csv(std::ostream& os, const Table& table, const RunConfig& cfg, std::string_view title);

/// Runs the preset and writes <out_dir>/<name>.csv and <name>_summary.csv.
/// Returns the two paths.
std::vector<std::string> run_preset(std::string_view name, const RunConfig& cfg,
                                    const std::string& out_dir);

}  // namespace d2dsim::harness
