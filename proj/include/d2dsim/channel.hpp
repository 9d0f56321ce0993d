#pragma once

// Path loss, channel gain and unit conversions. Everything past the config
// boundary is linear: watts and linear gains.

#include <cstdint>

#include "d2dsim/scenario.hpp"

namespace d2dsim {

enum class BsPowerDivision {
  Literal,  // BS interference uses the full BS power
  PerRb,    // BS power divided by the RB grant size
};

struct RadioConfig {
  double p_bs_dbm = 43.0;
  double p_cell_max_dbm = 24.0;
  double p_d2d_max_dbm = 21.0;
  double noise_dbm = -106.0;
  double rb_bandwidth_hz = 180'000.0;
  int n_rb = 6;  // r, RBs per cellular grant
  double d0_m = 20.0;
  double dmax_m = 50.0;
  double fc_mhz = 2000.0;
  double sinr_threshold_db = 0.0;
  BsPowerDivision bs_power_division = BsPowerDivision::Literal;
  /// Log-normal shadowing standard deviation; 0 disables it.
  double shadowing_sigma_db = 0.0;
  std::uint64_t shadowing_seed = 0;

  /// Throws std::invalid_argument naming the first offending field.
  void validate() const;

  friend bool operator==(const RadioConfig&, const RadioConfig&) = default;
};

/// Short-range model for dist <= d0, macro model otherwise. dist in meters.
double path_loss_db(double dist_m, const RadioConfig& cfg);

double gain_from_path_loss(double pl_db);

double dbm_to_watt(double dbm);
double watt_to_dbm(double w);
double db_to_linear(double db);
double linear_to_db(double lin);

/// Shadowing offset in dB for the unordered link {a, b}. Deterministic in
/// (seed, a, b) and symmetric. Zero when shadowing is disabled.
double shadowing_db(Point a, Point b, const RadioConfig& cfg);

/// Linear gain between two locations. Throws std::domain_error when a == b.
double link_gain(Point a, Point b, const RadioConfig& cfg);

}  // namespace d2dsim
