#include "d2dsim/channel.hpp"

#include <bit>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>

namespace d2dsim {

void RadioConfig::validate() const {
  auto require = [](bool ok, const char* name) {
    if (!ok) throw std::invalid_argument(std::string("invalid value for ") + name);
  };
  require(!std::isnan(p_bs_dbm) && p_bs_dbm < HUGE_VAL, "p_bs_dbm");
  require(std::isfinite(p_cell_max_dbm), "p_cell_max_dbm");
  require(std::isfinite(p_d2d_max_dbm), "p_d2d_max_dbm");
  require(std::isfinite(noise_dbm), "noise_dbm");
  require(std::isfinite(rb_bandwidth_hz) && rb_bandwidth_hz > 0.0, "rb_bandwidth_hz");
  require(n_rb >= 2, "n_rb");
  require(std::isfinite(d0_m) && d0_m > 0.0, "d0_m");
  require(std::isfinite(dmax_m) && dmax_m > d0_m, "dmax_m");
  require(std::isfinite(fc_mhz) && fc_mhz > 0.0, "fc_mhz");
  require(std::isfinite(sinr_threshold_db), "sinr_threshold_db");
  require(std::isfinite(shadowing_sigma_db) && shadowing_sigma_db >= 0.0, "shadowing_sigma_db");
}

double path_loss_db(double dist_m, const RadioConfig& cfg) {
  if (!(dist_m > 0.0)) {
    throw std::domain_error("path loss needs a positive distance (co-located endpoints)");
  }
  const double d_km = dist_m / 1000.0;
  if (dist_m <= cfg.d0_m) {
    return 40.0 * std::log10(d_km) + 30.0 * std::log10(cfg.fc_mhz) + 49.0;
  }
  return 148.1 + 37.6 * std::log10(d_km);
}

double gain_from_path_loss(double pl_db) { return std::pow(10.0, -pl_db / 10.0); }

double dbm_to_watt(double dbm) { return std::pow(10.0, dbm / 10.0) / 1000.0; }

double watt_to_dbm(double w) { return 10.0 * std::log10(w * 1000.0); }

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

double linear_to_db(double lin) { return 10.0 * std::log10(lin); }

namespace {

std::uint64_t splitmix(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t hash_point(Point p) {
  return splitmix(std::bit_cast<std::uint64_t>(p.x) ^ splitmix(std::bit_cast<std::uint64_t>(p.y)));
}

}  // namespace

double shadowing_db(Point a, Point b, const RadioConfig& cfg) {
  if (cfg.shadowing_sigma_db == 0.0) return 0.0;
  std::uint64_t ha = hash_point(a);
  std::uint64_t hb = hash_point(b);
  if (ha > hb) std::swap(ha, hb);
  const std::uint64_t h1 = splitmix(cfg.shadowing_seed ^ ha ^ splitmix(hb));
  const std::uint64_t h2 = splitmix(h1);
  // Box-Muller on two 53-bit uniforms; u1 kept away from zero.
  const double u1 = (static_cast<double>(h1 >> 11) + 1.0) * 0x1.0p-53;
  const double u2 = static_cast<double>(h2 >> 11) * 0x1.0p-53;
  const double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  return cfg.shadowing_sigma_db * z;
}

double link_gain(Point a, Point b, const RadioConfig& cfg) {
  const double pl = path_loss_db(distance(a, b), cfg);
  if (cfg.shadowing_sigma_db == 0.0) return gain_from_path_loss(pl);
  return gain_from_path_loss(pl + shadowing_db(a, b, cfg));
}

}  // namespace d2dsim
