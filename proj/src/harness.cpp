#include "d2dsim/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

#include <boost/math/distributions/students_t.hpp>

namespace d2dsim::harness {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value) {
  throw ConfigError("invalid value for " + std::string(key) + ": '" + std::string(value) + "'");
}

double parse_double(std::string_view key, std::string_view v) {
  double out = 0.0;
  // from_chars does not accept a leading '+'.
  std::string_view body = (!v.empty() && v.front() == '+') ? v.substr(1) : v;
  const auto [ptr, ec] = std::from_chars(body.data(), body.data() + body.size(), out);
  if (ec != std::errc{} || ptr != body.data() + body.size() || body.empty()) bad_value(key, v);
  return out;
}

template <class Int>
Int parse_int(std::string_view key, std::string_view v) {
  Int out{};
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size() || v.empty()) bad_value(key, v);
  return out;
}

bool parse_bool(std::string_view key, std::string_view v) {
  if (v == "true" || v == "yes" || v == "1") return true;
  if (v == "false" || v == "no" || v == "0") return false;
  bad_value(key, v);
}

std::string fmt_bool(bool b) { return b ? "true" : "false"; }

template <class Int>
std::string fmt_int(Int v) {
  return std::to_string(v);
}

struct Key {
  std::string_view name;
  std::function<void(RunConfig&, std::string_view)> set;
  std::function<std::string(const RunConfig&)> get;
};

#define D2D_DOUBLE_KEY(name, field)                                                  \
  Key {                                                                              \
    name, [](RunConfig& c, std::string_view v) { c.field = parse_double(name, v); }, \
        [](const RunConfig& c) { return format_double(c.field); }                    \
  }

const std::vector<Key>& keys() {
  static const std::vector<Key> table = {
      D2D_DOUBLE_KEY("p_bs_dbm", sim.radio.p_bs_dbm),
      D2D_DOUBLE_KEY("p_cell_max_dbm", sim.radio.p_cell_max_dbm),
      D2D_DOUBLE_KEY("p_d2d_max_dbm", sim.radio.p_d2d_max_dbm),
      D2D_DOUBLE_KEY("noise_dbm", sim.radio.noise_dbm),
      D2D_DOUBLE_KEY("rb_bandwidth_hz", sim.radio.rb_bandwidth_hz),
      {"n_rb", [](RunConfig& c, std::string_view v) { c.sim.radio.n_rb = parse_int<int>("n_rb", v); },
       [](const RunConfig& c) { return fmt_int(c.sim.radio.n_rb); }},
      D2D_DOUBLE_KEY("d0_m", sim.radio.d0_m),
      D2D_DOUBLE_KEY("dmax_m", sim.radio.dmax_m),
      D2D_DOUBLE_KEY("fc_mhz", sim.radio.fc_mhz),
      D2D_DOUBLE_KEY("sinr_threshold_db", sim.radio.sinr_threshold_db),
      {"bs_power_division",
       [](RunConfig& c, std::string_view v) {
         if (v == "literal") c.sim.radio.bs_power_division = BsPowerDivision::Literal;
         else if (v == "per_rb") c.sim.radio.bs_power_division = BsPowerDivision::PerRb;
         else bad_value("bs_power_division", v);
       },
       [](const RunConfig& c) {
         return std::string(c.sim.radio.bs_power_division == BsPowerDivision::Literal ? "literal"
                                                                                      : "per_rb");
       }},
      D2D_DOUBLE_KEY("shadowing_sigma_db", sim.radio.shadowing_sigma_db),
      {"shadowing_seed",
       [](RunConfig& c, std::string_view v) {
         c.sim.radio.shadowing_seed = parse_int<std::uint64_t>("shadowing_seed", v);
       },
       [](const RunConfig& c) { return fmt_int(c.sim.radio.shadowing_seed); }},
      {"a1_rb", [](RunConfig& c, std::string_view v) { c.sim.policy.rb_demand[0] = parse_int<int>("a1_rb", v); },
       [](const RunConfig& c) { return fmt_int(c.sim.policy.rb_demand[0]); }},
      {"a2_rb", [](RunConfig& c, std::string_view v) { c.sim.policy.rb_demand[1] = parse_int<int>("a2_rb", v); },
       [](const RunConfig& c) { return fmt_int(c.sim.policy.rb_demand[1]); }},
      {"a3_rb", [](RunConfig& c, std::string_view v) { c.sim.policy.rb_demand[2] = parse_int<int>("a3_rb", v); },
       [](const RunConfig& c) { return fmt_int(c.sim.policy.rb_demand[2]); }},
      {"share_cap",
       [](RunConfig& c, std::string_view v) {
         if (v == "retain_one") c.sim.policy.share_cap = ShareCap::RetainOne;
         else if (v == "grant_size") c.sim.policy.share_cap = ShareCap::GrantSize;
         else bad_value("share_cap", v);
       },
       [](const RunConfig& c) {
         return std::string(c.sim.policy.share_cap == ShareCap::RetainOne ? "retain_one"
                                                                          : "grant_size");
       }},
      {"n_users",
       [](RunConfig& c, std::string_view v) { c.plan.n_users = parse_int<std::size_t>("n_users", v); },
       [](const RunConfig& c) { return fmt_int(c.plan.n_users); }},
      D2D_DOUBLE_KEY("radius_m", plan.radius_m),
      {"q", [](RunConfig& c, std::string_view v) { c.plan.q = parse_int<int>("q", v); },
       [](const RunConfig& c) { return fmt_int(c.plan.q); }},
      {"seed", [](RunConfig& c, std::string_view v) { c.plan.seed = parse_int<std::uint64_t>("seed", v); },
       [](const RunConfig& c) { return fmt_int(c.plan.seed); }},
      {"mode",
       [](RunConfig& c, std::string_view v) {
         try {
           c.plan.mode = parse_mode(v);
         } catch (const std::invalid_argument&) {
           bad_value("mode", v);
         }
       },
       [](const RunConfig& c) { return std::string(to_string(c.plan.mode)); }},
      {"sectored", [](RunConfig& c, std::string_view v) { c.plan.sectored = parse_bool("sectored", v); },
       [](const RunConfig& c) { return fmt_bool(c.plan.sectored); }},
      {"demand_script", [](RunConfig& c, std::string_view v) { c.plan.demand_script = std::string(v); },
       [](const RunConfig& c) { return c.plan.demand_script; }},
      {"replications",
       [](RunConfig& c, std::string_view v) { c.plan.replications = parse_int<int>("replications", v); },
       [](const RunConfig& c) { return fmt_int(c.plan.replications); }},
      {"hmm_warmup_scenarios",
       [](RunConfig& c, std::string_view v) {
         c.plan.hmm_warmup_scenarios = parse_int<int>("hmm_warmup_scenarios", v);
       },
       [](const RunConfig& c) { return fmt_int(c.plan.hmm_warmup_scenarios); }},
      {"hmm_training_partner",
       [](RunConfig& c, std::string_view v) {
         if (v == "random") c.plan.hmm_training_partner = PartnerSelection::Random;
         else if (v == "best_gain") c.plan.hmm_training_partner = PartnerSelection::BestGain;
         else bad_value("hmm_training_partner", v);
       },
       [](const RunConfig& c) {
         return std::string(c.plan.hmm_training_partner == PartnerSelection::Random ? "random"
                                                                                    : "best_gain");
       }},
      {"threads", [](RunConfig& c, std::string_view v) { c.plan.threads = parse_int<int>("threads", v); },
       [](const RunConfig& c) { return fmt_int(c.plan.threads); }},
  };
  return table;
}

#undef D2D_DOUBLE_KEY

void validate(const RunConfig& cfg) {
  try {
    cfg.sim.validate();
    cfg.plan.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

void set_key(RunConfig& cfg, std::string_view key, std::string_view value) {
  for (const auto& k : keys()) {
    if (k.name == key) {
      k.set(cfg, value);
      return;
    }
  }
  throw ConfigError("unknown key '" + std::string(key) + "'");
}

RunConfig parse_config(std::istream& is, const std::string& origin) {
  RunConfig cfg;
  std::string raw;
  int line_no = 0;
  std::vector<std::string> seen;
  while (std::getline(is, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;
    const auto where = origin + ":" + std::to_string(line_no) + ": ";
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError(where + "expected 'key = value'");
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(where + "missing key");
    if (std::find(seen.begin(), seen.end(), key) != seen.end()) {
      throw ConfigError(where + "duplicate key '" + std::string(key) + "'");
    }
    seen.emplace_back(key);
    try {
      set_key(cfg, key, value);
    } catch (const ConfigError& e) {
      throw ConfigError(where + e.what());
    }
  }
  validate(cfg);
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  RunConfig cfg = parse_config(in, path);
  namespace fs = std::filesystem;
  if (!cfg.plan.demand_script.empty() && fs::path(cfg.plan.demand_script).is_relative()) {
    cfg.plan.demand_script =
        (fs::path(path).parent_path() / cfg.plan.demand_script).lexically_normal().string();
  }
  return cfg;
}

std::string serialize_config(const RunConfig& cfg) {
  std::string out;
  for (const auto& k : keys()) {
    const std::string value = k.get(cfg);
    out += std::string(k.name) + (value.empty() ? " =" : " = ") + value + "\n";
  }
  return out;
}

// ---- statistics ----------------------------------------------------------------

Interval mean_ci95(std::span<const double> xs) {
  Interval ci;
  ci.n = xs.size();
  if (xs.empty()) return ci;
  ci.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(ci.n);
  ci.lo = ci.hi = ci.mean;
  if (ci.n < 2) return ci;
  double ss = 0.0;
  for (double x : xs) ss += (x - ci.mean) * (x - ci.mean);
  const double sd = std::sqrt(ss / static_cast<double>(ci.n - 1));
  const boost::math::students_t dist(static_cast<double>(ci.n - 1));
  const double half = boost::math::quantile(boost::math::complement(dist, 0.025)) * sd /
                      std::sqrt(static_cast<double>(ci.n));
  ci.lo = ci.mean - half;
  ci.hi = ci.mean + half;
  return ci;
}

double paired_t_greater(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.size() < 2) {
    throw std::invalid_argument("paired test needs two equally long samples of size >= 2");
  }
  std::vector<double> d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  const double n = static_cast<double>(d.size());
  const double mean = std::accumulate(d.begin(), d.end(), 0.0) / n;
  double ss = 0.0;
  for (double x : d) ss += (x - mean) * (x - mean);
  const double se = std::sqrt(ss / (n - 1.0) / n);
  if (se == 0.0) return mean > 0.0 ? 0.0 : 1.0;
  const boost::math::students_t dist(n - 1.0);
  return boost::math::cdf(boost::math::complement(dist, mean / se));
}

// ---- presets -------------------------------------------------------------------

std::string_view to_string(Preset p) {
  switch (p) {
    case Preset::PairsVsRadius: return "pairs-vs-radius";
    case Preset::ThroughputVsIterations: return "throughput-vs-iterations";
    case Preset::ModeComparison: return "mode-comparison";
    case Preset::ComplexityVsPairs: return "complexity-vs-pairs";
    case Preset::MosTable: return "mos-table";
  }
  return "?";
}

Preset parse_preset(std::string_view name) {
  for (Preset p : {Preset::PairsVsRadius, Preset::ThroughputVsIterations, Preset::ModeComparison,
                   Preset::ComplexityVsPairs, Preset::MosTable}) {
    if (to_string(p) == name) return p;
  }
  throw std::invalid_argument("unknown preset '" + std::string(name) + "'");
}

namespace {

/// Runs body(i) for i in [0, n) on up to `threads` workers. The first
/// exception thrown by any worker is rethrown after all of them finish.
void parallel_for(int n, int threads, const std::function<void(int)>& body) {
  unsigned workers = threads > 0 ? static_cast<unsigned>(threads)
                                 : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, static_cast<unsigned>(std::max(n, 1)));
  if (workers <= 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int i = next++; i < n; i = next++) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          next = n;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

std::uint64_t replication_seed(const RunConfig& cfg, int rep) {
  return cfg.plan.seed + static_cast<std::uint64_t>(rep);
}

}  // namespace

std::vector<RadiusSample> sample_pairs_vs_radius(const RunConfig& cfg,
                                                 std::span<const double> radii) {
  validate(cfg);
  const int reps = cfg.plan.replications;
  std::vector<std::vector<RadiusSample>> slots(static_cast<std::size_t>(reps));
  parallel_for(reps, cfg.plan.threads, [&](int rep) {
    auto& out = slots[static_cast<std::size_t>(rep)];
    for (double radius : radii) {
      // Same stream as run_scenario, so these are the drops a scenario would see.
      Rng deploy = make_stream(replication_seed(cfg, rep), Stream::Deploy);
      const SectorGeometry sector = tri_sector_cell(radius)[0];
      for (int n = 1; n <= cfg.plan.q; ++n) {
        const auto users = deploy_users(sector, cfg.plan.n_users, deploy);
        const auto dep = form_pairs(users, cfg.sim.radio.d0_m, sector, 0);
        out.push_back({rep, n, radius, dep.d(), dep.c()});
      }
    }
  });
  std::vector<RadiusSample> all;
  for (auto& s : slots) all.insert(all.end(), s.begin(), s.end());
  return all;
}

std::vector<ComplexitySample> sample_complexity(const RunConfig& cfg,
                                                std::span<const std::size_t> users) {
  validate(cfg);
  const int reps = cfg.plan.replications;
  std::vector<std::vector<ComplexitySample>> slots(static_cast<std::size_t>(reps));
  parallel_for(reps, cfg.plan.threads, [&](int rep) {
    auto& out = slots[static_cast<std::size_t>(rep)];
    for (std::size_t n_users : users) {
      Rng rng = make_stream(replication_seed(cfg, rep), Stream::Deploy);
      const auto cell = snapshot_cell(cfg.sim, n_users, cfg.plan.radius_m, rng);
      out.push_back({rep, n_users, cell.grants.size(), cell_complexity(cfg.sim, cell, true),
                     cell_complexity(cfg.sim, cell, false)});
    }
  });
  std::vector<ComplexitySample> all;
  for (auto& s : slots) all.insert(all.end(), s.begin(), s.end());
  return all;
}

std::vector<ScenarioReport> run_replications(const RunConfig& cfg, AllocationMode mode,
                                             const hmm::HmmModel* model,
                                             const DemandScript* script) {
  validate(cfg);
  std::optional<hmm::HmmModel> own;
  if (mode == AllocationMode::Hmm && model == nullptr) {
    own = train_default_model(cfg.sim, cfg.plan);
    model = &*own;
  }
  std::vector<ScenarioReport> reports(static_cast<std::size_t>(cfg.plan.replications));
  parallel_for(cfg.plan.replications, cfg.plan.threads, [&](int rep) {
    SimulationPlan plan = cfg.plan;
    plan.seed = replication_seed(cfg, rep);
    plan.mode = mode;
    reports[static_cast<std::size_t>(rep)] = run_scenario(cfg.sim, plan, model, script);
  });
  return reports;
}

namespace {

const std::vector<std::string> kExperimentColumns = {
    "replication", "iteration", "pair_id", "application", "partner_id", "k_rb",  "reused",
    "sinr_db",     "throughput_bps", "mos", "served",   "sectored",     "mode"};

const std::vector<std::string> kSummaryColumns = {"group", "metric", "n",
                                                  "mean",  "ci95_lo", "ci95_hi"};

void append_experiment_rows(Table& t, int rep, const ScenarioReport& report) {
  for (const auto& it : report.iterations) {
    for (const auto& p : it.pairs) {
      const auto& d = p.decision;
      t.rows.push_back({
          std::to_string(rep),
          std::to_string(it.iteration),
          std::to_string(d.pair_id),
          std::string(to_string(d.application)),
          p.served ? std::to_string(d.partner) : "",
          std::to_string(d.k),
          fmt_bool(d.reused_partner),
          p.served ? format_double(linear_to_db(d.sinr_per_rb)) : "",
          format_double(p.throughput_bps),
          p.served ? format_double(p.mos) : "",
          fmt_bool(p.served),
          fmt_bool(report.sectored),
          std::string(to_string(report.mode)),
      });
    }
  }
}

void add_summary(Table& t, const std::string& group, const std::string& metric,
                 std::span<const double> xs) {
  const Interval ci = mean_ci95(xs);
  t.rows.push_back({group, metric, std::to_string(ci.n), format_double(ci.mean),
                    format_double(ci.lo), format_double(ci.hi)});
}

/// Max rows carry the maximum in every value column.
void add_max(Table& t, const std::string& group, const std::string& metric,
             std::span<const double> xs) {
  const double m = xs.empty() ? 0.0 : *std::max_element(xs.begin(), xs.end());
  const auto s = format_double(m);
  t.rows.push_back({group, metric, std::to_string(xs.size()), s, s, s});
}

void summarize_reports(Table& t, const std::string& prefix,
                       std::span<const ScenarioReport> reports) {
  std::vector<double> ts, sinr, mos_v, served;
  for (const auto& r : reports) {
    ts.push_back(r.t_system_bps);
    sinr.push_back(r.mean_sinr_db);
    mos_v.push_back(r.mean_mos);
    double s = 0.0;
    for (const auto& it : r.iterations) s += static_cast<double>(it.pairs.size() - it.unserved.size());
    served.push_back(s / static_cast<double>(std::max<std::size_t>(r.iterations.size(), 1)));
  }
  add_summary(t, prefix, "t_system_bps", ts);
  add_summary(t, prefix, "mean_sinr_db", sinr);
  add_summary(t, prefix, "mean_mos", mos_v);
  add_summary(t, prefix, "served_pairs_per_iteration", served);
}

std::optional<DemandScript> load_script(const RunConfig& cfg) {
  if (cfg.plan.demand_script.empty()) return std::nullopt;
  return DemandScript::load(cfg.plan.demand_script);
}

PresetOutput throughput_vs_iterations(const RunConfig& cfg) {
  const auto script = load_script(cfg);
  const auto reports =
      run_replications(cfg, cfg.plan.mode, nullptr, script ? &*script : nullptr);
  PresetOutput out;
  out.experiment.columns = kExperimentColumns;
  out.summary.columns = kSummaryColumns;
  for (std::size_t i = 0; i < reports.size(); ++i) {
    append_experiment_rows(out.experiment, static_cast<int>(i), reports[i]);
  }
  const std::string mode(to_string(cfg.plan.mode));
  for (int n = 1; n <= cfg.plan.q; ++n) {
    std::vector<double> totals;
    for (const auto& r : reports) totals.push_back(r.iterations[static_cast<std::size_t>(n - 1)].iteration_total_bps);
    add_summary(out.summary, mode + " iteration=" + std::to_string(n), "iteration_total_bps", totals);
  }
  summarize_reports(out.summary, mode, reports);
  return out;
}

struct BothModes {
  std::vector<ScenarioReport> sbrra;
  std::vector<ScenarioReport> hmm;
};

BothModes run_both(const RunConfig& cfg) {
  const auto script = load_script(cfg);
  const DemandScript* s = script ? &*script : nullptr;
  const hmm::HmmModel model = train_default_model(cfg.sim, cfg.plan);
  return {run_replications(cfg, AllocationMode::Sbrra, nullptr, s),
          run_replications(cfg, AllocationMode::Hmm, &model, s)};
}

Table experiment_of(const BothModes& both) {
  Table t;
  t.columns = kExperimentColumns;
  for (std::size_t i = 0; i < both.sbrra.size(); ++i) {
    append_experiment_rows(t, static_cast<int>(i), both.sbrra[i]);
    append_experiment_rows(t, static_cast<int>(i), both.hmm[i]);
  }
  return t;
}

PresetOutput mode_comparison(const RunConfig& cfg) {
  const BothModes both = run_both(cfg);
  PresetOutput out;
  out.experiment = experiment_of(both);
  out.summary.columns = kSummaryColumns;
  summarize_reports(out.summary, "sbrra", both.sbrra);
  summarize_reports(out.summary, "hmm", both.hmm);
  std::vector<double> diff;
  for (std::size_t i = 0; i < both.sbrra.size(); ++i) {
    diff.push_back(both.sbrra[i].t_system_bps - both.hmm[i].t_system_bps);
  }
  add_summary(out.summary, "sbrra-hmm", "t_system_bps", diff);
  return out;
}

PresetOutput mos_table(const RunConfig& cfg) {
  const BothModes both = run_both(cfg);
  PresetOutput out;
  out.experiment = experiment_of(both);
  out.summary.columns = kSummaryColumns;
  for (const auto* reports : {&both.sbrra, &both.hmm}) {
    for (std::size_t a = 0; a < kApplicationCount; ++a) {
      const auto app = static_cast<Application>(a);
      std::vector<double> mos_v, sinr, thr;
      std::string group;
      for (const auto& r : *reports) {
        group = std::string(to_string(r.mode)) + " " + std::string(to_string(app));
        for (const auto& it : r.iterations) {
          for (const auto& p : it.pairs) {
            if (!p.served || p.decision.application != app) continue;
            mos_v.push_back(p.mos);
            sinr.push_back(linear_to_db(p.decision.sinr_per_rb));
            thr.push_back(p.throughput_bps);
          }
        }
      }
      add_summary(out.summary, group, "mos", mos_v);
      add_summary(out.summary, group, "sinr_db", sinr);
      add_summary(out.summary, group, "throughput_bps", thr);
    }
  }
  return out;
}

PresetOutput pairs_vs_radius(const RunConfig& cfg) {
  const auto samples = sample_pairs_vs_radius(cfg);
  PresetOutput out;
  out.experiment.columns = {"replication", "iteration", "radius_m", "n_users", "pairs", "cellular"};
  out.summary.columns = kSummaryColumns;
  std::map<double, std::vector<double>> by_radius;
  for (const auto& s : samples) {
    out.experiment.rows.push_back({std::to_string(s.replication), std::to_string(s.iteration),
                                   format_double(s.radius_m), std::to_string(cfg.plan.n_users),
                                   std::to_string(s.pairs), std::to_string(s.cellular)});
    by_radius[s.radius_m].push_back(static_cast<double>(s.pairs));
  }
  for (const auto& [radius, pairs] : by_radius) {
    const auto group = "radius_m=" + format_double(radius);
    add_summary(out.summary, group, "pairs", pairs);
    add_max(out.summary, group, "pairs_max", pairs);
  }
  return out;
}

PresetOutput complexity_vs_pairs(const RunConfig& cfg) {
  const auto samples = sample_complexity(cfg);
  PresetOutput out;
  out.experiment.columns = {"replication", "n_users", "pairs", "sectored_w", "unsectored_w"};
  out.summary.columns = kSummaryColumns;
  std::map<std::size_t, std::array<std::vector<double>, 3>> by_users;
  for (const auto& s : samples) {
    out.experiment.rows.push_back({std::to_string(s.replication), std::to_string(s.n_users),
                                   std::to_string(s.pairs), format_double(s.sectored_w),
                                   format_double(s.unsectored_w)});
    auto& v = by_users[s.n_users];
    v[0].push_back(static_cast<double>(s.pairs));
    v[1].push_back(s.sectored_w);
    v[2].push_back(s.unsectored_w);
  }
  for (const auto& [n, v] : by_users) {
    const auto group = "n_users=" + std::to_string(n);
    add_summary(out.summary, group, "pairs", v[0]);
    add_summary(out.summary, group, "sectored_w", v[1]);
    add_summary(out.summary, group, "unsectored_w", v[2]);
  }
  return out;
}

}  // namespace

PresetOutput run_preset(Preset preset, const RunConfig& cfg) {
  switch (preset) {
    case Preset::PairsVsRadius: return pairs_vs_radius(cfg);
    case Preset::ThroughputVsIterations: return throughput_vs_iterations(cfg);
    case Preset::ModeComparison: return mode_comparison(cfg);
    case Preset::ComplexityVsPairs: return complexity_vs_pairs(cfg);
    case Preset::MosTable: return mos_table(cfg);
  }
  throw std::invalid_argument("unknown preset");
}

void write_csv(std::ostream& os, const Table& table, const RunConfig& cfg,
               std::string_view title) {
  os << "# d2dsim " << title << "\n";
  std::istringstream lines(serialize_config(cfg));
  std::string line;
  while (std::getline(lines, line)) {
    // Thread count never changes results; leaving it out keeps bytes identical.
    if (line.rfind("threads ", 0) == 0) continue;
    os << "# " << line << "\n";
  }
  auto row_out = [&](const std::vector<std::string>& row) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << row[i];
    os << "\n";
  };
  row_out(table.columns);
  for (const auto& row : table.rows) row_out(row);
}

std::vector<std::string> run_preset(std::string_view name, const RunConfig& cfg,
                                    const std::string& out_dir) {
  const Preset preset = parse_preset(name);
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec || !fs::is_directory(out_dir)) {
    throw std::runtime_error("cannot create output directory '" + out_dir + "'");
  }
  const PresetOutput out = run_preset(preset, cfg);
  const std::string base = (fs::path(out_dir) / std::string(name)).string();
  const std::vector<std::string> paths = {base + ".csv", base + "_summary.csv"};
  const std::array<const Table*, 2> tables = {&out.experiment, &out.summary};
  for (std::size_t i = 0; i < 2; ++i) {
    std::ofstream f(paths[i], std::ios::binary);
    if (!f) throw std::runtime_error("cannot write '" + paths[i] + "'");
    write_csv(f, *tables[i], cfg, std::string(name) + (i ? " summary" : ""));
    if (!f) throw std::runtime_error("write failed for '" + paths[i] + "'");
  }
  return paths;
}

}  // namespace d2dsim::harness
